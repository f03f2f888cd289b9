//! The exact invariant suite behind `verify`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;

use crate::oracle::{
    cramer_numerator, delta_m1_closed_form, exactness_check, moment, solve_moment_system, vandermonde_closed_form,
    vandermonde_det, weights_by_solver, MomentSystem,
};
use crate::rational::RationalWeight;
use crate::weights::{one_sided_first, one_sided_nth, Stencil, StencilKind};
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub(super) struct Check {
    pub check: &'static str,
    pub subject: String,
    pub n: u32,
    pub passed: bool,
    pub detail: String,
}

fn delta(l: u32, k: u32) -> RationalWeight {
    if l == k {
        RationalWeight::one()
    } else {
        RationalWeight::zero()
    }
}

/// First `k <= n` where `sum a_m m^k != δ_lk`, for weights on offsets `0..=n`.
fn moment_failure(weights: &[RationalWeight], l: u32, n: u32) -> Option<u32> {
    (0..=n).find(|&k| {
        let sum: RationalWeight =
            weights.iter().enumerate().map(|(m, w)| w * &RationalWeight::from(BigInt::from(m).pow(k))).sum();
        sum != delta(l, k)
    })
}

fn moment_check(subject: String, n: u32, l: u32, weights: &[RationalWeight]) -> Check {
    let fail = moment_failure(weights, l, n);
    Check {
        check: "moment",
        subject,
        n,
        passed: fail.is_none(),
        detail: match fail {
            None => format!("sum a_m m^k = δ(l={l}, k) for k = 0..={n}"),
            Some(k) => format!("fails at k = {k}"),
        },
    }
}

fn dense(stencil: &Stencil) -> Vec<RationalWeight> {
    (0..=i64::from(stencil.n())).map(|m| stencil.weight_at(m)).collect()
}

fn kind_checks(kind: StencilKind, n: u32, out: &mut Vec<Check>) -> Result<()> {
    let stencil = Stencil::generate(kind, n)?;
    let subject = stencil.to_string();

    let expected = kind.exactness_degree(n);
    let report = exactness_check(&stencil, expected + 2);
    out.push(Check {
        check: "exactness",
        subject: subject.clone(),
        n,
        passed: report.max_exact_degree == i64::from(expected),
        detail: format!("max exact degree {} (expected {expected})", report.max_exact_degree),
    });

    let total = moment(&stencil, 0);
    out.push(Check {
        check: "zero-sum",
        subject: subject.clone(),
        n,
        passed: total.is_zero(),
        detail: format!("sum of weights {total}"),
    });

    let solved = weights_by_solver(&stencil)?;
    let stored: Vec<(i64, RationalWeight)> = stencil.nodes().map(|(o, w)| (o, w.clone())).collect();
    out.push(Check {
        check: "solver-match",
        subject,
        n,
        passed: solved == stored,
        detail: format!("{} nodes from the moment solve", solved.len()),
    });
    Ok(())
}

fn determinant_checks(n: u32, out: &mut Vec<Check>) -> Result<()> {
    let det = vandermonde_det(n);
    let closed = vandermonde_closed_form(n);
    out.push(Check {
        check: "determinant",
        subject: "vandermonde".into(),
        n,
        passed: det == closed,
        detail: format!("det = {det}, closed form = {closed}"),
    });
    let first = one_sided_first(n)?;
    let mismatches: Vec<u32> = (1..=n)
        .filter(|&m| {
            let numer = cramer_numerator(m, 1, n);
            let closed = delta_m1_closed_form(m, n);
            match (numer, closed) {
                (Ok(a), Ok(b)) => {
                    a != b
                        || RationalWeight::from(a) / RationalWeight::from(det.clone()) != first.weight_at(i64::from(m))
                }
                _ => true,
            }
        })
        .collect();
    out.push(Check {
        check: "determinant",
        subject: "cramer-ratio".into(),
        n,
        passed: mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            format!("Δ_m/Δ_0 = a_m for m = 1..={n}")
        } else {
            format!("mismatch at m = {mismatches:?}")
        },
    });
    Ok(())
}

/// Every check for `n = 1..=max_n`, in a fixed order.
pub(super) fn run_suite(max_n: u32) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for l in 0..=n {
            let solved = solve_moment_system(&MomentSystem::one_sided(n, l)?)?;
            out.push(moment_check(format!("solver(l={l})"), n, l, &solved));
        }
        out.push(moment_check(format!("{}", one_sided_first(n)?), n, 1, &dense(&one_sided_first(n)?)));
        out.push(moment_check(format!("{}", one_sided_nth(n)?), n, n, &dense(&one_sided_nth(n)?)));
        for kind in StencilKind::ALL {
            kind_checks(kind, n, &mut out)?;
        }
        determinant_checks(n, &mut out)?;
    }
    Ok(out)
}

pub(super) fn render_text(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{status} {:<12} n={:<2} {:<24} {}", c.check, c.n, c.subject, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(s, "{} checks, {} failed", checks.len(), failed);
    s
}
