//! Finite-difference weight families in exact rational arithmetic.
//!
//! Every family is returned as a [`Stencil`]: integer node offsets, their
//! weights, and the evaluation rule `prefactor / h^h_power * sum(w_m * f_m)`.
//! Central families are built from their moment conditions; the half-point
//! and one-sided families from their explicit product and binomial forms.
//! The infinite-`n` limits are returned as [`LimitWeight`] values, which keep
//! a symbolic power of pi.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rational::{binomial, factorial, harmonic, RationalWeight};

/// Equidistant grid spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    h: f64,
}

impl GridSpec {
    pub fn new(h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(invalid(format!("grid spacing must be positive and finite, got {h}")));
        }
        Ok(GridSpec { h })
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { h: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StencilKind {
    /// `(1/2h) sum α_m (f_m - f_-m)`, offsets `±1..±n`.
    CentralFirst,
    /// `(1/h²) sum α_m (f_m - 2 f_0 + f_-m)`, offsets `-n..n`.
    CentralSecond,
    /// Central first derivative from the odd nodes `±1, ±3, .., ±(2n-1)` only.
    #[serde(rename = "half-point")]
    HalfPointFirst,
    /// Forward first derivative on nodes `0..n`.
    OneSidedFirst,
    /// Forward `n`-th derivative on nodes `0..n`.
    OneSidedNth,
}

impl StencilKind {
    pub const ALL: [StencilKind; 5] = [
        StencilKind::CentralFirst,
        StencilKind::CentralSecond,
        StencilKind::HalfPointFirst,
        StencilKind::OneSidedFirst,
        StencilKind::OneSidedNth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StencilKind::CentralFirst => "central-first",
            StencilKind::CentralSecond => "central-second",
            StencilKind::HalfPointFirst => "half-point",
            StencilKind::OneSidedFirst => "one-sided-first",
            StencilKind::OneSidedNth => "one-sided-nth",
        }
    }

    /// Highest monomial degree the family differentiates exactly.
    pub fn exactness_degree(self, n: u32) -> u32 {
        match self {
            StencilKind::CentralFirst | StencilKind::HalfPointFirst => 2 * n,
            StencilKind::CentralSecond => 2 * n + 1,
            StencilKind::OneSidedFirst | StencilKind::OneSidedNth => n,
        }
    }

    /// Node offsets the family uses for parameter `n`.
    pub fn offsets(self, n: u32) -> Vec<i64> {
        let n = i64::from(n);
        match self {
            StencilKind::CentralFirst => (-n..=n).filter(|&m| m != 0).collect(),
            StencilKind::CentralSecond => (-n..=n).collect(),
            StencilKind::HalfPointFirst => (-n..n).map(|m| 2 * m + 1).collect(),
            StencilKind::OneSidedFirst | StencilKind::OneSidedNth => (0..=n).collect(),
        }
    }

    fn derivative_order(self, n: u32) -> u32 {
        match self {
            StencilKind::CentralSecond => 2,
            StencilKind::OneSidedNth => n,
            _ => 1,
        }
    }

    fn prefactor(self, n: u32) -> RationalWeight {
        match self {
            StencilKind::CentralFirst | StencilKind::HalfPointFirst => RationalWeight::new(1, 2),
            StencilKind::CentralSecond | StencilKind::OneSidedFirst => RationalWeight::one(),
            StencilKind::OneSidedNth => factorial(u64::from(n)).into(),
        }
    }
}

impl fmt::Display for StencilKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A derivative-approximation rule on integer node offsets.
///
/// Evaluates as `prefactor / h^h_power * sum_m weight_m * f(offset_m * h)`.
/// Only nonzero weights are stored; absent offsets have weight zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stencil {
    kind: StencilKind,
    n: u32,
    derivative_order: u32,
    offsets: Vec<i64>,
    weights: Vec<RationalWeight>,
    h_power: u32,
    prefactor: RationalWeight,
}

impl Stencil {
    /// Generate the family `kind` for parameter `n`.
    pub fn generate(kind: StencilKind, n: u32) -> Result<Stencil> {
        match kind {
            StencilKind::CentralFirst => central_first(n),
            StencilKind::CentralSecond => central_second(n),
            StencilKind::HalfPointFirst => half_point(n),
            StencilKind::OneSidedFirst => one_sided_first(n),
            StencilKind::OneSidedNth => one_sided_nth(n),
        }
    }

    /// Assemble a stencil from its parts, checking every structural invariant
    /// of `kind` (offset set, symmetry, zero sum, order, h power, prefactor).
    pub fn from_parts(
        kind: StencilKind,
        n: u32,
        derivative_order: u32,
        h_power: u32,
        prefactor: RationalWeight,
        nodes: Vec<(i64, RationalWeight)>,
    ) -> Result<Stencil> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if derivative_order != kind.derivative_order(n) {
            return Err(invalid(format!(
                "{kind} with n={n} has derivative order {}, got {derivative_order}",
                kind.derivative_order(n)
            )));
        }
        if h_power != derivative_order {
            return Err(invalid(format!("h power {h_power} differs from derivative order {derivative_order}")));
        }
        if prefactor != kind.prefactor(n) {
            return Err(invalid(format!("{kind} has prefactor {}, got {prefactor}", kind.prefactor(n))));
        }
        if nodes.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(invalid("offsets must be strictly increasing"));
        }
        let allowed = kind.offsets(n);
        if let Some((bad, _)) = nodes.iter().find(|(o, _)| !allowed.contains(o)) {
            return Err(invalid(format!("offset {bad} is not a node of {kind} with n={n}")));
        }
        let nodes: Vec<_> = nodes.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        let map: BTreeMap<i64, &RationalWeight> = nodes.iter().map(|(o, w)| (*o, w)).collect();
        let at = |o: i64| map.get(&o).map(|w| (*w).clone()).unwrap_or_default();
        match kind {
            StencilKind::CentralFirst | StencilKind::HalfPointFirst => {
                if map.keys().any(|&o| at(-o) != -at(o)) {
                    return Err(invalid(format!("{kind} weights must be antisymmetric")));
                }
            }
            StencilKind::CentralSecond => {
                if map.keys().any(|&o| at(-o) != at(o)) {
                    return Err(invalid("central-second weights must be symmetric"));
                }
                let side: RationalWeight = map.range(1..).map(|(_, w)| *w).sum();
                if at(0) != -(RationalWeight::from(2) * side) {
                    return Err(invalid("central-second center weight must be -2 times the one-sided sum"));
                }
            }
            StencilKind::OneSidedFirst | StencilKind::OneSidedNth => {
                let total: RationalWeight = map.values().copied().sum();
                if !total.is_zero() {
                    return Err(invalid(format!("{kind} weights must sum to zero, got {total}")));
                }
            }
        }
        let (offsets, weights) = nodes.into_iter().unzip();
        Ok(Stencil { kind, n, derivative_order, offsets, weights, h_power, prefactor })
    }

    fn build(kind: StencilKind, n: u32, nodes: Vec<(i64, RationalWeight)>) -> Stencil {
        let mut nodes: Vec<_> = nodes.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        nodes.sort_by_key(|(o, _)| *o);
        let (offsets, weights) = nodes.into_iter().unzip();
        let derivative_order = kind.derivative_order(n);
        Stencil { kind, n, derivative_order, offsets, weights, h_power: derivative_order, prefactor: kind.prefactor(n) }
    }

    pub fn kind(&self) -> StencilKind {
        self.kind
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn derivative_order(&self) -> u32 {
        self.derivative_order
    }

    pub fn h_power(&self) -> u32 {
        self.h_power
    }

    pub fn prefactor(&self) -> &RationalWeight {
        &self.prefactor
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn weights(&self) -> &[RationalWeight] {
        &self.weights
    }

    pub fn nodes(&self) -> impl Iterator<Item = (i64, &RationalWeight)> + '_ {
        self.offsets.iter().copied().zip(self.weights.iter())
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Weight at `offset`, zero where the stencil has no node.
    pub fn weight_at(&self, offset: i64) -> RationalWeight {
        match self.offsets.binary_search(&offset) {
            Ok(i) => self.weights[i].clone(),
            Err(_) => RationalWeight::zero(),
        }
    }

    /// Largest `|offset|` used.
    pub fn reach(&self) -> u64 {
        self.offsets.iter().map(|o| o.unsigned_abs()).max().unwrap_or(0)
    }

    /// Weights with the prefactor folded in, i.e. the plain sum coefficients.
    pub fn effective_weights(&self) -> Vec<RationalWeight> {
        self.weights.iter().map(|w| w * &self.prefactor).collect()
    }

    /// The filter sequence `α_m` indexed by `m >= 0`: the weights at
    /// nonnegative offsets for one-sided kinds, and at positive offsets for
    /// the central and half-point kinds (whose negative side is implied by
    /// symmetry and whose central-second center weight is implied by the sum).
    pub fn filter_sequence(&self) -> Vec<(u64, RationalWeight)> {
        let first = match self.kind {
            StencilKind::OneSidedFirst | StencilKind::OneSidedNth => 0,
            _ => 1,
        };
        self.nodes().filter(|(o, _)| *o >= first).map(|(o, w)| (o as u64, w.clone())).collect()
    }

    pub fn exactness_degree(&self) -> u32 {
        self.kind.exactness_degree(self.n)
    }
}

impl fmt::Display for Stencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={})", self.kind, self.n)
    }
}

fn require_positive(n: u32) -> Result<()> {
    if n == 0 {
        Err(invalid("n must be at least 1"))
    } else {
        Ok(())
    }
}

/// Gauss-Jordan elimination over the rationals for a square system.
fn solve_rational(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let size = b.len();
    for col in 0..size {
        let pivot = (col..size).find(|&row| !a[row][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in &mut a[col][col..] {
            *x *= &inv;
        }
        b[col] = &b[col] * &inv;
        for row in 0..size {
            if row == col || a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone();
            let pivot_row = a[col].clone();
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &factor * p;
            }
            let delta = &factor * &b[col];
            b[row] -= delta;
        }
    }
    Some(b)
}

/// Solve `sum_{m=1..n} α_m m^p = [p == target]` for `p` in `powers`.
fn solve_reduced_moments(n: u32, powers: impl Iterator<Item = u32>, target: u32) -> Vec<RationalWeight> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for p in powers {
        a.push((1..=n).map(|m| BigRational::from_integer(BigInt::from(m).pow(p))).collect());
        b.push(if p == target { BigRational::one() } else { BigRational::zero() });
    }
    // The reduced systems are Vandermonde in m² with distinct nodes, hence nonsingular.
    solve_rational(a, b)
        .expect("reduced central moment system is nonsingular")
        .into_iter()
        .map(RationalWeight::from)
        .collect()
}

/// Central first derivative `f'(0) ≈ (1/2h) sum_{m=1..n} α_m (f_m - f_-m)`.
///
/// `α_m` solves the odd moment conditions `sum α_m m^(2j+1) = δ_j0`,
/// `j = 0..n-1`, exactly.
pub fn central_first(n: u32) -> Result<Stencil> {
    require_positive(n)?;
    let alpha = solve_reduced_moments(n, (0..n).map(|j| 2 * j + 1), 1);
    let mut nodes = Vec::with_capacity(2 * n as usize);
    for (m, a) in (1..).zip(alpha) {
        nodes.push((-m, -&a));
        nodes.push((m, a));
    }
    Ok(Stencil::build(StencilKind::CentralFirst, n, nodes))
}

/// Central second derivative `f''(0) ≈ (1/h²) sum_{m=1..n} α_m (f_m - 2f_0 + f_-m)`.
///
/// `α_m` solves the even moment conditions `sum α_m m^(2j) = δ_j1`,
/// `j = 1..n`. The stored center weight is `-2 sum α_m`.
pub fn central_second(n: u32) -> Result<Stencil> {
    require_positive(n)?;
    let alpha = solve_reduced_moments(n, (1..=n).map(|j| 2 * j), 2);
    let side: RationalWeight = alpha.iter().sum();
    let mut nodes = vec![(0, -(RationalWeight::from(2) * side))];
    for (m, a) in (1..).zip(alpha) {
        nodes.push((-m, a.clone()));
        nodes.push((m, a));
    }
    Ok(Stencil::build(StencilKind::CentralSecond, n, nodes))
}

/// Weights that use only the odd nodes `±1, ±3, .., ±(2n-1)`:
/// `α_{2m+1} = 1 / ((2m+1) π_m)` with
/// `π_m = prod_{k != m} (1 - (2m+1)²/(2k+1)²)`.
pub fn half_point(n: u32) -> Result<Stencil> {
    require_positive(n)?;
    let n = i64::from(n);
    let mut nodes = Vec::with_capacity(2 * n as usize);
    for m in 0..n {
        let node = 2 * m + 1;
        let product: RationalWeight = (0..n)
            .filter(|&k| k != m)
            .map(|k| RationalWeight::one() - RationalWeight::new(node * node, (2 * k + 1) * (2 * k + 1)))
            .fold(RationalWeight::one(), |acc, x| acc * x);
        let alpha = (RationalWeight::from(node) * product).recip();
        nodes.push((-node, -&alpha));
        nodes.push((node, alpha));
    }
    Ok(Stencil::build(StencilKind::HalfPointFirst, n as u32, nodes))
}

/// Forward first derivative on nodes `0..n`:
/// `a_m = (-1)^(m+1) C(n,m) / m` for `m >= 1` and `a_0 = -H_n`.
pub fn one_sided_first(n: u32) -> Result<Stencil> {
    require_positive(n)?;
    let mut nodes = vec![(0, -harmonic(u64::from(n)))];
    for m in 1..=u64::from(n) {
        let sign = if m % 2 == 1 { 1 } else { -1 };
        nodes.push((m as i64, RationalWeight::new(sign * binomial(u64::from(n), m), m)));
    }
    Ok(Stencil::build(StencilKind::OneSidedFirst, n, nodes))
}

/// Forward `n`-th derivative on nodes `0..n`:
/// `a_m = (-1)^(m+n) C(n,m) / n!`, evaluated with prefactor `n!`.
pub fn one_sided_nth(n: u32) -> Result<Stencil> {
    require_positive(n)?;
    let nf = factorial(u64::from(n));
    let nodes = (0..=u64::from(n))
        .map(|m| {
            let sign = if (m + u64::from(n)) % 2 == 0 { 1 } else { -1 };
            (m as i64, RationalWeight::new(sign * binomial(u64::from(n), m), nf.clone()))
        })
        .collect();
    Ok(Stencil::build(StencilKind::OneSidedNth, n, nodes))
}

/// One-sided first-derivative weight through the product representation
/// `a_m = 1 / (m p_m(n))`, `p_m(n) = prod_{k=1..n, k != m} (1 - m/k)`.
pub fn product_form_one_sided(m: u32, n: u32) -> Result<RationalWeight> {
    if m == 0 || m > n {
        return Err(invalid(format!("need 1 <= m <= n, got m={m}, n={n}")));
    }
    let m = i64::from(m);
    let p = (1..=i64::from(n))
        .filter(|&k| k != m)
        .map(|k| RationalWeight::one() - RationalWeight::new(m, k))
        .fold(RationalWeight::one(), |acc, x| acc * x);
    Ok((RationalWeight::from(m) * p).recip())
}

/// An infinite-`n` limit weight, `rational_part * π^pi_power`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitWeight {
    pub index: u64,
    pub rational_part: RationalWeight,
    pub pi_power: i32,
}

impl LimitWeight {
    pub fn value(&self) -> f64 {
        self.rational_part.to_f64() * PI.powi(self.pi_power)
    }
}

fn alternating_sign(m: u64) -> i64 {
    if m % 2 == 1 {
        1
    } else {
        -1
    }
}

/// `lim_{n→∞} α_m^(1)(n) = (-1)^(m+1) 2/m`.
pub fn central_first_limit(m: u64) -> Result<LimitWeight> {
    if m == 0 {
        return Err(invalid("limit index m must be at least 1"));
    }
    Ok(LimitWeight { index: m, rational_part: RationalWeight::new(2 * alternating_sign(m), m), pi_power: 0 })
}

/// `lim_{n→∞} α_m^(2)(n) = (-1)^(m+1) 2/m²`.
pub fn central_second_limit(m: u64) -> Result<LimitWeight> {
    if m == 0 {
        return Err(invalid("limit index m must be at least 1"));
    }
    Ok(LimitWeight {
        index: m,
        rational_part: RationalWeight::new(2 * alternating_sign(m), BigInt::from(m) * m),
        pi_power: 0,
    })
}

/// `lim_{n→∞} α_{2m+1}^(1/2)(n) = (-1)^m 4 / (π (2m+1)²)`; `index` is the
/// node `2m+1`.
pub fn half_point_limit(m: u64) -> LimitWeight {
    let node = 2 * m + 1;
    let sign = if m.is_multiple_of(2) { 4 } else { -4 };
    LimitWeight { index: node, rational_part: RationalWeight::new(sign, BigInt::from(node) * node), pi_power: -1 }
}

/// One node of the JSON stencil document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDocument {
    pub offset: i64,
    pub weight: RationalWeight,
}

/// `{offset: weight}` view of the nodes, kept in offset order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightMap(Vec<(i64, RationalWeight)>);

impl Serialize for WeightMap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (offset, weight) in &self.0 {
            map.serialize_entry(&offset.to_string(), weight)?;
        }
        map.end()
    }
}

/// Serialized stencil. Rationals are always `"p/q"` (or `"p"`) strings.
/// `weights` repeats `nodes` keyed by offset and is ignored when reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StencilDocument {
    pub kind: StencilKind,
    pub n: u32,
    pub derivative_order: u32,
    pub h_power: u32,
    pub prefactor: RationalWeight,
    pub nodes: Vec<NodeDocument>,
    #[serde(default, skip_deserializing)]
    pub weights: WeightMap,
}

impl From<&Stencil> for StencilDocument {
    fn from(s: &Stencil) -> Self {
        StencilDocument {
            kind: s.kind,
            n: s.n,
            derivative_order: s.derivative_order,
            h_power: s.h_power,
            prefactor: s.prefactor.clone(),
            nodes: s.nodes().map(|(offset, w)| NodeDocument { offset, weight: w.clone() }).collect(),
            weights: WeightMap(s.nodes().map(|(o, w)| (o, w.clone())).collect()),
        }
    }
}

impl TryFrom<StencilDocument> for Stencil {
    type Error = Error;

    fn try_from(doc: StencilDocument) -> Result<Stencil> {
        let nodes = doc.nodes.into_iter().map(|nd| (nd.offset, nd.weight)).collect();
        Stencil::from_parts(doc.kind, doc.n, doc.derivative_order, doc.h_power, doc.prefactor, nodes)
    }
}

impl Stencil {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StencilDocument::from(self)).expect("stencil documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Stencil> {
        let doc: StencilDocument =
            serde_json::from_str(text).map_err(|e| invalid(format!("malformed stencil JSON: {e}")))?;
        Stencil::try_from(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> RationalWeight {
        RationalWeight::new(p, q)
    }

    fn positive_side(s: &Stencil) -> Vec<RationalWeight> {
        s.filter_sequence().into_iter().map(|(_, w)| w).collect()
    }

    #[test]
    fn central_first_small_cases() {
        assert_eq!(positive_side(&central_first(1).unwrap()), vec![r(1, 1)]);
        assert_eq!(positive_side(&central_first(2).unwrap()), vec![r(4, 3), r(-1, 6)]);
        let s = central_first(2).unwrap();
        assert_eq!(s.offsets(), &[-2, -1, 1, 2]);
        // (-f2 + 8f1 - 8f-1 + f-2) / 12h
        let eff: Vec<_> = s.effective_weights();
        assert_eq!(eff, vec![r(1, 12), r(-2, 3), r(2, 3), r(-1, 12)]);
    }

    #[test]
    fn central_first_leading_weight_approaches_two() {
        let a1 = central_first(50).unwrap().weight_at(1);
        assert_eq!(a1, r(100, 51));
        assert_eq!(&RationalWeight::from(2) - &a1, r(2, 51));
        let mut prev = RationalWeight::zero();
        for n in 1..=20 {
            let a1 = central_first(n).unwrap().weight_at(1);
            assert_eq!(a1, r(2 * i64::from(n), i64::from(n) + 1));
            assert!(a1 > prev);
            prev = a1;
        }
    }

    #[test]
    fn central_second_small_cases() {
        let s1 = central_second(1).unwrap();
        assert_eq!(s1.weights(), &[r(1, 1), r(-2, 1), r(1, 1)]);
        let s2 = central_second(2).unwrap();
        assert_eq!(positive_side(&s2), vec![r(4, 3), r(-1, 12)]);
        // (-f2 + 16f1 - 30f0 + 16f-1 - f-2) / 12h²
        assert_eq!(s2.weights(), &[r(-1, 12), r(4, 3), r(-5, 2), r(4, 3), r(-1, 12)]);
    }

    #[test]
    fn half_point_small_cases() {
        let s1 = half_point(1).unwrap();
        assert_eq!(s1.offsets(), &[-1, 1]);
        assert_eq!(s1.weight_at(1), r(1, 1));
        let s2 = half_point(2).unwrap();
        assert_eq!(s2.offsets(), &[-3, -1, 1, 3]);
        assert_eq!(positive_side(&s2), vec![r(9, 8), r(-1, 24)]);
        assert!(s2.weight_at(2).is_zero());
    }

    #[test]
    fn half_point_first_moment_is_one() {
        for n in 1..=16 {
            let s = half_point(n).unwrap();
            let moment: RationalWeight =
                s.filter_sequence().iter().map(|(m, w)| w * &RationalWeight::from(*m as i64)).sum();
            assert_eq!(moment, RationalWeight::one(), "n={n}");
        }
    }

    #[test]
    fn one_sided_first_small_cases() {
        assert_eq!(one_sided_first(1).unwrap().weights(), &[r(-1, 1), r(1, 1)]);
        assert_eq!(one_sided_first(2).unwrap().weights(), &[r(-3, 2), r(2, 1), r(-1, 2)]);
        for n in 1..=30 {
            let s = one_sided_first(n).unwrap();
            assert_eq!(s.weight_at(1), RationalWeight::from(i64::from(n)));
            assert_eq!(s.weight_at(0), -harmonic(u64::from(n)));
        }
    }

    #[test]
    fn one_sided_nth_small_cases() {
        assert_eq!(one_sided_nth(1).unwrap().weights(), &[r(-1, 1), r(1, 1)]);
        let s2 = one_sided_nth(2).unwrap();
        assert_eq!(s2.weights(), &[r(1, 2), r(-1, 1), r(1, 2)]);
        assert_eq!(s2.prefactor(), &r(2, 1));
        assert_eq!(s2.effective_weights(), vec![r(1, 1), r(-2, 1), r(1, 1)]);
        let s3 = one_sided_nth(3).unwrap();
        assert_eq!(s3.weights(), &[r(-1, 6), r(1, 2), r(-1, 2), r(1, 6)]);
        assert_eq!((s3.derivative_order(), s3.h_power()), (3, 3));
    }

    #[test]
    fn harmonic_identity_inside_center_weight() {
        for n in 1..=64u64 {
            let lhs: RationalWeight =
                (1..=n).map(|m| RationalWeight::new(alternating_sign(m) * binomial(n, m), m)).sum();
            assert_eq!(lhs, harmonic(n), "n={n}");
        }
    }

    #[test]
    fn product_form_matches_binomial_form() {
        assert_eq!(product_form_one_sided(1, 2).unwrap(), r(2, 1));
        assert_eq!(product_form_one_sided(2, 2).unwrap(), r(-1, 2));
        assert_eq!(product_form_one_sided(1, 1).unwrap(), r(1, 1));
        for n in 1..=20 {
            let s = one_sided_first(n).unwrap();
            for m in 1..=n {
                assert_eq!(product_form_one_sided(m, n).unwrap(), s.weight_at(i64::from(m)));
            }
        }
        assert!(product_form_one_sided(0, 3).is_err());
        assert!(product_form_one_sided(4, 3).is_err());
    }

    #[test]
    fn zero_n_is_rejected() {
        for kind in StencilKind::ALL {
            assert!(matches!(Stencil::generate(kind, 0), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn limit_weights() {
        let vals: Vec<_> = (1..=3).map(|m| central_first_limit(m).unwrap().rational_part).collect();
        assert_eq!(vals, vec![r(2, 1), r(-1, 1), r(2, 3)]);
        let vals: Vec<_> = [1, 2, 4].iter().map(|&m| central_second_limit(m).unwrap().rational_part).collect();
        assert_eq!(vals, vec![r(2, 1), r(-1, 2), r(-1, 8)]);
        assert!(central_first_limit(0).is_err());
        assert!(central_second_limit(0).is_err());

        let h0 = half_point_limit(0);
        assert_eq!((h0.index, h0.rational_part.clone(), h0.pi_power), (1, r(4, 1), -1));
        assert_eq!(h0.value(), 4.0 / PI);
        assert_eq!(half_point_limit(1).rational_part, r(-4, 9));
        assert_eq!(half_point_limit(2).rational_part, r(4, 25));
    }

    #[test]
    fn half_point_leading_weight_tends_to_four_over_pi() {
        let err = |n| (half_point(n).unwrap().weight_at(1).to_f64() - 4.0 / PI).abs();
        assert!(err(40) < err(10));
        assert!(err(10) < err(2));
        assert!(err(40) < 0.01);
    }

    #[test]
    fn from_parts_checks_structure() {
        let s = one_sided_first(2).unwrap();
        let nodes: Vec<_> = s.nodes().map(|(o, w)| (o, w.clone())).collect();
        let back = Stencil::from_parts(s.kind(), 2, 1, 1, r(1, 1), nodes.clone()).unwrap();
        assert_eq!(back, s);

        let mut broken = nodes.clone();
        broken[0].1 = r(-1, 1);
        assert!(Stencil::from_parts(s.kind(), 2, 1, 1, r(1, 1), broken).is_err());
        assert!(Stencil::from_parts(s.kind(), 2, 1, 1, r(1, 2), nodes.clone()).is_err());
        let mut reversed = nodes;
        reversed.reverse();
        assert!(Stencil::from_parts(s.kind(), 2, 1, 1, r(1, 1), reversed).is_err());

        let c = central_first(1).unwrap();
        let asym = vec![(-1, r(1, 1)), (1, r(1, 1))];
        assert!(Stencil::from_parts(c.kind(), 1, 1, 1, r(1, 2), asym).is_err());
        let off_grid = vec![(-2, r(-1, 1)), (2, r(1, 1))];
        assert!(Stencil::from_parts(c.kind(), 1, 1, 1, r(1, 2), off_grid).is_err());
    }

    #[test]
    fn json_document_layout() {
        let s = one_sided_first(2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["kind"], "one-sided-first");
        assert_eq!(v["n"], 2);
        assert_eq!(v["prefactor"], "1");
        assert_eq!(v["weights"]["0"], "-3/2");
        assert_eq!(v["weights"]["1"], "2");
        assert_eq!(v["weights"]["2"], "-1/2");
        assert_eq!(v["nodes"][0]["offset"], 0);
        assert_eq!(v["nodes"][0]["weight"], "-3/2");
        for kind in StencilKind::ALL {
            let s = Stencil::generate(kind, 5).unwrap();
            assert_eq!(Stencil::from_json(&s.to_json()).unwrap(), s);
        }
        assert!(Stencil::from_json("{}").is_err());
        let tampered = s.to_json().replace("\"-3/2\"", "\"-1\"");
        assert!(Stencil::from_json(&tampered).is_err());
    }

    #[test]
    fn grid_spec_rejects_nonpositive_spacing() {
        assert!(GridSpec::new(0.0).is_err());
        assert!(GridSpec::new(-1.0).is_err());
        assert!(GridSpec::new(f64::NAN).is_err());
        assert_eq!(GridSpec::new(0.5).unwrap().h(), 0.5);
    }
}
