//! Differentiation of equidistantly sampled functions.
//!
//! Stencils are evaluated exactly: every `f64` sample is an exact rational,
//! so the weighted sum, the prefactor and the division by `h^p` are carried
//! out in rational arithmetic and rounded to `f64` once at the end.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::oracle::CompensatedSum;
use crate::weights::{
    central_first, central_second, central_second_limit, half_point, one_sided_first, Stencil, StencilKind,
};

/// Equidistant samples; sample `i` sits at `x = (i - origin) h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    h: f64,
    samples: Vec<f64>,
    origin: usize,
}

impl SampledSignal {
    pub fn new(h: f64, samples: Vec<f64>, origin: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(invalid(format!("grid spacing must be positive and finite, got {h}")));
        }
        if samples.len() < 2 {
            return Err(invalid("a signal needs at least two samples"));
        }
        if origin >= samples.len() {
            return Err(invalid(format!("origin {origin} outside {} samples", samples.len())));
        }
        if let Some(i) = samples.iter().position(|f| !f.is_finite()) {
            return Err(invalid(format!("sample {i} is not finite")));
        }
        Ok(SampledSignal { h, samples, origin })
    }

    /// Sample `func` at nodes `i - origin` for `i = 0..count`.
    pub fn from_function(func: &TestFunction, h: f64, count: usize, origin: usize) -> Result<Self> {
        let samples = (0..count).map(|i| func.value(i as i64 - origin as i64, h)).collect();
        SampledSignal::new(h, samples, origin)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x(&self, index: usize) -> f64 {
        (index as f64 - self.origin as f64) * self.h
    }
}

/// How the value at one index was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Policy {
    CentralN(u32),
    OneSidedForward(u32),
    OneSidedBackward(u32),
    HalfPoint(u32),
    Skipped,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::CentralN(n) => write!(f, "central({n})"),
            Policy::OneSidedForward(n) => write!(f, "forward({n})"),
            Policy::OneSidedBackward(n) => write!(f, "backward({n})"),
            Policy::HalfPoint(n) => write!(f, "half-point({n})"),
            Policy::Skipped => f.write_str("skipped"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeResult {
    pub values: Vec<Option<f64>>,
    pub order: u32,
    pub policy: Vec<Policy>,
}

/// Direction a stencil is laid over the samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    /// Offsets mirrored; the result picks up `(-1)^order`.
    Backward,
}

fn exact(f: f64) -> BigRational {
    BigRational::from_float(f).expect("samples are checked finite")
}

fn sample_at(signal: &SampledSignal, index: i64) -> Result<BigRational> {
    if index < 0 || index as usize >= signal.len() {
        return Err(Error::Boundary { index, len: signal.len() });
    }
    Ok(exact(signal.samples[index as usize]))
}

fn evaluate(signal: &SampledSignal, stencil: &Stencil, index: usize, direction: Direction) -> Result<f64> {
    let idx = index as i64;
    let sign = match direction {
        Direction::Forward => 1,
        Direction::Backward => -1,
    };
    for &o in stencil.offsets() {
        let at = idx + sign * o;
        if at < 0 || at as usize >= signal.len() {
            return Err(Error::Boundary { index: at, len: signal.len() });
        }
    }
    let f = |o: i64| sample_at(signal, idx + sign * o);
    let mut sum = BigRational::zero();
    match stencil.kind() {
        // Paired forms: (f_m - f_-m) and (f_m - 2 f_0 + f_-m), so a signal
        // symmetric about `index` cancels exactly.
        StencilKind::CentralFirst | StencilKind::HalfPointFirst => {
            for (o, w) in stencil.nodes().filter(|(o, _)| *o > 0) {
                sum += w.as_ratio() * (f(o)? - f(-o)?);
            }
        }
        StencilKind::CentralSecond => {
            let center = f(0)?;
            for (o, w) in stencil.nodes().filter(|(o, _)| *o > 0) {
                sum += w.as_ratio() * (f(o)? - &center - &center + f(-o)?);
            }
        }
        StencilKind::OneSidedFirst | StencilKind::OneSidedNth => {
            for (o, w) in stencil.nodes() {
                sum += w.as_ratio() * f(o)?;
            }
        }
    }
    let h = exact(signal.h);
    let mut value = sum * stencil.prefactor().as_ratio() / num_traits::Pow::pow(&h, stencil.h_power());
    if direction == Direction::Backward && stencil.derivative_order() % 2 == 1 {
        value = -value;
    }
    Ok(value.to_f64().unwrap_or(f64::NAN))
}

/// `prefactor / h^h_power * sum_m w_m f[index + m]`, evaluated exactly and
/// rounded once.
pub fn apply_stencil_at(signal: &SampledSignal, stencil: &Stencil, index: usize) -> Result<f64> {
    evaluate(signal, stencil, index, Direction::Forward)
}

/// Derivative of `order` (1 or 2) at every index: `central(n)` where the
/// stencil fits, `one_sided_first(n)` forward or backward near the edges for
/// order 1, and `Skipped` otherwise.
pub fn differentiate(signal: &SampledSignal, n: u32, order: u32) -> Result<DerivativeResult> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let central = match order {
        1 => central_first(n)?,
        2 => central_second(n)?,
        _ => return Err(invalid(format!("derivative order must be 1 or 2, got {order}"))),
    };
    let reach = n as usize;
    if signal.len() < reach + 1 {
        return Err(invalid(format!("signal of {} samples is shorter than n + 1 = {}", signal.len(), reach + 1)));
    }
    let edge = one_sided_first(n)?;
    let len = signal.len();
    let results: Vec<(Option<f64>, Policy)> = (0..len)
        .into_par_iter()
        .map(|i| -> Result<(Option<f64>, Policy)> {
            let fits_right = i + reach < len;
            let fits_left = i >= reach;
            if fits_left && fits_right {
                Ok((Some(evaluate(signal, &central, i, Direction::Forward)?), Policy::CentralN(n)))
            } else if order == 2 {
                Ok((None, Policy::Skipped))
            } else if fits_right {
                Ok((Some(evaluate(signal, &edge, i, Direction::Forward)?), Policy::OneSidedForward(n)))
            } else if fits_left {
                Ok((Some(evaluate(signal, &edge, i, Direction::Backward)?), Policy::OneSidedBackward(n)))
            } else {
                Ok((None, Policy::Skipped))
            }
        })
        .collect::<Result<_>>()?;
    let (values, policy) = results.into_iter().unzip();
    Ok(DerivativeResult { values, order, policy })
}

/// `(1/2h) sum_{m=0..n-1} α_{2m+1} (f[index+2m+1] - f[index-2m-1])`.
pub fn differentiate_half_point(signal: &SampledSignal, n: u32, index: usize) -> Result<f64> {
    let stencil = half_point(n)?;
    evaluate(signal, &stencil, index, Direction::Forward)
}

/// Apply the first `terms` limit weights `α_m = (-1)^(m+1) 2/m²` to the
/// alternating samples `f_m = (-1)^m` with the central second-derivative
/// rule. Tends to `-π²/h²`, the second derivative of `cos(πx/h)` at 0.
pub fn alternating_second_derivative_check(terms: u64, h: f64) -> Result<f64> {
    if terms == 0 {
        return Err(invalid("need at least one term"));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid(format!("grid spacing must be positive, got {h}")));
    }
    let f = |m: i64| if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut sum = CompensatedSum::default();
    for m in 1..=terms {
        let alpha = central_second_limit(m)?.value();
        let m = m as i64;
        sum.add(alpha * (f(m) - 2.0 * f(0) + f(-m)));
    }
    Ok(sum.value() / (h * h))
}

/// Sampled test functions with analytic derivatives at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `sin(ωx + phase)`
    Sinusoid { omega: f64, phase: f64 },
    /// `sum c_k x^k`
    Polynomial(Vec<f64>),
    /// `(-1)^m g(mh)` with polynomial envelope `g`, i.e. `cos(πx/h) g(x)` on the grid.
    ModulatedAlternating(Vec<f64>),
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn derivative_coeffs(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

fn parity(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl TestFunction {
    /// Value at node `m`, i.e. at `x = m h`.
    pub fn value(&self, m: i64, h: f64) -> f64 {
        let x = m as f64 * h;
        match self {
            TestFunction::Sinusoid { omega, phase } => (omega * x + phase).sin(),
            TestFunction::Polynomial(c) => horner(c, x),
            TestFunction::ModulatedAlternating(g) => parity(m) * horner(g, x),
        }
    }

    /// Exact derivative of order 1 or 2 at node `m`.
    pub fn derivative(&self, m: i64, h: f64, order: u32) -> f64 {
        let x = m as f64 * h;
        match (self, order) {
            (TestFunction::Sinusoid { omega, phase }, 1) => omega * (omega * x + phase).cos(),
            (TestFunction::Sinusoid { omega, phase }, _) => -omega * omega * (omega * x + phase).sin(),
            (TestFunction::Polynomial(c), 1) => horner(&derivative_coeffs(c), x),
            (TestFunction::Polynomial(c), _) => horner(&derivative_coeffs(&derivative_coeffs(c)), x),
            // d/dx cos(πx/h) g(x) at a node: the sine factor vanishes.
            (TestFunction::ModulatedAlternating(g), 1) => parity(m) * horner(&derivative_coeffs(g), x),
            (TestFunction::ModulatedAlternating(g), _) => {
                let g2 = horner(&derivative_coeffs(&derivative_coeffs(g)), x);
                parity(m) * (g2 - (PI / h).powi(2) * horner(g, x))
            }
        }
    }

    /// The envelope `g` of a modulated signal.
    pub fn envelope(&self) -> Option<&[f64]> {
        match self {
            TestFunction::ModulatedAlternating(g) => Some(g),
            _ => None,
        }
    }

    /// Largest degree, or `None` for a sinusoid.
    pub fn degree(&self) -> Option<usize> {
        match self {
            TestFunction::Polynomial(c) | TestFunction::ModulatedAlternating(c) => Some(c.len().saturating_sub(1)),
            TestFunction::Sinusoid { .. } => None,
        }
    }
}

fn parse_coeffs(body: &str, spec: &str) -> Result<Vec<f64>> {
    let coeffs = body
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| invalid(format!("bad coefficient {c:?} in {spec:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(invalid(format!("non-finite coefficient in {spec:?}")));
    }
    Ok(coeffs)
}

impl FromStr for TestFunction {
    type Err = Error;

    /// `sin`, `sin:omega=W[,phase=P]`, `poly:c0,c1,...`, `altpoly:c0,c1,...`.
    fn from_str(spec: &str) -> Result<Self> {
        let (name, body) = spec.split_once(':').unwrap_or((spec, ""));
        match name.trim() {
            "sin" => {
                let (mut omega, mut phase) = (1.0, 0.0);
                for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    let (key, val) =
                        part.split_once('=').ok_or_else(|| invalid(format!("expected key=value in {spec:?}")))?;
                    let val: f64 = val.trim().parse().map_err(|_| invalid(format!("bad number in {spec:?}")))?;
                    match key.trim() {
                        "omega" => omega = val,
                        "phase" => phase = val,
                        other => return Err(invalid(format!("unknown sinusoid parameter {other:?}"))),
                    }
                }
                Ok(TestFunction::Sinusoid { omega, phase })
            }
            "poly" => Ok(TestFunction::Polynomial(parse_coeffs(body, spec)?)),
            "altpoly" => Ok(TestFunction::ModulatedAlternating(parse_coeffs(body, spec)?)),
            other => Err(invalid(format!("unknown test function {other:?}; expected sin, poly or altpoly"))),
        }
    }
}

/// Result of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub slope: ConvergenceSlope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub max_error: f64,
    /// Estimated round-off floor of the evaluation at this `h`.
    pub floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ConvergenceSlope {
    /// Least-squares slope of `log(error)` against `log(h)`.
    Fitted(f64),
    /// Errors sit at the round-off floor; the rule is exact for this function.
    Exact,
}

/// Max error of `central(n)` over the interior points of a window around
/// the origin, for each `h`, with the fitted log-log slope.
///
/// The window has `4n + 1` nodes centred on `x = 0`, so the `2n + 1`
/// interior nodes lie within `n h` of the origin.
pub fn convergence_study(func: &TestFunction, n: u32, order: u32, h_list: &[f64]) -> Result<ConvergenceReport> {
    if h_list.len() < 3 {
        return Err(invalid("convergence study needs at least three step sizes"));
    }
    if h_list.iter().any(|h| !(h.is_finite() && *h > 0.0)) || h_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("step sizes must be positive and strictly decreasing"));
    }
    let central = match order {
        1 => central_first(n)?,
        2 => central_second(n)?,
        _ => return Err(invalid(format!("derivative order must be 1 or 2, got {order}"))),
    };
    let weight_mass: f64 = central.effective_weights().iter().map(|w| w.to_f64().abs()).sum();
    let half = 2 * n as usize;
    let mut rows = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let signal = SampledSignal::from_function(func, h, 2 * half + 1, half)?;
        let result = differentiate(&signal, n, order)?;
        let mut max_error = 0.0f64;
        for (i, (v, p)) in result.values.iter().zip(&result.policy).enumerate() {
            if let (Some(v), Policy::CentralN(_)) = (v, p) {
                let m = i as i64 - half as i64;
                max_error = max_error.max((v - func.derivative(m, h, order)).abs());
            }
        }
        let scale = signal.samples().iter().fold(0.0f64, |acc, f| acc.max(f.abs()));
        let floor = 8.0 * f64::EPSILON * weight_mass * scale / h.powi(order as i32);
        rows.push(ConvergenceRow { h, max_error, floor });
    }
    let fit: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.max_error > r.floor).map(|r| (r.h.ln(), r.max_error.ln())).collect();
    let slope =
        if fit.len() < 2 { ConvergenceSlope::Exact } else { ConvergenceSlope::Fitted(least_squares_slope(&fit)) };
    Ok(ConvergenceReport { rows, slope })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
