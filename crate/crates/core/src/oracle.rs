//! Brute-force verifiers for the weight families.
//!
//! Nothing in here shares a code path with [`crate::weights`]: moment systems
//! are solved on the full (unreduced) node sets by fraction-free integer
//! elimination, determinants are computed directly and compared with their
//! closed forms, and exactness is checked by applying a stencil to monomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rational::{factorial, RationalWeight};
use crate::weights::{Stencil, StencilKind};

/// The square system `sum_j a_j offset_j^k = δ_lk`, `k = 0..degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSystem {
    offsets: Vec<i64>,
    degree: u32,
    target_order: u32,
}

impl MomentSystem {
    /// `offsets` must hold exactly `degree + 1` nodes and `target_order <= degree`.
    pub fn new(offsets: Vec<i64>, target_order: u32) -> Result<Self> {
        if offsets.is_empty() {
            return Err(invalid("moment system needs at least one node"));
        }
        let degree = (offsets.len() - 1) as u32;
        if target_order > degree {
            return Err(invalid(format!(
                "target order {target_order} exceeds degree {degree} of a {}-node system",
                offsets.len()
            )));
        }
        Ok(MomentSystem { offsets, degree, target_order })
    }

    /// The one-sided system on nodes `0..=n`.
    pub fn one_sided(n: u32, target_order: u32) -> Result<Self> {
        MomentSystem::new((0..=i64::from(n)).collect(), target_order)
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn target_order(&self) -> u32 {
        self.target_order
    }

    fn matrix(&self) -> Vec<Vec<BigInt>> {
        (0..=self.degree).map(|k| self.offsets.iter().map(|&o| BigInt::from(o).pow(k)).collect()).collect()
    }
}

/// `x^k` with `0^0 = 1`.
fn ipow(x: i64, k: u32) -> BigInt {
    BigInt::from(x).pow(k)
}

/// Bareiss fraction-free elimination in place. Returns the number of row
/// swaps, or `None` if the leading square block is singular.
fn bareiss(m: &mut [Vec<BigInt>]) -> Option<usize> {
    let size = m.len();
    let mut swaps = 0;
    let mut prev = BigInt::one();
    for k in 0..size {
        if m[k][k].is_zero() {
            let row = (k + 1..size).find(|&i| !m[i][k].is_zero())?;
            m.swap(k, row);
            swaps += 1;
        }
        for i in k + 1..size {
            for j in k + 1..m[i].len() {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Some(swaps)
}

fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    if m.is_empty() {
        return BigInt::one();
    }
    match bareiss(&mut m) {
        Some(swaps) => {
            let d = m[m.len() - 1][m.len() - 1].clone();
            if swaps % 2 == 1 {
                -d
            } else {
                d
            }
        }
        None => BigInt::zero(),
    }
}

/// Solve a moment system exactly.
pub fn solve_moment_system(sys: &MomentSystem) -> Result<Vec<RationalWeight>> {
    let mut sorted = sys.offsets.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::SingularSystem(format!("node {} is repeated", w[0])));
    }
    let size = sys.offsets.len();
    let mut m = sys.matrix();
    for (k, row) in m.iter_mut().enumerate() {
        row.push(if k as u32 == sys.target_order { BigInt::one() } else { BigInt::zero() });
    }
    bareiss(&mut m).ok_or_else(|| Error::SingularSystem("zero pivot".into()))?;

    let mut x = vec![BigRational::zero(); size];
    for i in (0..size).rev() {
        let mut acc = BigRational::from_integer(m[i][size].clone());
        for j in i + 1..size {
            acc -= BigRational::from_integer(m[i][j].clone()) * &x[j];
        }
        if m[i][i].is_zero() {
            return Err(Error::SingularSystem("zero pivot".into()));
        }
        x[i] = acc / BigRational::from_integer(m[i][i].clone());
    }
    Ok(x.into_iter().map(RationalWeight::from).collect())
}

/// `Δ₀(n)`: determinant of `V[k][j] = j^k`, `k, j = 0..n`, by elimination.
pub fn vandermonde_det(n: u32) -> BigInt {
    let sys = MomentSystem::one_sided(n, 0).expect("target 0 is always in range");
    determinant(sys.matrix())
}

/// `n! * prod_{1 <= i < j <= n} (j - i)`.
pub fn vandermonde_closed_form(n: u32) -> BigInt {
    let n = i64::from(n);
    let mut acc = factorial(n as u64);
    for j in 1..=n {
        for i in 1..j {
            acc *= j - i;
        }
    }
    acc
}

/// `Δ_m^(l)(n)`: the one-sided system matrix with column `m` replaced by the
/// unit vector `e_l`, by elimination.
pub fn cramer_numerator(m: u32, l: u32, n: u32) -> Result<BigInt> {
    if m > n || l > n {
        return Err(invalid(format!("need m, l <= n, got m={m}, l={l}, n={n}")));
    }
    let sys = MomentSystem::one_sided(n, l)?;
    let mut mat = sys.matrix();
    for (k, row) in mat.iter_mut().enumerate() {
        row[m as usize] = if k as u32 == l { BigInt::one() } else { BigInt::zero() };
    }
    Ok(determinant(mat))
}

/// `Δ_m^(1)(n) = (-1)^(m+1) (n!/m)² prod_{1<=i<j<=n, i,j != m} (j - i)`.
pub fn delta_m1_closed_form(m: u32, n: u32) -> Result<BigInt> {
    if m == 0 || m > n {
        return Err(invalid(format!("need 1 <= m <= n, got m={m}, n={n}")));
    }
    let base = factorial(u64::from(n)) / m;
    let mut acc = &base * &base;
    let (m, n) = (i64::from(m), i64::from(n));
    for j in 1..=n {
        for i in 1..j {
            if i != m && j != m {
                acc *= j - i;
            }
        }
    }
    Ok(if m % 2 == 1 { acc } else { -acc })
}

/// Outcome of applying a stencil to the monomials `x^0 .. x^max_degree`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactnessReport {
    pub stencil: String,
    pub kind: StencilKind,
    pub n: u32,
    /// Largest degree below the first nonzero residual; `-1` if degree 0 fails.
    pub max_exact_degree: i64,
    pub first_failing_degree: Option<u32>,
    /// Residual at each degree with `h` factored out: the stencil value on
    /// `x^k` minus the exact derivative at 0, divided by `h^(k - order)`.
    pub residuals: Vec<RationalWeight>,
}

impl ExactnessReport {
    pub fn is_exact_through(&self, degree: u32) -> bool {
        self.max_exact_degree >= i64::from(degree)
    }
}

/// Apply `stencil` to samples of `x^k` for every `k <= max_degree`.
///
/// With `f_m = (m h)^k` the rule gives `prefactor * h^(k - order) * sum w_m m^k`,
/// so the `h`-free residual is `prefactor * sum w_m m^k - order! [k == order]`.
/// Intended for `max_degree <= 2n + 4`; larger values only cost time.
pub fn exactness_check(stencil: &Stencil, max_degree: u32) -> ExactnessReport {
    let order = stencil.derivative_order();
    let order_factorial = RationalWeight::from(factorial(u64::from(order)));
    let residuals: Vec<RationalWeight> = (0..=max_degree)
        .map(|k| {
            let moment: RationalWeight = stencil.nodes().map(|(o, w)| w * &RationalWeight::from(ipow(o, k))).sum();
            let value = stencil.prefactor() * &moment;
            if k == order {
                value - order_factorial.clone()
            } else {
                value
            }
        })
        .collect();
    let first_failing_degree = residuals.iter().position(|r| !r.is_zero()).map(|k| k as u32);
    let max_exact_degree = match first_failing_degree {
        Some(k) => i64::from(k) - 1,
        None => i64::from(max_degree),
    };
    ExactnessReport {
        stencil: stencil.to_string(),
        kind: stencil.kind(),
        n: stencil.n(),
        max_exact_degree,
        first_failing_degree,
        residuals,
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        iter.into_iter().for_each(|x| acc.add(x));
        acc
    }
}

/// A truncated series value with an error bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub bound: f64,
}

/// `sum_{m=1..count} term(m)`, reporting `|term(count + 1)|` as the bound.
///
/// The bound is the alternating-series remainder estimate; it is rigorous
/// when the terms alternate in sign with decreasing magnitude.
pub fn alternating_series_sum(term: impl Fn(u64) -> f64, count: u64) -> Result<SeriesSum> {
    if count == 0 {
        return Err(invalid("series needs at least one term"));
    }
    let acc: CompensatedSum = (1..=count).map(&term).collect();
    Ok(SeriesSum { value: acc.value(), bound: term(count + 1).abs() })
}

/// Plain moment `sum w_m m^k` over a stencil's nodes, `0^0 = 1`.
pub fn moment(stencil: &Stencil, k: u32) -> RationalWeight {
    stencil.nodes().map(|(o, w)| w * &RationalWeight::from(ipow(o, k))).sum()
}

/// The stencil's nodes and weights recovered by solving the full moment
/// system on its node set: the unique rule on those nodes that is exact
/// through degree `len - 1`. Structural zeros are dropped, as in [`Stencil`].
pub fn weights_by_solver(stencil: &Stencil) -> Result<Vec<(i64, RationalWeight)>> {
    let offsets = stencil.kind().offsets(stencil.n());
    let order = stencil.derivative_order();
    let sys = MomentSystem::new(offsets.clone(), order)?;
    let scale = RationalWeight::from(factorial(u64::from(order))) / stencil.prefactor().clone();
    let solved = solve_moment_system(&sys)?;
    Ok(offsets.into_iter().zip(solved).map(|(o, a)| (o, a * scale.clone())).filter(|(_, w)| !w.is_zero()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{central_first, half_point, one_sided_first, one_sided_nth};

    fn r(p: i64, q: i64) -> RationalWeight {
        RationalWeight::new(p, q)
    }

    #[test]
    fn solver_small_systems() {
        let sys = MomentSystem::new(vec![0, 1], 1).unwrap();
        assert_eq!(solve_moment_system(&sys).unwrap(), vec![r(-1, 1), r(1, 1)]);
        let sys = MomentSystem::new(vec![0, 1, 2], 1).unwrap();
        assert_eq!(solve_moment_system(&sys).unwrap(), vec![r(-3, 2), r(2, 1), r(-1, 2)]);
        let sys = MomentSystem::new(vec![0, 1, 2], 2).unwrap();
        assert_eq!(solve_moment_system(&sys).unwrap(), vec![r(1, 2), r(-1, 1), r(1, 2)]);
    }

    #[test]
    fn solver_rejects_repeated_nodes() {
        let sys = MomentSystem::new(vec![0, 1, 1], 1).unwrap();
        assert!(matches!(solve_moment_system(&sys), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn system_shape_is_checked() {
        assert!(MomentSystem::new(vec![], 0).is_err());
        assert!(MomentSystem::new(vec![0, 1], 2).is_err());
        assert_eq!(MomentSystem::one_sided(3, 1).unwrap().degree(), 3);
    }

    #[test]
    fn solver_handles_unsorted_and_negative_nodes() {
        let sys = MomentSystem::new(vec![1, -1], 1).unwrap();
        assert_eq!(solve_moment_system(&sys).unwrap(), vec![r(1, 2), r(-1, 2)]);
        let sys = MomentSystem::new(vec![2, 0, -1], 0).unwrap();
        let sol = solve_moment_system(&sys).unwrap();
        // Interpolation weights for f(0) read off as the coefficient of f at node 0.
        assert_eq!(sol, vec![r(0, 1), r(1, 1), r(0, 1)]);
    }

    #[test]
    fn determinants() {
        assert_eq!(vandermonde_det(1), BigInt::from(1));
        assert_eq!(vandermonde_det(2), BigInt::from(2));
        assert_eq!(vandermonde_det(3), BigInt::from(12));
        assert_eq!(vandermonde_closed_form(3), BigInt::from(12));
        assert_eq!(
            determinant(vec![vec![BigInt::from(0), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(0)]]),
            BigInt::from(-1)
        );
    }

    #[test]
    fn delta_m1_examples() {
        assert_eq!(delta_m1_closed_form(1, 1).unwrap(), BigInt::from(1));
        let ratio = |m, n| RationalWeight::new(delta_m1_closed_form(m, n).unwrap(), vandermonde_det(n));
        assert_eq!(ratio(1, 1), r(1, 1));
        assert_eq!(ratio(1, 2), r(2, 1));
        assert_eq!(ratio(2, 3), r(-3, 2));
        assert!(delta_m1_closed_form(0, 3).is_err());
        assert!(delta_m1_closed_form(4, 3).is_err());
    }

    #[test]
    fn cramer_numerator_matches_closed_form() {
        for n in 1..=7 {
            for m in 1..=n {
                assert_eq!(cramer_numerator(m, 1, n).unwrap(), delta_m1_closed_form(m, n).unwrap());
            }
        }
    }

    #[test]
    fn exactness_examples() {
        let rep = exactness_check(&central_first(1).unwrap(), 6);
        assert_eq!(rep.max_exact_degree, 2);
        assert_eq!(rep.first_failing_degree, Some(3));
        assert_eq!(rep.residuals[3], r(1, 1));

        for n in 1..=8 {
            let rep = exactness_check(&one_sided_first(n).unwrap(), 2 * n + 4);
            assert_eq!(rep.max_exact_degree, i64::from(n));
        }
        let rep = exactness_check(&half_point(2).unwrap(), 8);
        assert_eq!(rep.max_exact_degree, 4);
        assert_eq!(rep.first_failing_degree, Some(5));

        let rep = exactness_check(&one_sided_nth(2).unwrap(), 2);
        assert_eq!(rep.first_failing_degree, None);
        assert_eq!(rep.max_exact_degree, 2);
    }

    #[test]
    fn series_examples() {
        let s = alternating_series_sum(|m| if m % 2 == 1 { 2.0 } else { -2.0 } / (m * m) as f64, 1_000_000).unwrap();
        let target = std::f64::consts::PI.powi(2) / 6.0;
        assert!((s.value - target).abs() <= 2e-12, "{}", (s.value - target).abs());
        assert_eq!(s.bound, 2.0 / (1_000_001f64 * 1_000_001f64));

        let s = alternating_series_sum(|m| 8.0 / ((2 * m - 1) * (2 * m - 1)) as f64, 100_000).unwrap();
        assert!((s.value - std::f64::consts::PI.powi(2)).abs() <= 1e-4);

        let s = alternating_series_sum(|m| 1.0 / m as f64, 1).unwrap();
        assert_eq!((s.value, s.bound), (1.0, 0.5));

        assert!(alternating_series_sum(|_| 1.0, 0).is_err());
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let acc: CompensatedSum = [1e16, 1.0, -1e16].into_iter().collect();
        assert_eq!(acc.value(), 1.0);
    }
}
