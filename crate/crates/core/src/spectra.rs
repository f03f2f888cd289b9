//! Discrete spectra of weight sequences and their infinite-length limits.
//!
//! A weight sequence `a_m`, `m >= 0`, is embedded into a length-`N` buffer
//! and transformed as `b(r) = sum_j x_j exp(-2πi j r / N)`. Figures plot the
//! parts of the conjugate `b*(r)`, which [`FilterSpectrum::im_conj`] and
//! [`FilterSpectrum::re_conj`] expose directly.

use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::oracle::CompensatedSum;
use crate::rational::RationalWeight;
use crate::weights::{central_first_limit, central_second_limit, half_point_limit, Stencil, StencilKind};

/// How a one-sided sequence `a_m` is laid out in the length-`N` buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingMode {
    /// `a_m` at index `m` only.
    HalfSequence,
    /// `a_m` at `m` and `-a_m` at `N - m`.
    FullAntisymmetric,
    /// `a_m` at `m` and `a_m` at `N - m`; `a_0` once.
    FullSymmetric,
}

/// The three infinite-length sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitFamily {
    /// `(-1)^(m+1) 2/m`
    CentralFirst,
    /// `(-1)^(m+1) 2/m²`
    CentralSecond,
    /// `(-1)^m 4/(π (2m+1)²)` at odd index `2m+1`
    HalfPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SequenceSource {
    Stencil { kind: StencilKind, n: u32 },
    Limit { family: LimitFamily, terms: u64 },
    Custom,
}

impl fmt::Display for SequenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSource::Stencil { kind, n } => write!(f, "{kind}(n={n})"),
            SequenceSource::Limit { family, terms } => write!(f, "{family:?}-limit(M={terms})"),
            SequenceSource::Custom => f.write_str("custom"),
        }
    }
}

/// A sparse sequence `a_m`, `m >= 0`, ready for embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterTaps {
    taps: Vec<(u64, f64)>,
    /// Exact tap values when every tap is rational.
    exact: Option<Vec<RationalWeight>>,
    source: SequenceSource,
}

impl FilterTaps {
    /// The stencil's filter sequence (see [`Stencil::filter_sequence`]).
    pub fn from_stencil(stencil: &Stencil) -> Self {
        let seq = stencil.filter_sequence();
        FilterTaps {
            taps: seq.iter().map(|(m, w)| (*m, w.to_f64())).collect(),
            exact: Some(seq.into_iter().map(|(_, w)| w).collect()),
            source: SequenceSource::Stencil { kind: stencil.kind(), n: stencil.n() },
        }
    }

    /// The first `terms` nonzero entries of an infinite-length sequence.
    pub fn limit(family: LimitFamily, terms: u64) -> Result<Self> {
        if terms == 0 {
            return Err(invalid("limit sequence needs at least one term"));
        }
        let weights: Vec<_> = match family {
            LimitFamily::CentralFirst => (1..=terms).map(central_first_limit).collect::<Result<_>>()?,
            LimitFamily::CentralSecond => (1..=terms).map(central_second_limit).collect::<Result<_>>()?,
            LimitFamily::HalfPoint => (0..terms).map(half_point_limit).collect(),
        };
        let exact =
            (family != LimitFamily::HalfPoint).then(|| weights.iter().map(|w| w.rational_part.clone()).collect());
        Ok(FilterTaps {
            taps: weights.iter().map(|w| (w.index, w.value())).collect(),
            exact,
            source: SequenceSource::Limit { family, terms },
        })
    }

    /// Arbitrary float taps; indices must be distinct.
    pub fn from_values(mut taps: Vec<(u64, f64)>) -> Result<Self> {
        taps.sort_by_key(|(m, _)| *m);
        if taps.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("tap indices must be distinct"));
        }
        Ok(FilterTaps { taps, exact: None, source: SequenceSource::Custom })
    }

    pub fn taps(&self) -> &[(u64, f64)] {
        &self.taps
    }

    pub fn source(&self) -> &SequenceSource {
        &self.source
    }

    pub fn abs_sum(&self) -> f64 {
        self.taps.iter().map(|(_, a)| a.abs()).sum()
    }
}

impl From<&Stencil> for FilterTaps {
    fn from(stencil: &Stencil) -> Self {
        FilterTaps::from_stencil(stencil)
    }
}

/// `exp(2πi k/N)` for `k = 0..N`, with the exact values at quarter turns.
struct Twiddles {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Twiddles {
    fn new(len: usize) -> Self {
        // Angles are measured in units of π/(2N); a quarter turn is N units.
        let unit = PI / (2.0 * len as f64);
        let mut cos = Vec::with_capacity(len);
        let mut sin = Vec::with_capacity(len);
        for k in 0..len {
            let (k1, sin_sign) = if 2 * k <= len { (k, 1.0) } else { (len - k, -1.0) };
            let a = 4 * k1;
            let (a, cos_sign) = if a <= len { (a, 1.0) } else { (2 * len - a, -1.0) };
            let (c, s) = if 2 * a <= len {
                let t = a as f64 * unit;
                (t.cos(), t.sin())
            } else {
                let t = (len - a) as f64 * unit;
                (t.sin(), t.cos())
            };
            cos.push(cos_sign * c);
            sin.push(sin_sign * s);
        }
        Twiddles { cos, sin }
    }

    /// `exp(-2πi k/N)`.
    fn forward(&self, k: usize) -> Complex64 {
        Complex64::new(self.cos[k], -self.sin[k])
    }
}

/// Length-`N` DFT of an embedded weight sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpectrum {
    pub len: usize,
    pub mode: EmbeddingMode,
    pub values: Vec<Complex64>,
    pub source: SequenceSource,
}

impl FilterSpectrum {
    pub fn b(&self, r: usize) -> Complex64 {
        self.values[r]
    }

    /// `Im[b*(r)]`.
    pub fn im_conj(&self, r: usize) -> f64 {
        -self.values[r].im
    }

    /// `Re[b*(r)]`.
    pub fn re_conj(&self, r: usize) -> f64 {
        self.values[r].re
    }

    pub fn part(&self, part: SpectrumPart, r: usize) -> f64 {
        match part {
            SpectrumPart::ImConj => self.im_conj(r),
            SpectrumPart::ReConj => self.re_conj(r),
        }
    }

    /// `ω_r = 2πr/(N h)`; the Nyquist bin `r = N/2` maps to `π/h`.
    pub fn omega(&self, r: usize, h: f64) -> f64 {
        bin_omega(r, self.len, h)
    }
}

/// `ω_r = 2πr/(N h)`, with the Nyquist bin `r = N/2` mapped to exactly `π/h`.
pub fn bin_omega(r: usize, len: usize, h: f64) -> f64 {
    if 2 * r == len {
        PI / h
    } else {
        2.0 * PI * r as f64 / (len as f64 * h)
    }
}

fn embed<T: Clone>(
    values: impl Iterator<Item = (u64, T)>,
    len: usize,
    mode: EmbeddingMode,
    negate: impl Fn(&T) -> T,
    is_zero: impl Fn(&T) -> bool,
) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (m, a) in values {
        if is_zero(&a) {
            continue;
        }
        if 2 * m >= len as u64 {
            return Err(Error::EmbeddingOverflow { offset: m as i64, len });
        }
        let m = m as usize;
        match mode {
            EmbeddingMode::HalfSequence => out.push((m, a)),
            EmbeddingMode::FullAntisymmetric => {
                if m == 0 {
                    return Err(invalid("antisymmetric embedding needs a zero tap at index 0"));
                }
                out.push((len - m, negate(&a)));
                out.push((m, a));
            }
            EmbeddingMode::FullSymmetric => {
                if m != 0 {
                    out.push((len - m, a.clone()));
                }
                out.push((m, a));
            }
        }
    }
    Ok(out)
}

/// Direct sparse DFT of `taps` embedded with `mode` in a buffer of length `len`.
///
/// Costs `O(nonzeros * N)`. Bins `0` and `N/2` are evaluated exactly when
/// the taps are rational.
pub fn dft_spectrum(taps: &FilterTaps, len: usize, mode: EmbeddingMode) -> Result<FilterSpectrum> {
    if len < 2 || !len.is_multiple_of(2) {
        return Err(invalid(format!("DFT length must be even and at least 2, got {len}")));
    }
    let embedded = embed(taps.taps.iter().copied(), len, mode, |a| -a, |a| *a == 0.0)?;
    let twiddles = Twiddles::new(len);
    let mut values: Vec<Complex64> = (0..len)
        .into_par_iter()
        .map(|r| {
            let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
            for &(j, a) in &embedded {
                let w = twiddles.forward((j * r) % len);
                re.add(a * w.re);
                im.add(a * w.im);
            }
            Complex64::new(re.value(), im.value())
        })
        .collect();

    if let Some(exact) = &taps.exact {
        let indices = taps.taps.iter().map(|(m, _)| *m);
        let embedded = embed(indices.zip(exact.iter().cloned()), len, mode, |a| -a, |a| a.is_zero())?;
        let dc: RationalWeight = embedded.iter().map(|(_, a)| a).sum();
        let nyquist: RationalWeight = embedded.iter().map(|(j, a)| if j % 2 == 0 { a.clone() } else { -a }).sum();
        values[0] = Complex64::new(dc.to_f64(), 0.0);
        values[len / 2] = Complex64::new(nyquist.to_f64(), 0.0);
    }

    Ok(FilterSpectrum { len, mode, values, source: taps.source.clone() })
}

/// Which part of `b*(r)` is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumPart {
    ImConj,
    ReConj,
}

/// Analytic limit spectra and the comparison sequences drawn next to the
/// finite spectra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ReferenceCurve {
    /// `β₁(ω) = -2iωh²`, `0 <= ω < π/h`.
    Beta1Inf { h: f64 },
    /// `β₂(ω) = -ω²h³ + π²h/3`, `0 <= ω <= π/h`.
    Beta2Inf { h: f64 },
    /// `β_{1/2}(ω) = -2ih·ωh` up to `π/2h`, then `-2ih·(π - ωh)`.
    BetaHalfInf { h: f64 },
    /// Triangle `2πr/N` up to `N/4`, then `π - 2πr/N`.
    YHalf { len: usize },
    /// `I(r) = 2πr/N`.
    LinearI { len: usize },
    /// `R(r) = 0`.
    ZeroR,
}

/// Argument of a reference curve: a frequency for the `β` curves, a bin
/// index for the others.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Abscissa {
    Omega(f64),
    Index(usize),
}

// ω = π/h computed in floating point may land an ulp either side.
const EDGE_SLACK: f64 = 1e-12;

fn check_omega(omega: f64, h: f64, closed: bool) -> Result<f64> {
    let x = omega * h;
    let ok = x >= 0.0 && if closed { x <= PI * (1.0 + EDGE_SLACK) } else { x < PI * (1.0 - EDGE_SLACK) };
    if !(ok && x.is_finite()) {
        let interval = if closed { "[0, π/h]" } else { "[0, π/h)" };
        return Err(Error::Domain(format!("ω = {omega} with h = {h} is outside {interval}")));
    }
    Ok(x.min(PI))
}

fn check_index(r: usize, len: usize) -> Result<()> {
    if 2 * r > len {
        return Err(Error::Domain(format!("index {r} is beyond N/2 = {}", len / 2)));
    }
    Ok(())
}

impl ReferenceCurve {
    pub fn h(&self) -> Option<f64> {
        match *self {
            ReferenceCurve::Beta1Inf { h } | ReferenceCurve::Beta2Inf { h } | ReferenceCurve::BetaHalfInf { h } => {
                Some(h)
            }
            _ => None,
        }
    }

    /// Value of this curve against which `part` of `b*(r)` of a length-`len`
    /// spectrum is compared. The `β` curves are conjugated and divided by `h`
    /// so they match an unscaled DFT of the same sequence.
    pub fn compare_at(&self, r: usize, len: usize, part: SpectrumPart) -> Result<f64> {
        match self.h() {
            Some(h) => {
                let beta = reference_value(self, Abscissa::Omega(bin_omega(r, len, h)))?.conj() / h;
                Ok(match part {
                    SpectrumPart::ImConj => beta.im,
                    SpectrumPart::ReConj => beta.re,
                })
            }
            None => Ok(reference_value(self, Abscissa::Index(r))?.re),
        }
    }
}

/// Evaluate a reference curve.
pub fn reference_value(curve: &ReferenceCurve, at: Abscissa) -> Result<Complex64> {
    let mismatch = || Error::Domain(format!("{curve:?} cannot be evaluated at {at:?}"));
    match (*curve, at) {
        (ReferenceCurve::Beta1Inf { h }, Abscissa::Omega(omega)) => {
            check_omega(omega, h, false)?;
            Ok(Complex64::new(0.0, -2.0 * omega * h * h))
        }
        (ReferenceCurve::Beta2Inf { h }, Abscissa::Omega(omega)) => {
            let x = check_omega(omega, h, true)?;
            Ok(Complex64::new(h * (PI * PI / 3.0 - x * x), 0.0))
        }
        (ReferenceCurve::BetaHalfInf { h }, Abscissa::Omega(omega)) => {
            let x = check_omega(omega, h, true)?;
            Ok(Complex64::new(0.0, -2.0 * h * triangle(x)))
        }
        (ReferenceCurve::YHalf { len }, Abscissa::Index(r)) => {
            check_index(r, len)?;
            if 4 * r <= len {
                Ok(Complex64::new(2.0 * PI * r as f64 / len as f64, 0.0))
            } else {
                Ok(Complex64::new(PI - 2.0 * PI * r as f64 / len as f64, 0.0))
            }
        }
        (ReferenceCurve::LinearI { len }, Abscissa::Index(r)) => {
            check_index(r, len)?;
            Ok(Complex64::new(2.0 * PI * r as f64 / len as f64, 0.0))
        }
        (ReferenceCurve::ZeroR, Abscissa::Index(_)) => Ok(Complex64::zero()),
        _ => Err(mismatch()),
    }
}

fn triangle(x: f64) -> f64 {
    if x <= PI / 2.0 {
        x
    } else {
        PI - x
    }
}

/// The analytic limit spectra that have a defining series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitCurve {
    Beta1Inf,
    Beta2Inf,
    BetaHalfInf,
}

impl LimitCurve {
    pub fn reference(self, h: f64) -> ReferenceCurve {
        match self {
            LimitCurve::Beta1Inf => ReferenceCurve::Beta1Inf { h },
            LimitCurve::Beta2Inf => ReferenceCurve::Beta2Inf { h },
            LimitCurve::BetaHalfInf => ReferenceCurve::BetaHalfInf { h },
        }
    }
}

/// A truncated limit-spectrum value with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedValue {
    pub value: Complex64,
    pub bound: f64,
}

/// Series coefficient and frequency multiplier of term `j` (1-based).
fn series_term(family: LimitCurve, j: u64) -> (f64, u64) {
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    match family {
        LimitCurve::Beta1Inf => (sign / j as f64, j),
        LimitCurve::Beta2Inf => (sign / (j as f64 * j as f64), j),
        LimitCurve::BetaHalfInf => {
            let node = 2 * j - 1;
            (sign / (node as f64 * node as f64), node)
        }
    }
}

/// Scale that turns the plain trigonometric sum into `β(ω)`.
fn series_scale(family: LimitCurve, h: f64) -> Complex64 {
    match family {
        // β₁ = -4ih sum (-1)^(m-1) sin(mωh)/m
        LimitCurve::Beta1Inf => Complex64::new(0.0, -4.0 * h),
        // β₂ = 4h sum (-1)^(m+1) cos(mωh)/m²
        LimitCurve::Beta2Inf => Complex64::new(4.0 * h, 0.0),
        // β_{1/2} = -2ih (4/π) sum (-1)^m sin((2m+1)ωh)/(2m+1)²
        LimitCurve::BetaHalfInf => Complex64::new(0.0, -8.0 * h / PI),
    }
}

/// Bound on the tail beyond `terms` at `x = ωh`, from Abel summation against
/// the bounded partial sums of the alternating trigonometric factor, and for
/// the absolutely convergent series also the plain majorant.
fn tail_bound(family: LimitCurve, x: f64, h: f64, terms: u64) -> f64 {
    let next = (terms + 1) as f64;
    let scale = series_scale(family, h).norm();
    match family {
        LimitCurve::Beta1Inf => {
            if x == 0.0 || x >= PI {
                0.0
            } else {
                scale / (next * (x / 2.0).cos())
            }
        }
        LimitCurve::Beta2Inf => {
            let abel = 1.0 / (next * next * (x / 2.0).cos());
            scale * abel.min(1.0 / terms as f64)
        }
        LimitCurve::BetaHalfInf => {
            if x == 0.0 || x >= PI {
                return 0.0;
            }
            let node = (2 * terms + 1) as f64;
            let abel = 1.0 / (node * node * x.cos().abs());
            let majorant = 1.0 / (2.0 * (2 * terms - 1) as f64);
            scale * abel.min(majorant)
        }
    }
}

fn trig(family: LimitCurve, angle: f64) -> f64 {
    match family {
        LimitCurve::Beta2Inf => angle.cos(),
        _ => angle.sin(),
    }
}

/// Partial sum of the defining series of a limit spectrum at `ω`, using the
/// first `terms` nonzero terms.
pub fn truncated_limit_spectrum(family: LimitCurve, omega: f64, h: f64, terms: u64) -> Result<TruncatedValue> {
    if terms == 0 {
        return Err(invalid("series needs at least one term"));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid(format!("grid spacing must be positive, got {h}")));
    }
    let x = check_omega(omega, h, true)?;
    let sum: CompensatedSum = (1..=terms)
        .map(|j| {
            let (c, k) = series_term(family, j);
            c * trig(family, k as f64 * x)
        })
        .collect();
    Ok(TruncatedValue { value: series_scale(family, h) * sum.value(), bound: tail_bound(family, x, h, terms) })
}

/// [`truncated_limit_spectrum`] on the whole grid `ω_r = 2πr/(Nh)`,
/// `r = 0..=N/2`.
///
/// Coefficients are first folded modulo `N` (the trigonometric factor at
/// `ω_r` depends on the frequency multiplier only modulo `N`), so the cost is
/// `O(M + N²)` rather than `O(M N)`.
pub fn truncated_limit_spectrum_grid(
    family: LimitCurve,
    len: usize,
    h: f64,
    terms: u64,
) -> Result<Vec<TruncatedValue>> {
    if terms == 0 {
        return Err(invalid("series needs at least one term"));
    }
    if len < 2 || !len.is_multiple_of(2) {
        return Err(invalid(format!("grid length must be even and at least 2, got {len}")));
    }
    let mut folded = vec![CompensatedSum::default(); len];
    for j in 1..=terms {
        let (c, k) = series_term(family, j);
        folded[(k % len as u64) as usize].add(c);
    }
    let folded: Vec<(usize, f64)> =
        folded.iter().enumerate().map(|(k, s)| (k, s.value())).filter(|(_, c)| *c != 0.0).collect();
    let twiddles = Twiddles::new(len);
    let scale = series_scale(family, h);
    Ok((0..=len / 2)
        .into_par_iter()
        .map(|r| {
            let sum: CompensatedSum = folded
                .iter()
                .map(|&(k, c)| {
                    let idx = (k * r) % len;
                    c * match family {
                        LimitCurve::Beta2Inf => twiddles.cos[idx],
                        _ => twiddles.sin[idx],
                    }
                })
                .collect();
            let x = bin_omega(r, len, h) * h;
            TruncatedValue { value: scale * sum.value(), bound: tail_bound(family, x.min(PI), h, terms) }
        })
        .collect())
}

/// Deviation of one part of a spectrum from a reference curve over a range
/// of bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub range: (usize, usize),
    pub max_abs: f64,
    /// `max_abs` over the normalizer.
    pub max_rel: f64,
    pub argmax: usize,
    /// Max `|curve|` over `[0, N/2]`; for an identically zero curve, the max
    /// of the compared part itself over `[0, N/2]`.
    pub normalizer: f64,
}

/// Compare `part` of `b*(r)` with `curve` on `range`, which must lie in `[0, N/2]`.
pub fn deviation(
    spectrum: &FilterSpectrum,
    curve: &ReferenceCurve,
    part: SpectrumPart,
    range: RangeInclusive<usize>,
) -> Result<DeviationReport> {
    let (lo, hi) = (*range.start(), *range.end());
    if range.is_empty() {
        return Err(invalid("deviation range is empty"));
    }
    let half = spectrum.len / 2;
    if hi > half {
        return Err(invalid(format!("deviation range ends at {hi}, beyond N/2 = {half}")));
    }
    let mut max_abs = 0.0f64;
    let mut argmax = lo;
    for r in range {
        let d = (spectrum.part(part, r) - curve.compare_at(r, spectrum.len, part)?).abs();
        if d > max_abs {
            max_abs = d;
            argmax = r;
        }
    }
    let curve_max =
        (0..=half).filter_map(|r| curve.compare_at(r, spectrum.len, part).ok()).fold(0.0f64, |acc, v| acc.max(v.abs()));
    let normalizer = if curve_max > 0.0 {
        curve_max
    } else {
        (0..=half).map(|r| spectrum.part(part, r).abs()).fold(0.0f64, f64::max)
    };
    let max_rel = if normalizer > 0.0 { max_abs / normalizer } else { 0.0 };
    Ok(DeviationReport { range: (lo, hi), max_abs, max_rel, argmax, normalizer })
}

/// Spectrum `c(ω_r) = h sum_m f_m exp(-iω_r m h)` of `N` periodic samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpectrum {
    pub h: f64,
    pub values: Vec<Complex64>,
}

impl SignalSpectrum {
    pub fn from_samples(samples: &[f64], h: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("signal spectrum needs at least one sample"));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(invalid(format!("grid spacing must be positive, got {h}")));
        }
        let len = samples.len();
        let twiddles = Twiddles::new(len);
        let values = (0..len)
            .into_par_iter()
            .map(|r| {
                samples
                    .iter()
                    .enumerate()
                    .fold(Complex64::zero(), |acc, (m, &f)| acc + twiddles.forward((m * r) % len) * f)
                    * h
            })
            .collect();
        Ok(SignalSpectrum { h, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Signed bin frequency: `2πr/(Nh)` for `r <= N/2`, `2π(r-N)/(Nh)` above.
    pub fn omega(&self, r: usize) -> f64 {
        let len = self.len();
        if 2 * r <= len {
            bin_omega(r, len, self.h)
        } else {
            -bin_omega(len - r, len, self.h)
        }
    }

    /// Samples `f_m = (1/(N h)) sum_r c_r exp(iω_r m h)`, real part.
    pub fn inverse(&self) -> Vec<f64> {
        let len = self.len();
        let twiddles = Twiddles::new(len);
        let scale = 1.0 / (len as f64 * self.h);
        (0..len)
            .into_par_iter()
            .map(|m| {
                let sum: CompensatedSum = self
                    .values
                    .iter()
                    .enumerate()
                    .map(|(r, c)| (c * twiddles.forward((m * r) % len).conj()).re)
                    .collect();
                sum.value() * scale
            })
            .collect()
    }
}

/// Band-limited derivative in the frequency domain: multiply by `iω` (order 1)
/// or `-ω²` (order 2). The first derivative zeroes the Nyquist bin, where the
/// limit filter is undefined; the second keeps it.
pub fn freq_differentiate(spectrum: &SignalSpectrum, order: u32) -> Result<SignalSpectrum> {
    let len = spectrum.len();
    let values = match order {
        1 => (0..len)
            .map(|r| {
                if 2 * r == len {
                    Complex64::zero()
                } else {
                    spectrum.values[r] * Complex64::new(0.0, spectrum.omega(r))
                }
            })
            .collect(),
        2 => (0..len).map(|r| spectrum.values[r] * -spectrum.omega(r).powi(2)).collect(),
        _ => return Err(invalid(format!("derivative order must be 1 or 2, got {order}"))),
    };
    Ok(SignalSpectrum { h: spectrum.h, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{central_first, half_point, one_sided_first};

    const N: usize = 2000;

    #[test]
    fn twiddles_are_exact_at_quarter_turns() {
        let t = Twiddles::new(8);
        assert_eq!((t.cos[0], t.sin[0]), (1.0, 0.0));
        assert_eq!((t.cos[2], t.sin[2]), (0.0, 1.0));
        assert_eq!(t.sin[4], 0.0);
        assert_eq!(t.cos[4], -1.0);
        assert_eq!(t.sin[6], -1.0);
        for len in [6usize, 7, 10, 2000] {
            let t = Twiddles::new(len);
            for k in 0..len {
                let theta = 2.0 * PI * k as f64 / len as f64;
                assert!((t.cos[k] - theta.cos()).abs() < 1e-13, "len={len} k={k}");
                assert!((t.sin[k] - theta.sin()).abs() < 1e-13, "len={len} k={k}");
            }
        }
    }

    #[test]
    fn one_sided_dc_bin_is_exactly_zero() {
        for n in 1..=8 {
            let s = dft_spectrum(&(&one_sided_first(n).unwrap()).into(), N, EmbeddingMode::HalfSequence).unwrap();
            assert_eq!(s.b(0), Complex64::zero());
        }
    }

    #[test]
    fn half_point_n1_is_a_sine() {
        let s = dft_spectrum(&(&half_point(1).unwrap()).into(), N, EmbeddingMode::HalfSequence).unwrap();
        for r in 0..=N / 2 {
            let expected = (2.0 * PI * r as f64 / N as f64).sin();
            assert!((s.im_conj(r) - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn limit_sequence_vanishes_at_nyquist() {
        let taps = FilterTaps::limit(LimitFamily::CentralFirst, 999).unwrap();
        let s = dft_spectrum(&taps, N, EmbeddingMode::HalfSequence).unwrap();
        assert_eq!(s.im_conj(N / 2), 0.0);
    }

    #[test]
    fn embedding_overflow_is_reported() {
        let taps = FilterTaps::limit(LimitFamily::CentralFirst, 1000).unwrap();
        let err = dft_spectrum(&taps, N, EmbeddingMode::HalfSequence).unwrap_err();
        assert_eq!(err, Error::EmbeddingOverflow { offset: 1000, len: N });
        assert!(dft_spectrum(&taps, 7, EmbeddingMode::HalfSequence).is_err());
    }

    #[test]
    fn antisymmetric_embedding_rejects_center_tap() {
        let taps = FilterTaps::from_stencil(&one_sided_first(2).unwrap());
        assert!(dft_spectrum(&taps, 16, EmbeddingMode::FullAntisymmetric).is_err());
    }

    #[test]
    fn full_antisymmetric_is_imaginary_and_tracks_two_theta() {
        let taps = FilterTaps::from_stencil(&central_first(10).unwrap());
        let s = dft_spectrum(&taps, 64, EmbeddingMode::FullAntisymmetric).unwrap();
        for r in 0..64 {
            assert!(s.b(r).re.abs() <= 1e-10 * taps.abs_sum());
        }
        // Low bins: Im b* ≈ 2θ.
        let theta = 2.0 * PI / 64.0;
        assert!((s.im_conj(1) - 2.0 * theta).abs() < 1e-12);
    }

    #[test]
    fn reference_values() {
        let h = 0.5;
        let b2 = reference_value(&ReferenceCurve::Beta2Inf { h }, Abscissa::Omega(0.0)).unwrap();
        assert_eq!(b2, Complex64::new(PI * PI * h / 3.0, 0.0));
        let junction = reference_value(&ReferenceCurve::BetaHalfInf { h }, Abscissa::Omega(PI / (2.0 * h))).unwrap();
        assert!((junction - Complex64::new(0.0, -PI * h)).norm() < 1e-15);
        let y = reference_value(&ReferenceCurve::YHalf { len: N }, Abscissa::Index(N / 4)).unwrap();
        assert_eq!(y.re, PI / 2.0);
        let y = reference_value(&ReferenceCurve::YHalf { len: N }, Abscissa::Index(N / 2)).unwrap();
        assert_eq!(y.re, 0.0);
    }

    #[test]
    fn reference_domains() {
        let h = 1.0;
        assert!(matches!(reference_value(&ReferenceCurve::Beta1Inf { h }, Abscissa::Omega(PI)), Err(Error::Domain(_))));
        assert!(reference_value(&ReferenceCurve::Beta2Inf { h }, Abscissa::Omega(PI)).is_ok());
        assert!(reference_value(&ReferenceCurve::Beta2Inf { h }, Abscissa::Omega(-0.1)).is_err());
        assert!(reference_value(&ReferenceCurve::BetaHalfInf { h }, Abscissa::Omega(3.2)).is_err());
        assert!(reference_value(&ReferenceCurve::LinearI { len: 10 }, Abscissa::Index(6)).is_err());
        assert!(reference_value(&ReferenceCurve::LinearI { len: 10 }, Abscissa::Omega(1.0)).is_err());
    }

    #[test]
    fn truncated_series_small_cases() {
        let t = truncated_limit_spectrum(LimitCurve::Beta1Inf, 0.0, 1.0, 10).unwrap();
        assert_eq!(t.value, Complex64::zero());
        let t = truncated_limit_spectrum(LimitCurve::Beta1Inf, 0.0, 0.3, 1_000).unwrap();
        assert_eq!(t.value.norm(), 0.0);

        let h = 0.25;
        let t = truncated_limit_spectrum(LimitCurve::Beta1Inf, PI / (2.0 * h), h, 200_000).unwrap();
        let exact = Complex64::new(0.0, -PI * h);
        assert!((t.value - exact).norm() <= t.bound);

        let t = truncated_limit_spectrum(LimitCurve::Beta2Inf, 0.0, h, 1_000_000).unwrap();
        assert!((t.value.re - PI * PI * h / 3.0).abs() <= 4.0 * h * 1e-12);
        assert!(t.bound <= 4.0 * h * 1e-12);

        assert!(truncated_limit_spectrum(LimitCurve::Beta2Inf, 0.0, h, 0).is_err());
        assert!(truncated_limit_spectrum(LimitCurve::Beta2Inf, 100.0, h, 3).is_err());
    }

    #[test]
    fn half_limit_series_hits_triangle() {
        let h = 1.0;
        for x in [0.3, 1.0, PI / 2.0, 2.5, 3.0] {
            let t = truncated_limit_spectrum(LimitCurve::BetaHalfInf, x, h, 20_000).unwrap();
            let exact = reference_value(&ReferenceCurve::BetaHalfInf { h }, Abscissa::Omega(x)).unwrap();
            assert!((t.value - exact).norm() <= t.bound + 1e-14, "x={x}");
        }
    }

    #[test]
    fn grid_series_matches_pointwise_series() {
        let (len, h, terms) = (40, 0.7, 5_000);
        for family in [LimitCurve::Beta1Inf, LimitCurve::Beta2Inf, LimitCurve::BetaHalfInf] {
            let grid = truncated_limit_spectrum_grid(family, len, h, terms).unwrap();
            assert_eq!(grid.len(), len / 2 + 1);
            for (r, g) in grid.iter().enumerate() {
                let p = truncated_limit_spectrum(family, bin_omega(r, len, h), h, terms).unwrap();
                assert!((g.value - p.value).norm() < 1e-11, "{family:?} r={r}");
                assert!((g.bound - p.bound).abs() <= 1e-12 * p.bound.max(1.0));
            }
        }
    }

    #[test]
    fn deviation_on_zero_curve_normalizes_by_spectrum() {
        let taps = FilterTaps::from_stencil(&one_sided_first(3).unwrap());
        let s = dft_spectrum(&taps, N, EmbeddingMode::HalfSequence).unwrap();
        let rep = deviation(&s, &ReferenceCurve::ZeroR, SpectrumPart::ReConj, 0..=0).unwrap();
        assert_eq!(rep.max_abs, 0.0);
        let full = deviation(&s, &ReferenceCurve::ZeroR, SpectrumPart::ReConj, 0..=N / 2).unwrap();
        assert_eq!(full.max_rel, 1.0);
        let (lo, hi) = (5, 4);
        assert!(deviation(&s, &ReferenceCurve::ZeroR, SpectrumPart::ReConj, lo..=hi).is_err());
        assert!(deviation(&s, &ReferenceCurve::ZeroR, SpectrumPart::ReConj, 0..=N).is_err());
    }

    #[test]
    fn half_point_near_origin_follows_the_triangle() {
        let s = dft_spectrum(&(&half_point(1).unwrap()).into(), N, EmbeddingMode::HalfSequence).unwrap();
        let rep = deviation(&s, &ReferenceCurve::YHalf { len: N }, SpectrumPart::ImConj, 0..=50).unwrap();
        let x = 2.0 * PI * 50.0 / N as f64;
        assert!(rep.max_abs <= x.powi(3) / 6.0);
        assert_eq!(rep.argmax, 50);
    }

    #[test]
    fn frequency_derivative_of_tones() {
        let len = 32;
        let h = 0.1;
        let k = 3;
        let omega = 2.0 * PI * k as f64 / (len as f64 * h);
        let samples: Vec<f64> = (0..len).map(|m| (omega * m as f64 * h + 0.4).cos()).collect();
        let spec = SignalSpectrum::from_samples(&samples, h).unwrap();
        let d1 = freq_differentiate(&spec, 1).unwrap().inverse();
        for (m, v) in d1.iter().enumerate() {
            let expected = -omega * (omega * m as f64 * h + 0.4).sin();
            assert!((v - expected).abs() < 1e-11, "m={m}");
        }

        let alt: Vec<f64> = (0..len).map(|m| if m % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let spec = SignalSpectrum::from_samples(&alt, h).unwrap();
        let d2 = freq_differentiate(&spec, 2).unwrap().inverse();
        let d1 = freq_differentiate(&spec, 1).unwrap().inverse();
        let wmax = PI / h;
        for m in 0..len {
            assert!((d2[m] + wmax * wmax * alt[m]).abs() < 1e-9);
            assert!(d1[m].abs() < 1e-12);
        }

        let flat = SignalSpectrum::from_samples(&[2.5; 16], h).unwrap();
        assert!(freq_differentiate(&flat, 1).unwrap().inverse().iter().all(|v| v.abs() < 1e-13));
        assert!(freq_differentiate(&flat, 3).is_err());
    }
}
