//! Datasets behind the figures. Data only; plotting is left to other tools.

use std::fmt::Write as _;

use clap::{Args, ValueEnum};

use super::{
    num, parse_even_len, parse_spacing, spectrum_csv_fields, spectrum_rows, Failure, Outcome, Output, Report,
    SPECTRUM_HEADER,
};
use crate::error::Error;
use crate::signal::{differentiate_half_point, SampledSignal, TestFunction};
use crate::spectra::{
    bin_omega, deviation, dft_spectrum, reference_value, truncated_limit_spectrum_grid, Abscissa, EmbeddingMode,
    FilterTaps, LimitCurve, ReferenceCurve, SpectrumPart,
};
use crate::weights::{half_point, one_sided_first, Stencil};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(super) enum FigureId {
    /// Im β₁(ω) and its truncated series.
    #[value(name = "1a")]
    Fig1a,
    /// β₂(ω) and its truncated series.
    #[value(name = "1b")]
    Fig1b,
    /// Im b*(r) of half-point sequences against the triangle y(r).
    #[value(name = "2a")]
    Fig2a,
    /// Half-point derivative of an alternating signal with a polynomial envelope.
    #[value(name = "2b")]
    Fig2b,
    /// Im b*(r) of one-sided sequences against I(r).
    #[value(name = "3a")]
    Fig3a,
    /// Re b*(r) of one-sided sequences against R(r) = 0.
    #[value(name = "3b")]
    Fig3b,
}

#[derive(Debug, Args)]
pub(super) struct FigureArgs {
    #[arg(value_enum)]
    id: FigureId,
    /// Comma-separated stencil parameters.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    n: Vec<u32>,
    #[arg(long = "N", default_value = "2000", value_parser = parse_even_len)]
    len: usize,
    /// Grid spacing; 2b defaults to spanning [-1, 1], the others to 1.
    #[arg(long, value_parser = parse_spacing)]
    h: Option<f64>,
    /// Series terms for 1a and 1b.
    #[arg(long = "M", default_value = "1000000", value_parser = clap::value_parser!(u64).range(1..))]
    terms: u64,
    /// Envelope polynomial coefficients for 2b, lowest degree first.
    #[arg(long, default_value = "1,0.25,-0.5")]
    envelope: String,
    /// Sample count for 2b.
    #[arg(long, default_value = "201")]
    samples: usize,
    #[command(flatten)]
    pub(super) output: Output,
}

pub(super) fn run(a: &FigureArgs) -> Outcome<Report> {
    let h = a.h.unwrap_or(1.0);
    let text = match a.id {
        FigureId::Fig1a => limit_table(LimitCurve::Beta1Inf, SpectrumPart::ImConj, a.len, h, a.terms)?,
        FigureId::Fig1b => limit_table(LimitCurve::Beta2Inf, SpectrumPart::ReConj, a.len, h, a.terms)?,
        FigureId::Fig2a => {
            let ns = with_default(&a.n, &[1, 3, 5, 10]);
            spectrum_table(&ns, half_point, a.len, h, ReferenceCurve::YHalf { len: a.len }, SpectrumPart::ImConj)?
        }
        FigureId::Fig3a => {
            let ns = with_default(&a.n, &[1, 3, 5]);
            spectrum_table(
                &ns,
                one_sided_first,
                a.len,
                h,
                ReferenceCurve::LinearI { len: a.len },
                SpectrumPart::ImConj,
            )?
        }
        FigureId::Fig3b => {
            let ns = with_default(&a.n, &[1, 3, 5]);
            spectrum_table(&ns, one_sided_first, a.len, h, ReferenceCurve::ZeroR, SpectrumPart::ReConj)?
        }
        FigureId::Fig2b => {
            let n = match a.n.as_slice() {
                [] => 3,
                [n] => *n,
                _ => return Err(Failure::Usage("figure 2b takes a single --n".into())),
            };
            envelope_table(a, n)?
        }
    };
    Ok(Report::ok(text))
}

fn with_default(ns: &[u32], default: &[u32]) -> Vec<u32> {
    if ns.is_empty() {
        default.to_vec()
    } else {
        ns.to_vec()
    }
}

fn pick(z: num_complex::Complex64, part: SpectrumPart) -> f64 {
    match part {
        SpectrumPart::ImConj => z.im,
        SpectrumPart::ReConj => z.re,
    }
}

/// Analytic limit curve next to its `terms`-term series on the bins of a
/// length-`len` grid.
fn limit_table(family: LimitCurve, part: SpectrumPart, len: usize, h: f64, terms: u64) -> Outcome<String> {
    let series = truncated_limit_spectrum_grid(family, len, h, terms)?;
    let curve = family.reference(h);
    let mut s = String::from("r,omega,ref_value,series_value,bound,abs_dev\n");
    for (r, tv) in series.iter().enumerate() {
        let omega = bin_omega(r, len, h);
        let reference = reference_value(&curve, Abscissa::Omega(omega)).map(|z| pick(z, part)).unwrap_or(f64::NAN);
        let value = pick(tv.value, part);
        let _ = writeln!(
            s,
            "{r},{},{},{},{},{}",
            num(omega),
            num(reference),
            num(value),
            num(tv.bound),
            num((value - reference).abs())
        );
    }
    Ok(s)
}

/// Long-format spectra for each `n`, with the deviation from `curve`
/// relative to the normalizer used by [`deviation`].
fn spectrum_table(
    ns: &[u32],
    family: fn(u32) -> crate::Result<Stencil>,
    len: usize,
    h: f64,
    curve: ReferenceCurve,
    part: SpectrumPart,
) -> Outcome<String> {
    let mut s = format!("n,{SPECTRUM_HEADER},rel_dev\n");
    for &n in ns {
        let stencil = family(n)?;
        let spec = dft_spectrum(&FilterTaps::from_stencil(&stencil), len, EmbeddingMode::HalfSequence)?;
        let normalizer = deviation(&spec, &curve, part, 0..=len / 2)?.normalizer;
        for row in spectrum_rows(&spec, h, Some(&curve), part) {
            let rel = if normalizer > 0.0 { row.abs_dev / normalizer } else { f64::NAN };
            let _ = writeln!(s, "{n},{},{}", spectrum_csv_fields(&row), num(rel));
        }
    }
    Ok(s)
}

/// `f_m = (-1)^m g(mh)` with its envelopes `±g`, the half-point derivative,
/// that derivative with the carrier `(-1)^(m+1)` removed, and the exact `g'`.
fn envelope_table(a: &FigureArgs, n: u32) -> Outcome<String> {
    let coeffs: Vec<f64> = match format!("poly:{}", a.envelope).parse::<TestFunction>() {
        Ok(TestFunction::Polynomial(c)) => c,
        Ok(_) => unreachable!("poly: always parses to a polynomial"),
        Err(e) => return Err(Failure::Usage(e.to_string())),
    };
    if a.samples < 2 {
        return Err(Failure::Usage("figure 2b needs at least 2 samples".into()));
    }
    let h = a.h.unwrap_or(2.0 / (a.samples - 1) as f64);
    let origin = a.samples / 2;
    let envelope = TestFunction::Polynomial(coeffs.clone());
    let signal = SampledSignal::from_function(&TestFunction::ModulatedAlternating(coeffs), h, a.samples, origin)?;
    let mut s = String::from(
        "index,x,signal,upper_envelope,lower_envelope,raw_derivative,carrier_corrected,envelope_derivative_exact\n",
    );
    for i in 0..signal.len() {
        let m = i as i64 - origin as i64;
        let g = envelope.value(m, h);
        let raw = match differentiate_half_point(&signal, n, i) {
            Ok(v) => v,
            Err(Error::Boundary { .. }) => f64::NAN,
            Err(e) => return Err(e.into()),
        };
        let carrier = if m % 2 == 0 { -1.0 } else { 1.0 };
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{},{},{}",
            num(signal.x(i)),
            num(signal.samples()[i]),
            num(g),
            num(-g),
            num(raw),
            num(carrier * raw),
            num(envelope.derivative(m, h, 1))
        );
    }
    Ok(s)
}
