//! Command-line front end.
//!
//! `run` parses an argument vector and returns the process exit code:
//! 0 on success, 1 on domain or I/O errors, 2 on usage errors.

mod figure;
mod verify;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::Error;
use crate::signal::{apply_stencil_at, differentiate, differentiate_half_point, Policy, SampledSignal, TestFunction};
use crate::spectra::{
    deviation, dft_spectrum, EmbeddingMode, FilterSpectrum, FilterTaps, ReferenceCurve, SpectrumPart,
};
use crate::weights::{Stencil, StencilKind};

/// Environment variable capping the worker threads used internally.
pub const THREADS_ENV: &str = "STENCIL_SPECTRA_THREADS";

#[derive(Debug, Parser)]
#[command(name = "stencil-spectra", version, about = "Exact finite-difference stencils and their spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the exact weights of a stencil family.
    Stencil(StencilArgs),
    /// DFT spectrum of a stencil's weight sequence, with a reference curve.
    Spectrum(SpectrumArgs),
    /// Differentiate a sampled test function.
    Diff(DiffArgs),
    /// Emit the dataset behind one of the figures.
    Figure(figure::FigureArgs),
    /// Run the exact invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    CentralFirst,
    CentralSecond,
    HalfPoint,
    OneSidedFirst,
    OneSidedNth,
}

impl From<KindArg> for StencilKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::CentralFirst => StencilKind::CentralFirst,
            KindArg::CentralSecond => StencilKind::CentralSecond,
            KindArg::HalfPoint => StencilKind::HalfPointFirst,
            KindArg::OneSidedFirst => StencilKind::OneSidedFirst,
            KindArg::OneSidedNth => StencilKind::OneSidedNth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmbeddingArg {
    /// Full embeddings for the central kinds, the half sequence otherwise.
    Auto,
    HalfSequence,
    FullAntisymmetric,
    FullSymmetric,
}

impl EmbeddingArg {
    fn resolve(self, kind: StencilKind) -> EmbeddingMode {
        match self {
            EmbeddingArg::Auto => match kind {
                StencilKind::CentralFirst => EmbeddingMode::FullAntisymmetric,
                StencilKind::CentralSecond => EmbeddingMode::FullSymmetric,
                _ => EmbeddingMode::HalfSequence,
            },
            EmbeddingArg::HalfSequence => EmbeddingMode::HalfSequence,
            EmbeddingArg::FullAntisymmetric => EmbeddingMode::FullAntisymmetric,
            EmbeddingArg::FullSymmetric => EmbeddingMode::FullSymmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReferenceArg {
    Auto,
    None,
    Beta1Inf,
    Beta2Inf,
    BetaHalfInf,
    YHalf,
    LinearI,
    ZeroR,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PartArg {
    Auto,
    Im,
    Re,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiffKind {
    Central,
    HalfPoint,
}

#[derive(Debug, Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StencilArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// DFT length; must be even.
    #[arg(long = "N", default_value = "2000", value_parser = parse_even_len)]
    len: usize,
    #[arg(long, value_enum, default_value = "auto")]
    embedding: EmbeddingArg,
    #[arg(long, default_value = "1.0", value_parser = parse_spacing)]
    h: f64,
    #[arg(long, value_enum, default_value = "auto")]
    reference: ReferenceArg,
    /// Part of `b*(r)` compared with the reference.
    #[arg(long, value_enum, default_value = "auto")]
    part: PartArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct DiffArgs {
    /// `sin`, `sin:omega=W[,phase=P]`, `poly:c0,c1,..` or `altpoly:c0,c1,..`.
    #[arg(long = "fn")]
    func: String,
    #[arg(long, default_value = "1.0", value_parser = parse_spacing)]
    h: f64,
    #[arg(long, default_value = "2", value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    order: Option<u32>,
    #[arg(long, default_value = "101")]
    samples: usize,
    /// Index of x = 0; defaults to the middle sample.
    #[arg(long)]
    origin: Option<usize>,
    #[arg(long, value_enum, default_value = "central", conflicts_with = "stencil_file")]
    kind: DiffKind,
    /// Apply a stencil read from a `stencil --format json` document.
    #[arg(long)]
    stencil_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value = "8", value_parser = clap::value_parser!(u32).range(1..=16))]
    max_n: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

fn parse_even_len(s: &str) -> std::result::Result<usize, String> {
    let len: usize = s.parse().map_err(|e| format!("{e}"))?;
    if len < 2 || !len.is_multiple_of(2) {
        return Err(format!("N must be even and at least 2, got {len}"));
    }
    Ok(len)
}

fn parse_spacing(s: &str) -> std::result::Result<f64, String> {
    let h: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(h.is_finite() && h > 0.0) {
        return Err(format!("h must be positive and finite, got {s}"));
    }
    Ok(h)
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// What a command produced: the text to emit and whether it counts as success.
struct Report {
    text: String,
    ok: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, ok: true }
    }
}

/// Run the command line `argv` (including the program name).
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Some(k),
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got {v:?}");
                return 2;
            }
        },
        Err(_) => None,
    };
    let outcome = match threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Failure::Io(e.to_string())),
        },
        None => execute(&cli.command),
    };
    match outcome {
        Ok(ok) => i32::from(!ok),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn execute(command: &Command) -> Outcome<bool> {
    let (report, out) = match command {
        Command::Stencil(a) => (stencil_cmd(a)?, &a.output),
        Command::Spectrum(a) => (spectrum_cmd(a)?, &a.output),
        Command::Diff(a) => (diff_cmd(a)?, &a.output),
        Command::Figure(a) => (figure::run(a)?, &a.output),
        Command::Verify(a) => (verify_cmd(a)?, &a.output),
    };
    emit(&report.text, out)?;
    Ok(report.ok)
}

fn emit(text: &str, out: &Output) -> Outcome<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Io(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

/// 17 significant digits; `NaN` for undefined values. Negative zero prints as zero.
fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{:.16e}", x + 0.0)
    }
}

fn embedding_name(mode: EmbeddingMode) -> &'static str {
    match mode {
        EmbeddingMode::HalfSequence => "half-sequence",
        EmbeddingMode::FullAntisymmetric => "full-antisymmetric",
        EmbeddingMode::FullSymmetric => "full-symmetric",
    }
}

/// JSON number, or `null` where the value is undefined.
fn json_num(x: f64) -> Value {
    if x.is_finite() {
        json!(x + 0.0)
    } else {
        Value::Null
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn stencil_cmd(a: &StencilArgs) -> Outcome<Report> {
    let stencil = Stencil::generate(a.kind.into(), a.n)?;
    let text = match a.format {
        Format::Json => {
            let mut s = stencil.to_json();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("offset,weight,weight_f64\n");
            for (o, w) in stencil.nodes() {
                let _ = writeln!(s, "{o},{w},{}", num(w.to_f64()));
            }
            s
        }
    };
    Ok(Report::ok(text))
}

/// Reference curve and compared part used when none is requested.
fn default_reference(kind: StencilKind, len: usize, h: f64) -> (ReferenceCurve, SpectrumPart) {
    match kind {
        StencilKind::HalfPointFirst => (ReferenceCurve::YHalf { len }, SpectrumPart::ImConj),
        StencilKind::OneSidedFirst | StencilKind::OneSidedNth => {
            (ReferenceCurve::LinearI { len }, SpectrumPart::ImConj)
        }
        StencilKind::CentralFirst => (ReferenceCurve::Beta1Inf { h }, SpectrumPart::ImConj),
        StencilKind::CentralSecond => (ReferenceCurve::Beta2Inf { h }, SpectrumPart::ReConj),
    }
}

fn resolve_reference(
    kind: StencilKind,
    len: usize,
    h: f64,
    reference: ReferenceArg,
    part: PartArg,
) -> (Option<ReferenceCurve>, SpectrumPart) {
    let (auto_curve, auto_part) = default_reference(kind, len, h);
    let curve = match reference {
        ReferenceArg::Auto => Some(auto_curve),
        ReferenceArg::None => None,
        ReferenceArg::Beta1Inf => Some(ReferenceCurve::Beta1Inf { h }),
        ReferenceArg::Beta2Inf => Some(ReferenceCurve::Beta2Inf { h }),
        ReferenceArg::BetaHalfInf => Some(ReferenceCurve::BetaHalfInf { h }),
        ReferenceArg::YHalf => Some(ReferenceCurve::YHalf { len }),
        ReferenceArg::LinearI => Some(ReferenceCurve::LinearI { len }),
        ReferenceArg::ZeroR => Some(ReferenceCurve::ZeroR),
    };
    let part = match part {
        PartArg::Auto => match reference {
            ReferenceArg::Auto | ReferenceArg::None => auto_part,
            ReferenceArg::Beta2Inf | ReferenceArg::ZeroR => SpectrumPart::ReConj,
            _ => SpectrumPart::ImConj,
        },
        PartArg::Im => SpectrumPart::ImConj,
        PartArg::Re => SpectrumPart::ReConj,
    };
    (curve, part)
}

/// One row of a spectrum table.
struct SpectrumRow {
    r: usize,
    omega: f64,
    re: f64,
    im: f64,
    reference: f64,
    abs_dev: f64,
}

fn spectrum_rows(
    spec: &FilterSpectrum,
    h: f64,
    curve: Option<&ReferenceCurve>,
    part: SpectrumPart,
) -> Vec<SpectrumRow> {
    (0..=spec.len / 2)
        .map(|r| {
            let reference = curve.and_then(|c| c.compare_at(r, spec.len, part).ok()).unwrap_or(f64::NAN);
            SpectrumRow {
                r,
                omega: spec.omega(r, h),
                re: spec.re_conj(r),
                im: spec.im_conj(r),
                reference,
                abs_dev: (spec.part(part, r) - reference).abs(),
            }
        })
        .collect()
}

const SPECTRUM_HEADER: &str = "r,omega,re_b_conj,im_b_conj,ref_value,abs_dev";

fn spectrum_csv_fields(row: &SpectrumRow) -> String {
    format!("{},{},{},{},{},{}", row.r, num(row.omega), num(row.re), num(row.im), num(row.reference), num(row.abs_dev))
}

fn part_name(part: SpectrumPart) -> &'static str {
    match part {
        SpectrumPart::ImConj => "im",
        SpectrumPart::ReConj => "re",
    }
}

fn spectrum_cmd(a: &SpectrumArgs) -> Outcome<Report> {
    let kind: StencilKind = a.kind.into();
    let stencil = Stencil::generate(kind, a.n)?;
    let spec = dft_spectrum(&FilterTaps::from_stencil(&stencil), a.len, a.embedding.resolve(kind))?;
    let (curve, part) = resolve_reference(kind, a.len, a.h, a.reference, a.part);
    let rows = spectrum_rows(&spec, a.h, curve.as_ref(), part);
    let text = match a.format {
        Format::Csv => {
            let mut s = format!("{SPECTRUM_HEADER}\n");
            for row in &rows {
                s.push_str(&spectrum_csv_fields(row));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let report = match &curve {
                Some(c) =>
                // β₁ is open at the Nyquist bin, so fall back to the bins below it.
                {
                    match deviation(&spec, c, part, 0..=a.len / 2)
                        .or_else(|_| deviation(&spec, c, part, 0..=a.len / 2 - 1))
                    {
                        Ok(d) => json!({
                            "max_abs": json_num(d.max_abs),
                            "max_rel": json_num(d.max_rel),
                            "argmax": d.argmax,
                            "normalizer": json_num(d.normalizer),
                        }),
                        Err(_) => Value::Null,
                    }
                }
                None => Value::Null,
            };
            pretty(&json!({
                "source": spec.source.to_string(),
                "N": a.len,
                "h": a.h,
                "embedding": embedding_name(spec.mode),
                "reference": curve.map(|c| serde_json::to_value(c).expect("curves serialize")),
                "part": part_name(part),
                "deviation": report,
                "rows": rows.iter().map(|row| json!({
                    "r": row.r,
                    "omega": json_num(row.omega),
                    "re_b_conj": json_num(row.re),
                    "im_b_conj": json_num(row.im),
                    "ref_value": json_num(row.reference),
                    "abs_dev": json_num(row.abs_dev),
                })).collect::<Vec<_>>(),
            }))
        }
    };
    Ok(Report::ok(text))
}

fn policy_of(stencil: &Stencil) -> Policy {
    match stencil.kind() {
        StencilKind::CentralFirst | StencilKind::CentralSecond => Policy::CentralN(stencil.n()),
        StencilKind::HalfPointFirst => Policy::HalfPoint(stencil.n()),
        StencilKind::OneSidedFirst | StencilKind::OneSidedNth => Policy::OneSidedForward(stencil.n()),
    }
}

/// Keep a value, or mark the index skipped when the stencil leaves the samples.
fn at_index(value: crate::Result<f64>, policy: Policy) -> Outcome<(Option<f64>, Policy)> {
    match value {
        Ok(v) => Ok((Some(v), policy)),
        Err(Error::Boundary { .. }) => Ok((None, Policy::Skipped)),
        Err(e) => Err(e.into()),
    }
}

fn diff_cmd(a: &DiffArgs) -> Outcome<Report> {
    let func: TestFunction = a.func.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let origin = a.origin.unwrap_or(a.samples / 2);
    let signal = SampledSignal::from_function(&func, a.h, a.samples, origin)?;
    let (order, rows): (u32, Vec<(Option<f64>, Policy)>) = if let Some(path) = &a.stencil_file {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let stencil = Stencil::from_json(&text)?;
        if let Some(order) = a.order {
            if order != stencil.derivative_order() {
                return Err(Failure::Usage(format!(
                    "--order {order} conflicts with the stencil file, which has order {}",
                    stencil.derivative_order()
                )));
            }
        }
        let policy = policy_of(&stencil);
        let rows = (0..signal.len())
            .map(|i| at_index(apply_stencil_at(&signal, &stencil, i), policy))
            .collect::<Outcome<_>>()?;
        (stencil.derivative_order(), rows)
    } else {
        match a.kind {
            DiffKind::Central => {
                let order = a.order.unwrap_or(1);
                let result = differentiate(&signal, a.n, order)?;
                (order, result.values.into_iter().zip(result.policy).collect())
            }
            DiffKind::HalfPoint => {
                if a.order.is_some_and(|o| o != 1) {
                    return Err(Failure::Usage("--kind half-point only computes first derivatives".into()));
                }
                let rows = (0..signal.len())
                    .map(|i| at_index(differentiate_half_point(&signal, a.n, i), Policy::HalfPoint(a.n)))
                    .collect::<Outcome<_>>()?;
                (1, rows)
            }
        }
    };
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("index,x,value,policy\n");
            for (i, (v, p)) in rows.iter().enumerate() {
                let _ = writeln!(s, "{i},{},{},{p}", num(signal.x(i)), num(v.unwrap_or(f64::NAN)));
            }
            s
        }
        Format::Json => pretty(&json!({
            "function": a.func,
            "h": a.h,
            "order": order,
            "origin": origin,
            "rows": rows.iter().enumerate().map(|(i, (v, p))| json!({
                "index": i,
                "x": json_num(signal.x(i)),
                "value": v.map_or(Value::Null, json_num),
                "policy": p.to_string(),
            })).collect::<Vec<_>>(),
        })),
    };
    Ok(Report::ok(text))
}

fn verify_cmd(a: &VerifyArgs) -> Outcome<Report> {
    let checks = verify::run_suite(a.max_n)?;
    let ok = checks.iter().all(|c| c.passed);
    let text = match a.format {
        ReportFormat::Text => verify::render_text(&checks),
        ReportFormat::Json => pretty(&json!({
            "max_n": a.max_n,
            "passed": ok,
            "checks": checks,
        })),
    };
    Ok(Report { text, ok })
}
