//! Command-line front end: `family`, `eval`, `verify`, `evolve` and
//! `identity-check`.
//!
//! Exit codes: 0 success, 2 unparsable input, 3 violated precondition or
//! hypothesis, 4 numeric failure (overflow, precision cap, quadrature), 5
//! verification failure. Output is assembled in memory and written once, so
//! a failed run never leaves a partial file behind.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use rug::float::Constant;
use rug::{Complex, Float};
use serde_json::json;

use crate::error::{Error, Result};
use crate::evolution::{family_one, family_two_sequence, propagate};
use crate::families::{builtin_symbol, EntireSymbol, Evaluator, FamilySpec, Index, SuperoscFamily, SymbolSpec};
use crate::measures::{json as measure_json, BorelMeasure};
use crate::metrics::{
    convergence_report, local_wavenumber, run_identity, IdentityConfig, IdentityName, PolarGrid, ReportOptions,
};
use crate::numerics::format::{decimal, parse_decimal};
use crate::numerics::{abs, PrecisionPolicy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;

/// Smallest working precision the front end accepts.
const MIN_PRECISION: u32 = 53;

#[derive(Debug, Parser)]
#[command(name = "superosc", version, about = "Construct, sample and verify superoscillating families")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Working precision in bits; construction may escalate above it.
    #[arg(long, global = true, default_value_t = 128)]
    pub precision: u32,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// `U_t F`.
    Propagate,
    /// Weights multiplied by `e^{H(k) - H(a)}`.
    One,
    /// Image measure under `H`.
    Two,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the atoms, coefficients or density of one family member.
    Family(MemberArgs),
    /// Sample one family member on a real or complex grid.
    Eval(EvalArgs),
    /// Convergence report over a list of indices.
    Verify(VerifyArgs),
    /// Sample an evolved or derived member.
    Evolve(EvolveArgs),
    /// Run one of the identity and inequality suites.
    IdentityCheck(IdentityArgs),
}

#[derive(Debug, Args)]
pub struct MemberArgs {
    /// Family spec file (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Member index (`n` or `delta`); defaults to the one in the spec.
    #[arg(long)]
    pub index: Option<String>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Real grid `xmin:xmax:n`; endpoints may be multiples of `pi`.
    #[arg(long, conflicts_with = "cgrid", allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Complex polar grid `rmax:n_radii:n_angles`.
    #[arg(long)]
    pub cgrid: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub member: MemberArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Comma-separated indices in the direction of convergence.
    #[arg(long)]
    pub indices: String,
    /// Weight in `sup |F_n - e^{iaz}| e^{-B|z|}`; defaults to `|a|(1 + k1 k2)` with `--kappa`.
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long)]
    pub cgrid: Option<String>,
    /// Growth constants `k1,k2` for the explicit bound column.
    #[arg(long)]
    pub kappa: Option<String>,
    /// Relative tolerance for inexact Taylor defects.
    #[arg(long)]
    pub defect_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub member: MemberArgs,
    /// Symbol `H`: a builtin name, inline JSON such as `{"poly":[0,0,1],"image_bound":1}`, or a file.
    #[arg(long)]
    pub symbol: String,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Time for `propagate`: `re` or `re,im`.
    #[arg(long = "t", allow_hyphen_values = true)]
    pub t: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    /// One of lemmaA1, lemmaA2, lemma31, cor33.
    #[arg(long)]
    pub check: String,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub validation_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// What a command produced: the document to write, notes for standard
/// error, and a verification failure message if any.
struct Output {
    body: String,
    notes: Vec<String>,
    failure: Option<String>,
}

impl Output {
    fn ok(body: String) -> Self {
        Self { body, notes: Vec::new(), failure: None }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Spec(_) => EXIT_PARSE,
        e if e.is_precondition() => EXIT_PRECONDITION,
        _ => EXIT_NUMERIC,
    }
}

fn flag(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cfg) {
        Ok(out) => {
            for n in &out.notes {
                let _ = writeln!(stderr, "{n}");
            }
            if let Err(e) = emit(&cfg, &out.body, stdout) {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_PARSE;
            }
            match out.failure {
                Some(msg) => {
                    let _ = writeln!(stderr, "verification failed: {msg}");
                    EXIT_VERIFICATION
                }
                None => EXIT_OK,
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point for the binary.
pub fn main_exit() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run(std::env::args_os(), &mut out, &mut err)
}

fn emit(cfg: &RunConfig, body: &str, stdout: &mut dyn Write) -> Result<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, body).map_err(|e| flag(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(body.as_bytes()).map_err(|e| flag(format!("cannot write output: {e}"))),
    }
}

fn execute(cfg: &RunConfig) -> Result<Output> {
    if cfg.precision < MIN_PRECISION {
        return Err(flag(format!("--precision {} is below {MIN_PRECISION}", cfg.precision)));
    }
    let policy = PrecisionPolicy::from_env(cfg.precision).map_err(|e| flag(e.to_string()))?;
    match &cfg.command {
        Command::Family(a) => cmd_family(cfg, a, &policy),
        Command::Eval(a) => cmd_eval(cfg, a, &policy),
        Command::Verify(a) => cmd_verify(cfg, a, &policy),
        Command::Evolve(a) => cmd_evolve(cfg, a, &policy),
        Command::IdentityCheck(a) => cmd_identity_check(cfg, a),
    }
}

fn load(member: &MemberArgs, policy: &PrecisionPolicy) -> Result<(FamilySpec, SuperoscFamily, Index)> {
    let spec = load_spec(&member.spec)?;
    let fam = spec.build(policy)?;
    let idx = match &member.index {
        Some(s) => Index::parse(s, fam.index_kind()).map_err(|e| flag(e.to_string()))?,
        None => spec.index()?.ok_or_else(|| {
            flag("no member selected: set params.n or params.delta in the spec, or pass --index")
        })?,
    };
    Ok((spec, fam, idx))
}

fn load_spec(path: &Path) -> Result<FamilySpec> {
    FamilySpec::from_path(path)
}

fn cmd_family(cfg: &RunConfig, a: &MemberArgs, policy: &PrecisionPolicy) -> Result<Output> {
    let (spec, fam, idx) = load(a, policy)?;
    if spec.construction == "moment" {
        let n = idx.as_n().ok_or_else(|| flag("moment constructions take an integer index"))?;
        let mf = spec.moment_family(n, policy)?;
        if cfg.format == Some(Format::Json) {
            let doc = json!({
                "coefficients": mf.coeffs.iter().map(|c| [decimal(c.real()), decimal(c.imag())]).collect::<Vec<_>>(),
                "exact": mf.exact.as_ref().map(|e| e.iter().map(|(r, i)| [r.to_string(), i.to_string()]).collect::<Vec<_>>()),
                "condition": mf.condition,
                "measure": measure_json::to_doc(&mf.measure)?,
            });
            return Ok(Output::ok(pretty(&doc)?));
        }
        let mut s = String::from("j,k_j,re_C,im_C\n");
        for (j, c) in mf.coeffs.iter().enumerate() {
            s.push_str(&format!("{j},,{},{}\n", decimal(c.real()), decimal(c.imag())));
        }
        return Ok(Output::ok(s));
    }
    let m = fam.measure(idx)?;
    match (m.as_discrete(), cfg.format) {
        (Some(d), None | Some(Format::Csv)) => {
            let mut s = String::from("j,k_j,re_C,im_C\n");
            for (j, at) in d.atoms().iter().enumerate() {
                s.push_str(&format!(
                    "{j},{},{},{}\n",
                    decimal(&at.location),
                    decimal(at.weight.real()),
                    decimal(at.weight.imag())
                ));
            }
            Ok(Output::ok(s))
        }
        (None, Some(Format::Csv)) => Err(flag(format!(
            "a {} measure has no atom table; use --format json",
            m.variant_name()
        ))),
        _ => {
            let mut s = measure_json::to_json(&m)?;
            s.push('\n');
            Ok(Output::ok(s))
        }
    }
}

/// A real number, or a multiple of `pi` such as `pi`, `-2pi`, `0.5pi`.
fn parse_real(s: &str, prec: u32) -> Result<Float> {
    let t = s.trim();
    let bad = || flag(format!("'{s}' is not a number"));
    if let Some(coef) = t.strip_suffix("pi") {
        let c = match coef.trim().trim_end_matches('*') {
            "" | "+" => Float::with_val(prec, 1),
            "-" => Float::with_val(prec, -1),
            other => parse_decimal(other, prec).ok_or_else(bad)?,
        };
        return Ok(c * Float::with_val(prec, Constant::Pi));
    }
    let v = parse_decimal(t, prec).ok_or_else(bad)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

struct RealGrid {
    xmin: Float,
    xmax: Float,
    n: usize,
}

impl RealGrid {
    fn parse(s: &str, prec: u32) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(flag(format!("grid '{s}' is not xmin:xmax:n")));
        }
        let n = parts[2].trim().parse::<usize>().map_err(|_| flag(format!("grid size '{}' is not an integer", parts[2])))?;
        if n < 2 {
            return Err(flag(format!("grid needs at least 2 points, got {n}")));
        }
        Ok(Self { xmin: parse_real(parts[0], prec)?, xmax: parse_real(parts[1], prec)?, n })
    }

    fn points(&self, prec: u32) -> Vec<Float> {
        let step = Float::with_val(prec, &self.xmax - &self.xmin) / (self.n as u32 - 1);
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    Float::with_val(prec, &self.xmax)
                } else {
                    Float::with_val(prec, &step * i as u32) + &self.xmin
                }
            })
            .collect()
    }

    fn spacing(&self) -> f64 {
        (self.xmax.to_f64() - self.xmin.to_f64()) / (self.n - 1) as f64
    }
}

enum Grid {
    Real(RealGrid),
    Complex(PolarGrid),
}

fn parse_grid(g: &GridArgs, prec: u32) -> Result<Grid> {
    match (&g.grid, &g.cgrid) {
        (Some(s), _) => Ok(Grid::Real(RealGrid::parse(s, prec)?)),
        (None, Some(s)) => Ok(Grid::Complex(PolarGrid::parse(s).map_err(|e| flag(e.to_string()))?)),
        (None, None) => Err(flag("one of --grid or --cgrid is required")),
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    fn json(&self, extra: serde_json::Value) -> Result<String> {
        let mut doc = json!({ "columns": self.columns, "rows": self.rows });
        if let (Some(d), serde_json::Value::Object(e)) = (doc.as_object_mut(), extra) {
            d.extend(e);
        }
        pretty(&doc)
    }
}

fn pretty(v: &serde_json::Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| flag(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn sample(f: &Evaluator, grid: &Grid, idx: Index, prec: u32) -> Result<Table> {
    let at = |z: &Complex| f(z).map_err(|e| e.context(format!("index {idx}, z = {}", crate::numerics::format::complex_short(z))));
    match grid {
        Grid::Real(g) => {
            let xs = g.points(prec);
            let h = g.spacing().abs() / 10.0;
            let rows: Vec<Result<Vec<String>>> = xs
                .par_iter()
                .map(|x| {
                    let v = at(&Complex::with_val(prec, (x, 0)))?;
                    let k = if h > 0.0 {
                        match local_wavenumber(f.as_ref(), x.to_f64(), h, prec) {
                            Ok(k) => format!("{k}"),
                            Err(Error::NearZeroSignal(_)) => String::new(),
                            Err(e) => return Err(e),
                        }
                    } else {
                        String::new()
                    };
                    Ok(vec![decimal(x), decimal(v.real()), decimal(v.imag()), decimal(&abs(&v)), k])
                })
                .collect();
            Ok(Table {
                columns: vec!["x", "re_F", "im_F", "abs_F", "local_k"],
                rows: rows.into_iter().collect::<Result<_>>()?,
            })
        }
        Grid::Complex(g) => {
            let zs = g.points(prec);
            let rows: Vec<Result<Vec<String>>> = zs
                .par_iter()
                .map(|z| {
                    let v = at(z)?;
                    Ok(vec![decimal(z.real()), decimal(z.imag()), decimal(v.real()), decimal(v.imag())])
                })
                .collect();
            Ok(Table { columns: vec!["re_z", "im_z", "re_F", "im_F"], rows: rows.into_iter().collect::<Result<_>>()? })
        }
    }
}

fn render(cfg: &RunConfig, t: &Table, extra: serde_json::Value) -> Result<String> {
    match cfg.format {
        Some(Format::Json) => t.json(extra),
        _ => Ok(t.csv()),
    }
}

fn cmd_eval(cfg: &RunConfig, a: &EvalArgs, policy: &PrecisionPolicy) -> Result<Output> {
    let (_, fam, idx) = load(&a.member, policy)?;
    let prec = fam.measure(idx)?.precision();
    let grid = parse_grid(&a.grid, prec)?;
    let f = fam.evaluator(idx)?;
    let t = sample(&f, &grid, idx, prec)?;
    Ok(Output::ok(render(cfg, &t, json!({ "family": fam.label(), "index": idx.to_string() }))?))
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let v: Vec<&str> = s.split(',').collect();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| flag(format!("{what} '{s}' is not a number pair")));
    match v.as_slice() {
        [x] => Ok((num(x)?, 0.0)),
        [x, y] => Ok((num(x)?, num(y)?)),
        _ => Err(flag(format!("{what} '{s}' must be 're' or 're,im'"))),
    }
}

fn cmd_verify(cfg: &RunConfig, a: &VerifyArgs, policy: &PrecisionPolicy) -> Result<Output> {
    if cfg.format == Some(Format::Csv) {
        return Err(flag("verify writes a JSON report"));
    }
    let spec = load_spec(&a.spec)?;
    let fam = spec.build(policy)?;
    let indices = a
        .indices
        .split(',')
        .map(|s| Index::parse(s, fam.index_kind()).map_err(|e| flag(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let kappa = match &a.kappa {
        Some(s) => {
            let (k1, k2) = parse_pair(s, "--kappa")?;
            if !(k1 > 0.0 && k2 > 0.0) {
                return Err(flag("--kappa constants must be positive"));
            }
            Some((k1, k2))
        }
        None => None,
    };
    let b = match (a.b, kappa) {
        (Some(b), _) => b,
        (None, Some((k1, k2))) => fam.target().abs() * (1.0 + k1 * k2),
        (None, None) => return Err(flag("--B is required unless --kappa is given")),
    };
    let mut opts = ReportOptions { kappa, ..ReportOptions::default() };
    if let Some(g) = &a.cgrid {
        opts.grid = PolarGrid::parse(g).map_err(|e| flag(e.to_string()))?;
    }
    if let Some(t) = a.defect_tol {
        opts.defect_tolerance = t;
    }
    let report = convergence_report(&fam, &indices, b, &opts)?;
    let mut out = Output::ok(report.to_json()? + "\n");
    if !report.passed() {
        out.failure = Some(report.failed_checks.join("; "));
    }
    Ok(out)
}

fn parse_symbol(s: &str) -> Result<EntireSymbol> {
    let t = s.trim();
    let text = if t.starts_with('{') {
        t.to_string()
    } else if Path::new(t).is_file() {
        std::fs::read_to_string(t).map_err(|e| flag(format!("cannot read {t}: {e}")))?
    } else {
        return builtin_symbol(t);
    };
    let spec: SymbolSpec = serde_json::from_str(&text).map_err(|e| flag(format!("symbol spec: {e}")))?;
    spec.build()
}

fn cmd_evolve(cfg: &RunConfig, a: &EvolveArgs, policy: &PrecisionPolicy) -> Result<Output> {
    let (_, fam, idx) = load(&a.member, policy)?;
    let h = parse_symbol(&a.symbol)?;
    let mut notes = Vec::new();
    let mut extra = json!({ "family": fam.label(), "index": idx.to_string(), "symbol": h.label() });
    let (f, prec): (Evaluator, u32) = match a.mode {
        Mode::Propagate => {
            let ts = a.t.as_deref().ok_or_else(|| flag("--t is required with --mode propagate"))?;
            let (re, im) = parse_pair(ts, "--t")?;
            let m = fam.measure(idx)?;
            let t = Complex::with_val(m.precision(), (re, im));
            let u = propagate(&m, &h, &t)?;
            (u.evaluator(), u.measure().precision())
        }
        Mode::One => {
            let m = family_one(&fam.measure(idx)?, &h, fam.target())?;
            (transform(m.clone()), m.precision())
        }
        Mode::Two => {
            let two = family_two_sequence(&fam, &h)?;
            notes.push(format!("# band h0 = {}", two.band()));
            notes.push(format!("# target H(a) = {}", two.target()));
            extra["band"] = json!(two.band());
            extra["target"] = json!(two.target());
            let m = two.measure(idx)?;
            (transform(m.clone()), m.precision())
        }
    };
    let grid = parse_grid(&a.grid, prec)?;
    let t = sample(&f, &grid, idx, prec)?;
    Ok(Output { body: render(cfg, &t, extra)?, notes, failure: None })
}

fn transform(m: BorelMeasure) -> Evaluator {
    std::sync::Arc::new(move |z: &Complex| m.eval_transform(z))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_identity_check(cfg: &RunConfig, a: &IdentityArgs) -> Result<Output> {
    let name: IdentityName = a.check.parse().map_err(|e: Error| flag(e.to_string()))?;
    let mut ic = IdentityConfig { prec: cfg.precision, ..IdentityConfig::default() };
    if let Some(n) = a.samples {
        ic.samples = n;
    }
    if let Some(n) = a.validation_samples {
        ic.validation_samples = n;
    }
    if let Some(s) = a.seed {
        ic.seed = s;
    }
    let report = run_identity(name, &ic)?;
    let body = match cfg.format {
        Some(Format::Json) => pretty(&serde_json::to_value(&report).map_err(|e| flag(e.to_string()))?)?,
        _ => {
            let mut s = String::from("check,case,max_error,tolerance,violations,samples,passed,witness\n");
            for c in &report.cases {
                s.push_str(&format!(
                    "{},{},{:e},{:e},{},{},{},{}\n",
                    report.check,
                    csv_field(&c.case),
                    c.max_error,
                    c.tolerance,
                    c.violations,
                    c.samples,
                    c.passed,
                    csv_field(&c.witness)
                ));
            }
            s
        }
    };
    let mut out = Output::ok(body);
    if !report.passed {
        let bad: Vec<String> = report
            .cases
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: max error {:e} > {:e} at {}", c.case, c.max_error, c.tolerance, c.witness))
            .collect();
        out.failure = Some(bad.join("; "));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_parsing() {
        let p = 128;
        let pi = Float::with_val(p, Constant::Pi);
        assert_eq!(parse_real("pi", p).unwrap(), pi);
        assert_eq!(parse_real("-2pi", p).unwrap(), Float::with_val(p, &pi * -2i32));
        assert_eq!(parse_real("0.5", p).unwrap(), 0.5);
        assert!(parse_real("abc", p).is_err());
        assert!(parse_real("inf", p).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = RealGrid::parse("0:pi:3", 128).unwrap();
        let pts = g.points(128);
        assert_eq!(pts[2], Float::with_val(128, Constant::Pi));
        assert!(RealGrid::parse("0:1:1", 128).is_err());
        assert!(RealGrid::parse("0:1", 128).is_err());
    }

    #[test]
    fn exit_classes() {
        assert_eq!(exit_code(&Error::Spec("x".into())), EXIT_PARSE);
        assert_eq!(exit_code(&Error::HypothesisViolation("x".into())), EXIT_PRECONDITION);
        assert_eq!(exit_code(&Error::Overflow("x".into())), EXIT_NUMERIC);
    }
}
