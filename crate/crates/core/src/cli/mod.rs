//! The `tpstokes` command line: `eval` tabulates kernels, `solve` runs the grid solver and
//! `verify` runs named checks.
//!
//! Exit codes: 0 success, 2 configuration or I/O error, 3 numerical failure (including a
//! failed check), 4 incompatible forcing.

pub mod config;
mod eval;
pub mod points;
mod solve;
mod verify;

use crate::error::Error;
use clap::{Args, Parser, Subcommand};
use config::{KernelKind, RunConfig, SubcommandName};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "tpstokes", version, about = "Time-periodic Stokes fundamental solution: kernels, solver, checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate a kernel on a point set as CSV.
    Eval(EvalArgs),
    /// Solve on a periodic grid and write u, p and a JSON summary.
    Solve(SolveArgs),
    /// Run verification checks and write one JSON report per check plus an aggregate.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spatial dimension (2 or 3).
    #[arg(long)]
    n: Option<usize>,
    /// Time period.
    #[arg(long = "T", value_name = "PERIOD")]
    period: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum)]
    kernel: Option<KernelKind>,
    /// Segment `(a,b)..(c,d):M`; repeatable.
    #[arg(long)]
    line: Vec<String>,
    /// Circle `R:M` in the x1-x2 plane; repeatable.
    #[arg(long)]
    ring: Vec<String>,
    /// Point list `(a,b);(c,d)`; repeatable.
    #[arg(long)]
    points: Vec<String>,
    /// Time of the remainder kernel.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Mode index of the mode kernel.
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i64>,
    /// Mode truncation; adaptive summation when absent.
    #[arg(long = "K")]
    truncation: Option<usize>,
    /// CSV output file (standard output when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Box half-length.
    #[arg(long = "L")]
    half_length: Option<f64>,
    /// Points per axis (power of two).
    #[arg(long = "N")]
    n_space: Option<usize>,
    /// Time samples (odd).
    #[arg(long = "Nt")]
    n_time: Option<usize>,
    /// `manufactured`, `gaussian-bump`, or a field container path.
    #[arg(long)]
    forcing: Option<String>,
    #[arg(long)]
    bump_radius: Option<f64>,
    /// Also solve through the representation formula and report the difference.
    #[arg(long)]
    cross_check: bool,
    /// Mode truncation of the representation formula.
    #[arg(long = "K")]
    truncation: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Run every check.
    #[arg(long)]
    all: bool,
    /// Check to run; repeatable.
    #[arg(long)]
    check: Vec<String>,
    /// Radius grid `a:b:m` for the radius-sampled checks.
    #[arg(long)]
    radii: Option<String>,
    /// Criterion bound override `NAME=VALUE` or `CHECK:NAME=VALUE`; repeatable.
    #[arg(long = "tol")]
    tolerances: Vec<String>,
    /// Keep measured runtimes in the report files.
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

/// Exit code of a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) | Error::Shape(_) => 2,
        Error::Compatibility { .. } => 4,
        Error::Domain(_) | Error::Convergence(_) | Error::Quadrature { .. } | Error::Fit(_) => 3,
    }
}

fn base_config(common: &CommonArgs) -> crate::Result<RunConfig> {
    let mut c = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = common.n {
        c.params.n = n;
    }
    if let Some(t) = common.period {
        c.params.period = t;
    }
    if let Some(s) = common.seed {
        c.seed = s;
    }
    Ok(c)
}

fn eval_config(a: &EvalArgs) -> crate::Result<RunConfig> {
    let mut c = base_config(&a.common)?;
    if let Some(k) = a.kernel {
        c.eval.kernel = k;
    }
    if !(a.line.is_empty() && a.ring.is_empty() && a.points.is_empty()) {
        c.eval.lines = a.line.clone();
        c.eval.rings = a.ring.clone();
        c.eval.points = a.points.clone();
    }
    if let Some(t) = a.t {
        c.eval.t = t;
    }
    if let Some(k) = a.k {
        c.eval.k = k;
    }
    if a.truncation.is_some() {
        c.truncation = a.truncation;
    }
    if a.output.is_some() {
        c.output.file = a.output.clone();
    }
    c.finalize(SubcommandName::Eval)?;
    Ok(c)
}

fn solve_config(a: &SolveArgs) -> crate::Result<RunConfig> {
    let mut c = base_config(&a.common)?;
    if let Some(l) = a.half_length {
        c.grid.half_length = l;
    }
    if let Some(n) = a.n_space {
        c.grid.n_space = n;
    }
    if let Some(nt) = a.n_time {
        c.grid.n_time = nt;
    }
    if let Some(f) = &a.forcing {
        c.solve.forcing = f.clone();
    }
    if a.bump_radius.is_some() {
        c.solve.bump_radius = a.bump_radius;
    }
    c.solve.cross_check |= a.cross_check;
    if a.truncation.is_some() {
        c.truncation = a.truncation;
    }
    if a.output_dir.is_some() {
        c.output.dir = a.output_dir.clone();
    }
    c.finalize(SubcommandName::Solve)?;
    Ok(c)
}

fn verify_config(a: &VerifyArgs) -> crate::Result<RunConfig> {
    let mut c = base_config(&a.common)?;
    c.checks.all |= a.all;
    if !a.check.is_empty() {
        c.checks.names = a.check.clone();
    }
    if let Some(spec) = &a.radii {
        let radii = verify::parse_radii(spec)?;
        let names = verify::selected_checks(&c.checks)?;
        let wants = |n: &str| names.iter().any(|s| s == n);
        if wants("remainder-decay") {
            c.suite.decay.radii = radii.clone();
        }
        if wants("mode-sum") {
            c.suite.mode_sum.radii = radii.clone();
        }
        if wants("pointwise-mode-bound") {
            c.suite.pointwise.radii = radii;
        }
    }
    for t in &a.tolerances {
        let (k, v) = t.split_once('=').ok_or_else(|| Error::Config(format!("tolerance '{t}' must be NAME=VALUE")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Config(format!("bad tolerance value in '{t}'")))?;
        c.tolerances.insert(k.trim().to_string(), v);
    }
    c.timings |= a.timings;
    if a.output_dir.is_some() {
        c.output.dir = a.output_dir.clone();
    }
    c.finalize(SubcommandName::Verify)?;
    Ok(c)
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => eval_config(a).and_then(|c| eval::run(&c)),
        Command::Solve(a) => solve_config(a).and_then(|c| solve::run(&c)),
        Command::Verify(a) => verify_config(a).and_then(|c| verify::run(&c)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tpstokes: {e}");
            exit_code(&e)
        }
    }
}

/// Writes to standard output; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

/// Writes `value` as pretty JSON with a trailing newline.
fn write_json(path: &std::path::Path, value: &impl serde::Serialize) -> crate::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

fn output_dir(config: &RunConfig, default: &str) -> crate::Result<PathBuf> {
    let dir = config.output.dir.clone().unwrap_or_else(|| PathBuf::from(default));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}
