//! `angle-gauge` command-line front end.
//!
//! ```text
//! angle-gauge <analyze|witness|verify> --matrix PATH [--format csv|json]
//!     --c FLOAT [--c FLOAT ...] [--samples N] [--seed S] [--output json|text]
//! ```
//!
//! Exit codes: 0 success, 1 a verify check failed, 2 usage or input error.
//! Output is a single JSON document on stdout with keys in a fixed order.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::angle::AngleConstant;
use crate::eps::{analyze, extremal_witness, EpsReport};
use crate::error::Error;
use crate::io::{matrix_digest, parse_matrix, MatrixFormat};
use crate::linalg::{Matrix, Vector};
use crate::verify::{full_report, CheckStatus, Thresholds, VerificationReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Witness,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for MatrixFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => MatrixFormat::Csv,
            FormatArg::Json => MatrixFormat::Json,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "angle-gauge",
    version,
    about = "Measure how far a linear map is from preserving angles"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Closed-form eps_hat per c, with spectral data and an optional sampled estimate
    Analyze(CommonArgs),
    /// The extremal pair attaining eps_hat per c
    Witness(CommonArgs),
    /// Run every identity and inequality check and emit a verification report
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Matrix file (CSV or JSON)
    #[arg(long)]
    matrix: PathBuf,
    /// Input format; inferred from the file extension when omitted
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Cosine c in (-1, 1); repeat to batch
    #[arg(long = "c", allow_negative_numbers = true)]
    c: Vec<f64>,
    /// Monte-Carlo samples (0 skips sampling in analyze)
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    /// Override the 1e-9 identity and sampling thresholds of verify
    #[arg(long)]
    check_tol: Option<f64>,
    /// Override the 1e-6 continuity threshold of verify
    #[arg(long)]
    continuity_tol: Option<f64>,
    /// Record wall time in the verify report (makes output run-dependent)
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub matrix: PathBuf,
    pub format: Option<MatrixFormat>,
    pub c_values: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub check_tol: Option<f64>,
    pub continuity_tol: Option<f64>,
    pub output: OutputFormat,
    pub timing: bool,
}

impl CliConfig {
    pub fn new(command: Command, matrix: impl Into<PathBuf>, c_values: &[f64]) -> Self {
        CliConfig {
            command,
            matrix: matrix.into(),
            format: None,
            c_values: c_values.to_vec(),
            samples: 100_000,
            seed: 0,
            check_tol: None,
            continuity_tol: None,
            output: OutputFormat::Json,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return RunOutcome {
                code,
                stdout,
                stderr,
            };
        }
    };
    let (command, a) = match cli.command {
        Sub::Analyze(a) => (Command::Analyze, a),
        Sub::Witness(a) => (Command::Witness, a),
        Sub::Verify(a) => (Command::Verify, a),
    };
    run(&CliConfig {
        command,
        matrix: a.matrix,
        format: a.format.map(Into::into),
        c_values: a.c,
        samples: a.samples,
        seed: a.seed,
        check_tol: a.check_tol,
        continuity_tol: a.continuity_tol,
        output: a.output,
        timing: a.timing,
    })
}

fn usage(msg: String) -> RunOutcome {
    RunOutcome {
        code: EXIT_USAGE,
        stdout: String::new(),
        stderr: format!("error: {msg}\n"),
    }
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
}

#[derive(Serialize)]
struct ErrorDoc {
    tool_version: &'static str,
    command: Command,
    error: ErrorBody,
}

fn structured_error(command: Command, e: &Error) -> RunOutcome {
    let doc = ErrorDoc {
        tool_version: TOOL_VERSION,
        command,
        error: ErrorBody {
            kind: e.kind(),
            message: e.to_string(),
        },
    };
    RunOutcome {
        code: EXIT_USAGE,
        stdout: to_json(&doc),
        stderr: format!("error: {e}\n"),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct AnalyzeDoc<'a> {
    tool_version: &'static str,
    command: Command,
    matrix_digest: String,
    rows: usize,
    cols: usize,
    reports: &'a [EpsReport],
}

#[derive(Serialize)]
struct WitnessEntry {
    c: f64,
    eps_hat: f64,
    u: Vector,
    v: Vector,
    image_u: Vector,
    image_v: Vector,
    cosine: f64,
    image_cosine: f64,
    value: f64,
}

#[derive(Serialize)]
struct WitnessDoc<'a> {
    tool_version: &'static str,
    command: Command,
    matrix_digest: String,
    rows: usize,
    cols: usize,
    witnesses: &'a [WitnessEntry],
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    tool_version: &'static str,
    command: Command,
    #[serde(flatten)]
    report: &'a VerificationReport,
}

/// Runs a validated configuration.
pub fn run(config: &CliConfig) -> RunOutcome {
    let cmd = config.command;
    let mut cs = Vec::with_capacity(config.c_values.len());
    for &c in &config.c_values {
        match AngleConstant::new(c) {
            Ok(ac) => cs.push(ac),
            Err(_) => return usage(format!("--c {c} is outside (-1, 1)")),
        }
    }
    if cs.is_empty() {
        if cmd == Command::Verify {
            cs.push(AngleConstant::new(0.0).expect("0 is valid"));
        } else {
            return usage("at least one --c value is required".into());
        }
    }
    if cmd == Command::Verify && config.samples == 0 {
        return usage("verify needs --samples >= 1".into());
    }
    for (flag, tol) in [
        ("--check-tol", config.check_tol),
        ("--continuity-tol", config.continuity_tol),
    ] {
        if let Some(tol) = tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return usage(format!("{flag} must be a finite value >= 0, got {tol}"));
            }
        }
    }

    let format = config
        .format
        .unwrap_or_else(|| MatrixFormat::from_path(&config.matrix));
    let t = match parse_matrix(&config.matrix, format) {
        Ok(t) => t,
        Err(e) => return structured_error(cmd, &e),
    };

    let result = match cmd {
        Command::Analyze => run_analyze(&t, &cs, config),
        Command::Witness => run_witness(&t, &cs, config),
        Command::Verify => run_verify(&t, &cs, config),
    };
    result.unwrap_or_else(|e| structured_error(cmd, &e))
}

fn ok(stdout: String) -> RunOutcome {
    RunOutcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn run_analyze(t: &Matrix, cs: &[AngleConstant], config: &CliConfig) -> Result<RunOutcome, Error> {
    let reports = cs
        .iter()
        .map(|&c| analyze(t, c, config.samples, config.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let out = match config.output {
        OutputFormat::Json => to_json(&AnalyzeDoc {
            tool_version: TOOL_VERSION,
            command: Command::Analyze,
            matrix_digest: matrix_digest(t),
            rows: t.rows(),
            cols: t.cols(),
            reports: &reports,
        }),
        OutputFormat::Text => {
            let mut s = format!(
                "matrix {}x{}  digest {}\n",
                t.rows(),
                t.cols(),
                matrix_digest(t)
            );
            for r in &reports {
                let _ = write!(
                    s,
                    "c = {:<8} ||T|| = {}  [T] = {}  eps_hat = {}{}",
                    r.c.value(),
                    r.op_norm,
                    r.min_mod,
                    r.eps_hat,
                    if r.degenerate { "  (degenerate)" } else { "" }
                );
                if let Some(e) = r.empirical_sup {
                    let _ = write!(s, "  sampled = {e}");
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(ok(out))
}

fn run_witness(t: &Matrix, cs: &[AngleConstant], config: &CliConfig) -> Result<RunOutcome, Error> {
    let mut entries = Vec::with_capacity(cs.len());
    for &c in cs {
        let eps = crate::eps::eps_hat(t, c)?.eps_hat;
        let w = extremal_witness(t, c)?;
        entries.push(WitnessEntry {
            c: c.value(),
            eps_hat: eps,
            u: w.u,
            v: w.v,
            image_u: w.image_u,
            image_v: w.image_v,
            cosine: w.cosine,
            image_cosine: w.image_cosine,
            value: w.value,
        });
    }
    let out = match config.output {
        OutputFormat::Json => to_json(&WitnessDoc {
            tool_version: TOOL_VERSION,
            command: Command::Witness,
            matrix_digest: matrix_digest(t),
            rows: t.rows(),
            cols: t.cols(),
            witnesses: &entries,
        }),
        OutputFormat::Text => {
            let mut s = String::new();
            for e in &entries {
                let _ = writeln!(
                    s,
                    "c = {}  u = {:?}  v = {:?}  cos(Tu, Tv) = {}  value = {}  eps_hat = {}",
                    e.c,
                    e.u.as_slice(),
                    e.v.as_slice(),
                    e.image_cosine,
                    e.value,
                    e.eps_hat
                );
            }
            s
        }
    };
    Ok(ok(out))
}

fn run_verify(t: &Matrix, cs: &[AngleConstant], config: &CliConfig) -> Result<RunOutcome, Error> {
    let mut th = Thresholds::default();
    if let Some(tol) = config.check_tol {
        th.identity = tol;
        th.sample_slack = tol;
    }
    if let Some(tol) = config.continuity_tol {
        th.continuity = tol;
    }
    let start = Instant::now();
    let mut report = full_report(t, cs, config.seed, config.samples, &th)?;
    if config.timing {
        report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    let code = if report.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    let stdout = match config.output {
        OutputFormat::Json => to_json(&VerifyDoc {
            tool_version: TOOL_VERSION,
            command: Command::Verify,
            report: &report,
        }),
        OutputFormat::Text => {
            let mut s = format!(
                "matrix {}x{}  digest {}\n",
                report.rows, report.cols, report.matrix_digest
            );
            for c in &report.checks {
                let tag = match c.status {
                    CheckStatus::Passed => "PASS",
                    CheckStatus::Failed => "FAIL",
                    CheckStatus::Skipped => "SKIP",
                };
                let _ = writeln!(
                    s,
                    "{tag} {:<22} c = {:<6} measured = {:<24} {}",
                    c.name,
                    c.c.map_or("-".into(), |v| v.to_string()),
                    c.measured.map_or("-".into(), |v| format!("{v:e}")),
                    c.detail
                );
            }
            let _ = writeln!(
                s,
                "{}",
                if report.passed {
                    "all checks passed"
                } else {
                    "FAILED"
                }
            );
            s
        }
    };
    Ok(RunOutcome {
        code,
        stdout,
        stderr: String::new(),
    })
}
