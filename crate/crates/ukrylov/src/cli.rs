//! Command-line front end.
//!
//! Exit codes: 0 compatible (solution found), 1 incompatible (certificate
//! found), 2 usage or input error, 3 no verdict (iteration cap, breakdown,
//! or nonpositive curvature in cg).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use ukrylov_core::cg::solve_cg;
use ukrylov_core::solver::SQRT_EPS;
use ukrylov_core::{solve_krylov, solve_minres, Error as CoreError, KrylovConfig, ScalingStrategy};

use crate::demo::Demo;
use crate::io::{self, ConfigEcho, Format, ProblemInstance, ReportDocument};

pub const EXIT_COMPATIBLE: i32 = 0;
pub const EXIT_INCOMPATIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_VERDICT: i32 = 3;

/// Triples and iterates are recorded in the report up to this dimension.
pub const HISTORY_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Krylov,
    Minres,
    Cg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scaling {
    Ynorm,
    Qnorm,
    Unit,
    Normalized,
}

impl Scaling {
    fn strategy(self) -> ScalingStrategy {
        match self {
            Scaling::Ynorm => ScalingStrategy::YNorm,
            Scaling::Qnorm => ScalingStrategy::QNorm,
            Scaling::Unit => ScalingStrategy::Unit,
            Scaling::Normalized => ScalingStrategy::Normalized,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Scaling::Ynorm => "ynorm",
            Scaling::Qnorm => "qnorm",
            Scaling::Unit => "unit",
            Scaling::Normalized => "normalized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Solve `Hx + c = 0` for symmetric `H`, or certify that it has no solution.
#[derive(Debug, Parser)]
#[command(name = "ukrylov", version)]
pub struct CliOptions {
    /// Matrix Market file holding `H`.
    #[arg(long, value_name = "PATH", required_unless_present = "demo", conflicts_with = "demo")]
    pub matrix: Option<PathBuf>,
    /// Vector file holding `c` (or `b` with --rhs-is-b).
    #[arg(long = "c", value_name = "PATH", required_unless_present = "demo", conflicts_with = "demo")]
    pub c: Option<PathBuf>,
    /// The vector file holds `b` of `Hx = b`; solve with `c = -b`.
    #[arg(long, conflicts_with = "demo")]
    pub rhs_is_b: bool,
    #[arg(long, value_enum, default_value_t = Method::Krylov)]
    pub method: Method,
    /// Stop once `||q_k||` falls to this value, with `y_k` scaled to `||c||` (cg: relative gradient norm).
    #[arg(long, value_parser = positive, default_value_t = SQRT_EPS)]
    pub q_tol: f64,
    /// `|delta_r|` at or below this value means incompatible.
    #[arg(long, value_parser = positive, default_value_t = SQRT_EPS)]
    pub delta_tol: f64,
    /// Free scale of each step; ignored by cg.
    #[arg(long, value_enum, default_value_t = Scaling::Ynorm)]
    pub scaling: Scaling,
    /// Iteration cap [default: n + 2].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iter: Option<u64>,
    /// Reorthogonalize every new vector against all previous ones.
    #[arg(long)]
    pub reorth: bool,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Run a built-in example instead of reading files.
    #[arg(long, value_enum)]
    pub demo: Option<Demo>,
}

/// Exit code for an error raised by the solvers.
pub fn core_exit_code(e: &CoreError) -> i32 {
    use CoreError::*;
    match e {
        NonSquare { .. }
        | AsymmetryExceeded { .. }
        | InvalidConfig(_)
        | EmptyInput
        | DimensionMismatch { .. }
        | NonFinite { .. }
        | ZeroRightHandSide => EXIT_USAGE,
        ZeroQ { .. }
        | InconsistentTriples { .. }
        | NormalizationBreakdown { .. }
        | ZeroYScaling { .. }
        | InvalidTheta { .. }
        | EmptyTrace
        | DidNotTerminate(_)
        | NonpositiveDenominator(_)
        | ZeroCertificate
        | NonpositiveCurvature { .. }
        | SingularMatrix { .. }
        | ZeroQInBasis { .. } => EXIT_NO_VERDICT,
    }
}

fn io_exit_code(e: &io::Error) -> i32 {
    match e {
        io::Error::Core(c) => core_exit_code(c),
        io::Error::NonFinite(_) => EXIT_NO_VERDICT,
        _ => EXIT_USAGE,
    }
}

/// Exit code for a report: its verdict, or 3 when there is none.
pub fn report_exit_code(doc: &ReportDocument) -> i32 {
    match doc.verdict.as_deref() {
        Some("compatible") => EXIT_COMPATIBLE,
        Some("incompatible") => EXIT_INCOMPATIBLE,
        _ => EXIT_NO_VERDICT,
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Krylov => "krylov",
        Method::Minres => "minres",
        Method::Cg => "cg",
    }
}

/// Runs the solve described by `opts`, returning the report and exit code.
/// An `Err` carries a message and the exit code when there is no report.
pub fn execute(opts: &CliOptions) -> Result<(ReportDocument, i32), (String, i32)> {
    let problem = match (opts.demo, &opts.matrix, &opts.c) {
        (Some(d), _, _) => d.instance(),
        (None, Some(m), Some(c)) => {
            ProblemInstance::load(m, c, opts.rhs_is_b).map_err(|e| (e.to_string(), io_exit_code(&e)))?
        }
        _ => return Err(("--matrix and --c are required without --demo".into(), EXIT_USAGE)),
    };
    let n = problem.h.n();
    let cfg = KrylovConfig {
        q_tol: opts.q_tol,
        delta_tol: opts.delta_tol,
        max_iter: opts.max_iter.map(|m| m as usize),
        strategy: opts.scaling.strategy(),
        reorthogonalize: opts.reorth,
        keep_history: n <= HISTORY_LIMIT,
    };
    cfg.validate().map_err(|e| (e.to_string(), core_exit_code(&e)))?;
    let echo = ConfigEcho {
        scaling: (opts.method != Method::Cg).then(|| opts.scaling.name().to_string()),
        q_tol: cfg.q_tol,
        delta_tol: cfg.delta_tol,
        max_iter: cfg.max_iter_for(n),
        reorthogonalize: cfg.reorthogonalize,
    };

    let name = method_name(opts.method);
    let outcome = match opts.method {
        Method::Krylov => solve_krylov(&problem.h, &problem.c, &cfg).map(|r| ReportDocument::from_solve(name, &r, echo.clone())),
        Method::Minres => solve_minres(&problem.h, &problem.c, &cfg).map(|r| ReportDocument::from_minres(&r, echo.clone())),
        Method::Cg => solve_cg(&problem.h, &problem.c, &cfg).map(|r| ReportDocument::from_solve(name, &r, echo.clone())),
    };
    match outcome {
        Ok(doc) => {
            let code = report_exit_code(&doc);
            Ok((doc, code))
        }
        Err(CoreError::DidNotTerminate(partial)) => {
            let msg = CoreError::DidNotTerminate(partial.clone()).to_string();
            let doc = ReportDocument::from_solve(name, &partial, echo).with_error(msg);
            Ok((doc, EXIT_NO_VERDICT))
        }
        Err(e) => Err((e.to_string(), core_exit_code(&e))),
    }
}

/// Parses `args` (including the program name), runs, and writes the report
/// to `--output` or `stdout`. Diagnostics go to `stderr`.
pub fn run_with_io<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let opts = match CliOptions::try_parse_from(args) {
        Ok(o) => o,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_COMPATIBLE };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let (doc, code) = match execute(&opts) {
        Ok(v) => v,
        Err((msg, code)) => {
            let _ = writeln!(stderr, "ukrylov: {msg}");
            return code;
        }
    };
    if let Some(e) = &doc.error {
        let _ = writeln!(stderr, "ukrylov: {e}");
    }
    let format = match opts.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Text => Format::Text,
    };
    let written = match &opts.output {
        Some(path) => doc.write(path, format),
        None => doc
            .render(format)
            .and_then(|s| stdout.write_all(s.as_bytes()).map_err(|source| io::Error::Io {
                path: "<stdout>".into(),
                source,
            })),
    };
    match written {
        Ok(()) => code,
        Err(e) => {
            let _ = writeln!(stderr, "ukrylov: {e}");
            io_exit_code(&e)
        }
    }
}
