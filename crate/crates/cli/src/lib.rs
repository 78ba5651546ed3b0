// Validation predicates use !(x > 0) deliberately so NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! `toa`: batch analyses of arrival-time statistics for a particle
//! dropped in a uniform gravitational field.
//!
//! Subcommands: `scan` (sweep over the initial spread σ), `pdf`
//! (arrival density/CDF table), `verify` (uncertainty-bound grid), and
//! `simulate` (measurement-protocol Monte Carlo). Tables go to stdout
//! or `--out` as CSV with `#` metadata lines, or as a JSON mirror with
//! the same numbers.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

pub mod commands;
pub mod config;
pub mod output;

/// Process exit codes; a stable contract for scripting.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_QUADRATURE: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Violation(String),
    Quadrature(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Violation(m) => write!(f, "violation: {m}"),
            CliError::Quadrature(m) => write!(f, "quadrature failure: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Violation(_) => EXIT_VIOLATION,
            CliError::Quadrature(_) => EXIT_QUADRATURE,
        }
    }
}

impl From<freefall_toa::Error> for CliError {
    fn from(e: freefall_toa::Error) -> Self {
        match e {
            freefall_toa::Error::NonConvergence { .. } => CliError::Quadrature(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    A,
    B,
}

/// Options shared by every subcommand. All optional so that values can
/// be layered: explicit flag > config file > built-in default.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Particle mass in kg [default: 1.67e-27]
    #[arg(long)]
    pub mass: Option<f64>,
    /// Gravitational acceleration in m/s^2 [default: 9.8]
    #[arg(long)]
    pub gravity: Option<f64>,
    /// Detector height below the release point in m [default: 1e-5]
    #[arg(long)]
    pub height: Option<f64>,
    /// Reduced Planck constant in J*s [default: CODATA]
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Relative quadrature tolerance [default: 1e-10]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Smallest initial spread in m [default: 1e-7]
    #[arg(long)]
    pub sigma_min: Option<f64>,
    /// Largest initial spread in m [default: 1e-4]
    #[arg(long)]
    pub sigma_max: Option<f64>,
    /// Number of log-spaced sweep points [default: 200]
    #[arg(long)]
    pub sigma_steps: Option<usize>,
    /// Time at which the position spread enters the product, in s [default: 0]
    #[arg(long)]
    pub t_eval: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PdfArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Initial spread in m [default: 1e-6]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Number of grid points [default: 1000]
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Smallest quantumness ratio q [default: 1e-3]
    #[arg(long)]
    pub q_min: Option<f64>,
    /// Largest quantumness ratio q [default: 1e3]
    #[arg(long)]
    pub q_max: Option<f64>,
    /// Grid points along q [default: 32]
    #[arg(long)]
    pub q_steps: Option<usize>,
    /// Smallest sigma/x [default: 1e-3]
    #[arg(long)]
    pub sx_min: Option<f64>,
    /// Largest sigma/x [default: 1e2]
    #[arg(long)]
    pub sx_max: Option<f64>,
    /// Grid points along sigma/x [default: 32]
    #[arg(long)]
    pub sx_steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Which protocol to run [default: b]
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,
    /// Initial spread in m [default: 1e-6]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Measurement time for protocol A, in s [default: 0]
    #[arg(long)]
    pub t_eval: Option<f64>,
    /// Number of Monte Carlo trials [default: 100000]
    #[arg(long)]
    pub trials: Option<u64>,
    /// RNG seed [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of histogram bins [default: 50]
    #[arg(long)]
    pub bins: Option<usize>,
    /// Left edge of the histogram; derived from quantiles when omitted
    #[arg(long)]
    pub bin_min: Option<f64>,
    /// Bin width; derived from quantiles when omitted
    #[arg(long)]
    pub bin_width: Option<f64>,
}

#[derive(Debug, Parser)]
#[command(name = "toa", version, about = "Arrival-time statistics for free-falling Gaussian packets")]
pub struct Cli {
    /// Flat key = value file supplying defaults for any long flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the initial spread and tabulate uncertainty products
    Scan(ScanArgs),
    /// Tabulate the arrival-time density and CDF on a quantile-spanned grid
    Pdf(PdfArgs),
    /// Check the uncertainty bounds over a (q, sigma/x) grid
    Verify(VerifyArgs),
    /// Run a measurement-protocol Monte Carlo and compare to the analytic law
    Simulate(SimulateArgs),
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let cfg = match config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Scan(args) => commands::scan::run(&args, &cfg),
        Command::Pdf(args) => commands::pdf::run(&args, &cfg),
        Command::Verify(args) => commands::verify::run(&args, &cfg),
        Command::Simulate(args) => commands::simulate::run(&args, &cfg),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
