//! `qspace`: experiment runner for the qspace laboratory.
//!
//! Exit codes: 0 success, 1 a suite criterion failed, 2 invalid configuration
//! or input, 3 a result that did not converge when `--require-convergence` is set.

mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    NotConverged(String),
    Failed(String),
    Runtime(String),
}

impl CliError {
    pub fn config(e: qspace::Error) -> Self {
        match e {
            qspace::Error::NotConverged { .. } => CliError::NotConverged(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) | CliError::Runtime(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::NotConverged(m) => write!(f, "not converged: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
            CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qspace", version, about = "Seminorms, Carleson tests, constructions and spectra for Q-type spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// JSON configuration file; flags take precedence over its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for the JSON report and CSV files. Without it the report goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Finest dyadic level of the supremum search.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Exit with status 3 when a quadrature or profile does not converge.
    #[arg(long, global = true)]
    pub require_convergence: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one seminorm of a function file.
    Seminorm(SeminormArgs),
    /// Carleson tests and trend slopes for a measure or point sequence.
    Carleson(CarlesonArgs),
    /// Emit one of the explicit constructions.
    Construct(ConstructArgs),
    /// Classify multiplier regimes for one parameter tuple or the default grid.
    Regime(RegimeArgs),
    /// Check the multiplier condition for a boundary function.
    Multiplier(MultiplierArgs),
    /// Essential range or image closure of a function.
    Spectrum(SpectrumArgs),
    /// Evaluate a batch of lemma inequalities.
    Verify(VerifyArgs),
    /// Run the acceptance criteria.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeminormKind {
    QpsBoundary,
    LogWeighted,
    Mobius,
    Gradient,
    Bmo,
    Bp,
    Disk,
    Bloch,
    LacunaryProxy,
}

#[derive(Debug, Args)]
pub struct SeminormArgs {
    #[arg(long, value_enum)]
    pub kind: SeminormKind,
    /// Function file.
    #[arg(long)]
    pub f: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Sector,
    Mobius,
}

#[derive(Debug, Args)]
pub struct CarlesonArgs {
    /// Measure file (`atoms`) or point sequence file (`points`).
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Exponents to test. For a point sequence each exponent also sets the
    /// zero-measure weight `(1 - |z|)^γ`.
    #[arg(long, num_args = 1..)]
    pub exponent_pair: Vec<f64>,
    #[arg(long, value_enum, default_value = "sector")]
    pub form: FormArg,
    /// Logarithmic weight exponent.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Dyadic levels used for the trend slope.
    #[arg(long, num_args = 2, default_values_t = [4usize, 13])]
    pub trend_levels: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    Kc,
    LacunaryG,
    LacunaryH,
    LogTest,
    ZeroSet,
    Randomization,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub kind: ConstructKind,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    /// Point of the disk for the log test function, as `RE IM`.
    #[arg(long, num_args = 2, allow_negative_numbers = true)]
    pub w: Option<Vec<f64>>,
    /// Lacunary series to randomize.
    #[arg(long)]
    pub f: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegimeArgs {
    /// `default` for the 5 x 5 x 9 x 9 grid.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MultiplierArgs {
    #[arg(long)]
    pub f: Option<PathBuf>,
    #[arg(long)]
    pub p1: f64,
    #[arg(long)]
    pub p2: f64,
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Boundary,
    Analytic,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub f: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "boundary")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0.05)]
    pub cell: f64,
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON array of inequality instances.
    #[arg(long)]
    pub inputs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Criterion ids to run; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("qspace: {e}");
            return ExitCode::from(2);
        }
    }
    let result = config::load(&cli.global).and_then(|settings| commands::run(&cli.command, &settings));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qspace: {e}");
            ExitCode::from(e.code())
        }
    }
}
