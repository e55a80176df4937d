//! Command-line front end for `hypermult-core`.
//!
//! Structured reports are written as JSON and grids as CSV; every command is
//! deterministic given its flags and seed. Exit codes: 0 success,
//! 1 verification failure, 2 input/schema error, 3 domain or parameter error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

pub use commands::run;
pub use report::{write_checks_csv, write_cloud_csv, write_sweep_csv, read_cloud_csv};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<hypermult_core::Error> for CliError {
    fn from(e: hypermult_core::Error) -> Self {
        match e {
            hypermult_core::Error::Descriptor(d) => CliError::Input(d.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hypermult", version, about = "Multiplicity-bound toolkit for closed hyperbolic surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thick-thin decomposition of a pants-graph descriptor.
    Decompose(DecomposeArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Collar mode and cosh^2 ratio suites.
    VerifyModes(VerifyCommon),
    /// Heat-kernel suite.
    VerifyKernel(VerifyCommon),
    /// Greedy separated net on a sampled ball or a CSV point cloud.
    Net(NetArgs),
    /// Evaluate both multiplicity bounds at one parameter point.
    Bounds(BoundsArgs),
    /// Bound comparison over a descriptor family.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Output {
    pub fn writer(&self) -> CliResult<Box<dyn Write>> {
        Ok(match &self.output {
            Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
            None => Box::new(std::io::stdout().lock()),
        })
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Descriptor JSON file.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: Output,
    /// Curves shorter than 2 * epsilon are short.
    #[arg(long)]
    pub epsilon: f64,
    /// Distance trimmed from each collar end.
    #[arg(long, default_value_t = 1.0)]
    pub trim: f64,
}

#[derive(Debug, Args)]
pub struct VerifyCommon {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Mode-solver tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Fault injection: pin mode mass ratios at their ceiling, then scale by this factor.
    #[arg(long = "perturb-ratio", default_value_t = 1.0, hide = true)]
    pub perturb_ratio: f64,
    /// Per-check CSV details; the JSON summary goes to standard output.
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run (repeatable); all when absent.
    #[arg(long = "suite", value_enum)]
    pub suites: Vec<SuiteArg>,
    #[command(flatten)]
    pub common: VerifyCommon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Modes,
    Ratios,
    Kernel,
    Nets,
    Constants,
}

impl From<SuiteArg> for hypermult_core::verify::Suite {
    fn from(s: SuiteArg) -> Self {
        use hypermult_core::verify::Suite;
        match s {
            SuiteArg::Modes => Suite::Modes,
            SuiteArg::Ratios => Suite::Ratios,
            SuiteArg::Kernel => Suite::Kernel,
            SuiteArg::Nets => Suite::Nets,
            SuiteArg::Constants => Suite::Constants,
        }
    }
}

#[derive(Debug, Args)]
pub struct NetArgs {
    /// Point cloud CSV with columns id,x,y (Poincaré disk); sampled when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
    /// Write the point cloud as CSV.
    #[arg(long = "cloud-output")]
    pub cloud_output: Option<PathBuf>,
    /// Curvature scale: curvature is -epsilon^2.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Ball radius for sampling.
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    /// Number of sampled points.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    /// Separation radius.
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Position at which the greedy scan starts.
    #[arg(long = "seed-index", default_value_t = 0)]
    pub seed_index: usize,
}

#[derive(Debug, Args)]
pub struct Constants {
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long = "C-eps")]
    pub c_eps: Option<f64>,
    #[arg(long = "c2")]
    pub c2: Option<f64>,
    #[arg(long = "c3")]
    pub c3: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub genus: u64,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Number of short geodesics N.
    #[arg(long = "n-short", default_value_t = 0)]
    pub n_short: u64,
    /// Number of thick components I.
    #[arg(long = "i-thick", default_value_t = 1)]
    pub i_thick: u64,
    /// Highest dyadic level in the reported schedules.
    #[arg(long = "j-max", default_value_t = 8)]
    pub j_max: u32,
    /// Require the first bound (domain errors become fatal).
    #[arg(long)]
    pub thm1: bool,
    /// Require the second bound (domain errors become fatal).
    #[arg(long)]
    pub thm2: bool,
    #[command(flatten)]
    pub constants: Constants,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// A few non-separating short curves.
    Sparse,
    /// g + 1 short curves cutting the surface in two.
    TwoPiece,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Genera, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub genus: Vec<u32>,
    /// Curvature scales, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub epsilon: Vec<f64>,
    /// Eigenvalues, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 0.45)]
    pub delta: f64,
    /// Length of the short curves.
    #[arg(long = "short-length", default_value_t = 1e-3)]
    pub short_length: f64,
    /// Length of all other curves.
    #[arg(long = "long-length", default_value_t = 2.0)]
    pub long_length: f64,
    #[command(flatten)]
    pub constants: Constants,
    #[command(flatten)]
    pub output: Output,
}

/// Caps the global thread pool from `HYPERMULT_THREADS`, if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("HYPERMULT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Domain(format!("HYPERMULT_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Domain(e.to_string()))
}
