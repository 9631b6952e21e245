use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "semijacobi",
    version,
    about = "Recurrence data, Hankel determinants and identity checks for the weight (1-x^2)^alpha exp(-t x^2) on [-1, 1]"
)]
pub struct Cli {
    /// Significant digits two successive precisions must agree to.
    #[arg(long, global = true, env = "SEMIJACOBI_DIGITS", default_value_t = 25)]
    pub digits: u32,

    /// Starting mantissa bits; sized from the table by default.
    #[arg(long, global = true, env = "SEMIJACOBI_BITS")]
    pub bits: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write h_n, beta_n, p(n, t), ln D_n and the auxiliary R_n, r_n, H_n as CSV.
    Table(TableArgs),
    /// Run a residual suite and report the largest residuals as JSON.
    Verify(VerifyArgs),
    /// Compare the table with a large-n expansion over a doubling ladder of n.
    Asymptotics(AsymptoticsArgs),
    /// Integrate the first-order system for (R_n, r_n) from pipeline initial data.
    Riccati(RiccatiArgs),
    /// Iterate the beta_n recurrence forward and compare with the table.
    Iterate(IterateArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub t: Vec<f64>,
    #[arg(long)]
    pub n_max: usize,
    /// Factor the moment matrix whole or as its even and odd halves.
    #[arg(long, value_enum, default_value_t = PathArg::Full)]
    pub path: PathArg,
    /// Output directory; without it a single table goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Full,
    EvenOdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Difference,
    Ode,
    Painleve,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Difference => "difference",
            Suite::Ode => "ode",
            Suite::Painleve => "painleve",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Defaults: 0.5,1.5 (identities, difference), 0.5,1 (ode), 0.5 (painleve).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,
    /// Parameter values for the algebraic checks; default 0.1,1,5.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
    /// Largest degree for the algebraic checks.
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    /// Degrees for the differential checks; default 3,5 (ode) or 3,4 (painleve).
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub t_start: f64,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    pub t_end: f64,
    /// Number of grid centres for the differential checks.
    #[arg(long, default_value_t = 9)]
    pub points: usize,
    /// Finite-difference step; a power of two matched to the precision by default.
    #[arg(long)]
    pub step: Option<f64>,
    /// Test hook: add DELTA to beta_N before checking, as N:DELTA.
    #[arg(long, hide = true)]
    pub corrupt_beta: Option<String>,
    /// JSON report path; stdout by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    Beta,
    P,
    Hankel,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    #[arg(value_enum)]
    pub quantity: QuantityArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = 64)]
    pub n_min: usize,
    #[arg(long, default_value_t = 512)]
    pub n_max: usize,
    /// Accepted distance of the fitted slope from the expected order.
    #[arg(long, default_value_t = 0.3)]
    pub slope_tolerance: f64,
    /// Error table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON summary path; stdout by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RiccatiArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub t_start: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t_end: f64,
    /// Record the trajectory at roughly this spacing.
    #[arg(long)]
    pub dense_step: Option<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    /// Largest accepted gap to the pipeline at t_end.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Trajectory as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    /// Largest accepted relative gap to the table.
    #[arg(long, default_value_t = 1e-15)]
    pub tolerance: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
