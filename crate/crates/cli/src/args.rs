use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "t4flow", version, about = "Melnikov integral and Lie-Poisson reduction for left-invariant flows on t4")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quadrature value of I and Forest-Ruth energy drift for a list of steps.
    Table1(Table1Args),
    /// Phase angle B and I by both methods over a uniform alpha grid.
    Scan(ScanArgs),
    /// Reduce a diagonal metric on a coadjoint orbit to (lambda, mu, xi, omega, nu, c, alpha).
    Reduce(ReduceArgs),
    /// Integrate the Euler equations with RK4 and report Casimir and energy drift.
    Euler(EulerArgs),
    /// Run an invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Comma-separated step sizes.
    #[arg(long = "h", value_delimiter = ',', default_values_t = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125])]
    pub steps: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "T", default_value_t = 35.0)]
    pub horizon: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub alpha_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 96)]
    pub steps: usize,
    /// Forest-Ruth step of the quadrature column.
    #[arg(long = "h", default_value_t = 0.0078125)]
    pub quad_step: f64,
    /// RK4 step of the phase-angle column.
    #[arg(long, default_value_t = 1e-3)]
    pub phase_step: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct MetricArgs {
    #[arg(long, default_value_t = 1.0)]
    pub a12: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a13: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a14: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a23: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a24: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a34: f64,
    /// Start from a named metric; explicit coefficients are ignored.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// All coefficients 1.
    Riemannian,
    /// a12 = a23 = a34 = 1, the rest 0.
    Subriemannian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pretty,
    Csv,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub k1: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub k2: f64,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EulerArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    /// Initial momenta pu,pv,pw,px,py,pz.
    #[arg(long = "p", value_delimiter = ',', allow_hyphen_values = true,
          default_values_t = [0.3, -0.7, 1.0, 0.5, 0.8, -0.4])]
    pub initial: Vec<f64>,
    #[arg(long = "h", default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long = "T", default_value_t = 100.0)]
    pub horizon: f64,
    /// Emit every n-th sample.
    #[arg(long, default_value_t = 1000)]
    pub stride: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Poisson,
    Separatrix,
    Variational,
    Melnikov,
    Splitting,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub output: Output,
}
