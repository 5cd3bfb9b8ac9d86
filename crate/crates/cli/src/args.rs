use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dlpad::{ModelParams, Sector};

use crate::table::Format;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "dlpad", version, about = "Activity cumulants of the DLPAD process on a ring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical cumulants κ^c_n(L) against their large-L coefficients.
    Cumulants(CumulantsArgs),
    /// Near-critical scaling collapse of L²K̃_0(L, u).
    Collapse(CollapseArgs),
    /// Closed forms against exact diagonalization and finite differences.
    OracleCheck(OracleArgs),
    /// Kinetic Monte Carlo of the untilted process.
    Simulate(SimulateArgs),
    /// Trigonometric sums Φ_m(N): closed form against two-term asymptotics.
    PhiTable(PhiArgs),
}

/// Either `--nu` (with `w = 1/2`) or the raw pair `--w`, `--mu`.
#[derive(Debug, Clone, Args)]
pub struct RateArgs {
    /// Complementary deposition rate 1 - mu/w, at w = 1/2.
    #[arg(long, conflicts_with_all = ["w", "mu"])]
    pub nu: Option<f64>,
    /// Jump rate (requires --mu).
    #[arg(long, requires = "mu")]
    pub w: Option<f64>,
    /// Pair deposition rate (requires --w).
    #[arg(long, requires = "w")]
    pub mu: Option<f64>,
}

impl RateArgs {
    pub fn resolve(&self, default_nu: f64) -> Result<ModelParams, CliError> {
        let p = match (self.nu, self.w, self.mu) {
            (Some(nu), None, None) => ModelParams::from_nu(nu),
            (None, Some(w), Some(mu)) => ModelParams::new(w, mu),
            (None, None, None) => ModelParams::from_nu(default_nu),
            _ => return Err(CliError::Usage("give either --nu or both --w and --mu".into())),
        };
        p.map_err(CliError::from)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SectorArg {
    Even,
    Odd,
}

impl From<SectorArg> for Sector {
    fn from(s: SectorArg) -> Self {
        match s {
            SectorArg::Even => Sector::Even,
            SectorArg::Odd => Sector::Odd,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CumulantsArgs {
    #[command(flatten)]
    pub rates: RateArgs,
    /// Ring sizes (even).
    #[arg(long = "L", value_delimiter = ',', default_values_t = [1024usize, 2048, 4096])]
    pub sizes: Vec<usize>,
    /// Cumulant orders.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4])]
    pub orders: Vec<usize>,
    #[arg(long, value_enum, default_value = "even")]
    pub sector: SectorArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CollapseArgs {
    #[command(flatten)]
    pub rates: RateArgs,
    #[arg(long = "L", value_delimiter = ',', default_values_t = [64usize, 128, 256])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub u_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub u_max: f64,
    #[arg(long, default_value_t = 61)]
    pub u_steps: usize,
    /// Truncation tolerance of h.
    #[arg(long, default_value_t = dlpad::asymptotics::DEFAULT_SCALING_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Values of nu (w = 1/2).
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["w", "mu"])]
    pub nu: Vec<f64>,
    #[arg(long, requires = "mu")]
    pub w: Option<f64>,
    #[arg(long, requires = "w")]
    pub mu: Option<f64>,
    #[arg(long = "L", value_delimiter = ',', default_values_t = [4usize, 6, 8, 10])]
    pub sizes: Vec<usize>,
    /// Tilts; defaults to 0, s_c and s_c ± 0.2.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s: Vec<f64>,
    /// Restrict to one parity sector.
    #[arg(long, value_enum)]
    pub sector: Option<SectorArg>,
    /// Tolerance on |K_formula - K_ED|.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Tolerance on the first derivative against finite differences.
    #[arg(long, default_value_t = 1e-8)]
    pub fd_tol: f64,
    /// Add this to one diagonal matrix element (negative control).
    #[arg(long)]
    pub perturb: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub rates: RateArgs,
    #[arg(long = "L", default_value_t = 64)]
    pub size: usize,
    #[arg(long, default_value_t = 1e4)]
    pub t_max: f64,
    #[arg(long, default_value_t = 16)]
    pub replicas: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Fraction of t_max discarded before measuring.
    #[arg(long, default_value_t = dlpad::mc::McConfig::DEFAULT_BURN_IN_FRACTION)]
    pub burn_in: f64,
    /// Largest accepted |z| against theory.
    #[arg(long, default_value_t = 3.0)]
    pub z_max: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PhiArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0u32, 1, 2, 3, 4, 5])]
    pub m: Vec<u32>,
    #[arg(long = "N", value_delimiter = ',', default_values_t = [4u64, 8, 16, 32, 64])]
    pub n: Vec<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}
