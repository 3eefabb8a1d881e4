use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// System name plus the parameters the named family needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
pub struct SystemArgs {
    /// System name; see `zscale systems` for the catalogue.
    #[arg(long)]
    pub system: String,
    /// First family parameter (integer p for substitutions, probability for stochastic models).
    #[arg(long)]
    pub p: Option<f64>,
    /// Second family parameter.
    #[arg(long)]
    pub q: Option<f64>,
    /// Random tiling length of the first tile.
    #[arg(long)]
    pub u: Option<f64>,
    /// Random tiling length of the second tile.
    #[arg(long)]
    pub v: Option<f64>,
    /// Random-matrix ensemble index (1, 2 or 4).
    #[arg(long)]
    pub beta: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    /// Half-width R of the patch [−R, R].
    #[arg(long, default_value_t = 100.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
pub struct ZscanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    /// Anchor k₀ of the scan; defaults depend on the system.
    #[arg(long)]
    pub k0: Option<f64>,
    /// Scan ratio: a number, `golden`, `silver`, or `auto` (the system's natural base).
    #[arg(long, default_value = "auto")]
    pub ratio: String,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// Peak cut |κ·κ⋆| for pure-point systems.
    #[arg(long, default_value_t = 50.0)]
    pub kstar_cut: f64,
    /// Square-free generator count.
    #[arg(long = "S", default_value_t = 8192)]
    pub generators: usize,
    /// Smallest k of the square-free diagnostic.
    #[arg(long, default_value_t = 1e-4)]
    pub kmin: f64,
    /// Largest k of the square-free diagnostic.
    #[arg(long, default_value_t = 0.1)]
    pub kmax: f64,
    /// Point count of the square-free diagnostic.
    #[arg(long, default_value_t = 12)]
    pub count: usize,
    /// Thue–Morse Fourier series length.
    #[arg(long, default_value_t = 1 << 18)]
    pub terms: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    Power,
    LogQuadratic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
pub struct FitArgs {
    /// Scan CSV with columns `k` and `ln_Z` (or `Z`).
    #[arg(long, conflicts_with = "catalogue", required_unless_present = "catalogue")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FitModel::Power)]
    pub model: FitModel,
    /// Predicted exponent to test the power fit against.
    #[arg(long)]
    pub predicted: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub tol: f64,
    /// Leading samples to drop before fitting.
    #[arg(long, default_value_t = 0)]
    pub skip: usize,
    /// Measure the built-in catalogue instead of reading a scan.
    #[arg(long)]
    pub catalogue: bool,
    /// Comma-separated subset of the catalogue.
    #[arg(long, value_delimiter = ',')]
    pub systems: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
pub struct LyapunovArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    /// Also measure the Fourier-matrix cocycle spectrum at this k.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
pub struct McArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 1e5)]
    pub radius: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest k of the comparison grid.
    #[arg(long, default_value_t = 0.3)]
    pub kmax: f64,
    /// Grid points in (0, kmax].
    #[arg(long, default_value_t = 10)]
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
pub struct TmBoundsArgs {
    /// Deepest level n.
    #[arg(long)]
    pub n: u32,
    /// First level; defaults to n.
    #[arg(long)]
    pub from: Option<u32>,
    /// Odd coefficients used for β.
    #[arg(long, default_value_t = 100_000)]
    pub beta_terms: usize,
    /// Fourier series length for the F estimate; 0 skips it.
    #[arg(long, default_value_t = 1 << 18)]
    pub series_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Write a patch or realisation on [−R, R].
    Generate(GenerateArgs),
    /// Evaluate Z(k) on a geometric scan.
    Zscan(ZscanArgs),
    /// Fit a scaling law to a scan, or measure the whole catalogue.
    Fit(FitArgs),
    /// Lyapunov spectrum and predicted exponent of a substitution.
    Lyapunov(LyapunovArgs),
    /// Monte Carlo Z against the analytic curve.
    Mc(McArgs),
    /// Thue–Morse bracket at dyadic scales.
    TmBounds(TmBoundsArgs),
    /// List every catalogued system.
    Systems,
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default)]
    pub format: Format,
    /// Output file; falls back to the output directory, then stdout.
    #[serde(default)]
    pub out: Option<PathBuf>,
}
