//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "rqsl",
    version,
    about = "Reverse quantum speed limit and minimum Hilbert-space norm laboratory"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; each overrides the `--config` file, which
/// overrides the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Reduced Planck constant (natural units by default)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub hbar: Option<f64>,
    /// Minimum time step Δt_min
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub dt_min: Option<f64>,
    /// Seed for random ensembles
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the result table here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form models
    #[command(subcommand)]
    Model(ModelCommand),
    /// Check the bounds over a seeded ensemble of random systems
    Verify(VerifyArgs),
    /// Norms and lengths over a log-spaced grid of time steps
    Sweep(SweepArgs),
    /// Remove detector branches whose norm falls below a threshold
    Preclude(PrecludeArgs),
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// Two-level system with a diagonal Hamiltonian
    TwoState(TwoStateArgs),
    /// System measured by a two-state observer
    Detector(DetectorArgs),
}

/// System amplitudes. Given both, the pair is normalized; given one, the other is
/// taken real and non-negative so the pair has unit norm; given none, both are `1/√2`.
#[derive(Debug, Clone, Default, Args)]
pub struct AmplitudeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    /// Imaginary part of c1
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub c1_im: f64,
    /// Imaginary part of c2
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub c2_im: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TwoStateArgs {
    #[command(flatten)]
    pub amplitudes: AmplitudeArgs,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub e1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub e2: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DetectorArgs {
    #[command(flatten)]
    pub amplitudes: AmplitudeArgs,
    /// Observer coupling κ
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub kappa: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Scale applied to the random Hamiltonians
    #[arg(long, default_value_t = 1.0)]
    pub energy_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepModel {
    TwoState,
    Detector,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SweepModel::Detector)]
    pub model: SweepModel,
    #[command(flatten)]
    pub amplitudes: AmplitudeArgs,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub e1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub e2: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub kappa: f64,
    /// Smallest step, as a fraction of Δt_char
    #[arg(long, default_value_t = 1e-5)]
    pub min_fraction: f64,
    /// Largest step, as a fraction of Δt_char
    #[arg(long, default_value_t = 1e-1)]
    pub max_fraction: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 41)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PrecludeArgs {
    #[command(flatten)]
    pub amplitudes: AmplitudeArgs,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub kappa: f64,
    /// Branch norm threshold; defaults to Δt_min·ΔH/ħ of the detector run
    #[arg(long, allow_hyphen_values = true)]
    pub norm_min: Option<f64>,
    /// Keep the surviving superposition unnormalized
    #[arg(long)]
    pub no_renormalize: bool,
}
