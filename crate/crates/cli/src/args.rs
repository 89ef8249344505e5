use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "renyi-reach", version, about = "Spectral bounds on quantum state transformations, with Monte-Carlo verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the bound family for explicit or sampled spectrum pairs.
    Bound(BoundArgs),
    /// Run a Monte-Carlo campaign checking divergences and majorization.
    Verify(CampaignArgs),
    /// Run a Monte-Carlo campaign checking the fluctuation bound under random measurements.
    Tur(CampaignArgs),
    /// Run a repeated-interaction estimation experiment against the precision bound.
    Estimate(EstimateArgs),
    /// Check that the extremal interaction saturates the divergence bound.
    Saturate(SaturateArgs),
    /// Search interaction space for the largest attainable divergence.
    Probe(ProbeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, clap::Args)]
pub struct BoundArgs {
    /// System spectrum as comma-separated probabilities.
    #[arg(long = "lambda-s", value_delimiter = ',', num_args = 1..)]
    pub lambda_s: Option<Vec<f64>>,
    /// Environment spectrum as comma-separated probabilities.
    #[arg(long = "lambda-e", value_delimiter = ',', num_args = 1..)]
    pub lambda_e: Option<Vec<f64>>,
    /// Divergence orders to evaluate.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub alpha: Vec<f64>,
    /// Repetition counts for the estimator bound.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1")]
    pub r: Vec<u32>,
    /// Sample this many random spectrum pairs instead of using an explicit pair.
    #[arg(long, conflicts_with_all = ["lambda_s", "lambda_e"])]
    pub samples: Option<u64>,
    /// System dimension for sampled spectra.
    #[arg(long = "ds")]
    pub d_s: Option<usize>,
    /// Environment dimension for sampled spectra.
    #[arg(long = "de")]
    pub d_e: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Override every numerical tolerance with this value.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, clap::Args)]
pub struct CampaignArgs {
    /// JSON file with campaign settings; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "ds")]
    pub d_s: Option<usize>,
    #[arg(long = "de")]
    pub d_e: Option<usize>,
    /// Divergence orders checked each trial.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub alpha: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// State ensemble: hilbert-schmidt, fixed-spectra, or explicit.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// System spectrum for the fixed-spectra and explicit ensembles.
    #[arg(long = "lambda-s", value_delimiter = ',', num_args = 1..)]
    pub lambda_s: Option<Vec<f64>>,
    /// Environment spectrum for the fixed-spectra and explicit ensembles.
    #[arg(long = "lambda-e", value_delimiter = ',', num_args = 1..)]
    pub lambda_e: Option<Vec<f64>>,
    /// Measurement outcomes per sampled observable.
    #[arg(long = "povm-outcomes")]
    pub povm_outcomes: Option<usize>,
    /// Include every trial record instead of the ten worst margins.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, clap::Args)]
pub struct EstimateArgs {
    /// JSON file with experiment settings; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "lambda-s", value_delimiter = ',', num_args = 1..)]
    pub lambda_s: Option<Vec<f64>>,
    #[arg(long = "lambda-e", value_delimiter = ',', num_args = 1..)]
    pub lambda_e: Option<Vec<f64>>,
    /// True interaction parameter generating the data.
    #[arg(long = "theta-true")]
    pub theta_true: Option<f64>,
    /// Reference parameter at which the dynamics fix the input state.
    #[arg(long = "theta0")]
    pub theta_0: Option<f64>,
    /// Interaction repetitions per experiment, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub r: Option<Vec<u32>>,
    /// Independent experiments per repetition count.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long = "grid-min")]
    pub grid_min: Option<f64>,
    #[arg(long = "grid-max")]
    pub grid_max: Option<f64>,
    #[arg(long = "grid-step")]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, clap::Args)]
pub struct SaturateArgs {
    #[arg(long = "lambda-s", value_delimiter = ',', num_args = 1.., required = true)]
    pub lambda_s: Vec<f64>,
    #[arg(long = "lambda-e", value_delimiter = ',', num_args = 1.., required = true)]
    pub lambda_e: Vec<f64>,
    /// Divergence orders at which saturation is checked.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.5,0.9,1.5,2")]
    pub alpha: Vec<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, clap::Args)]
pub struct ProbeArgs {
    #[arg(long = "lambda-s", value_delimiter = ',', num_args = 1.., required = true)]
    pub lambda_s: Vec<f64>,
    #[arg(long = "lambda-e", value_delimiter = ',', num_args = 1.., required = true)]
    pub lambda_e: Vec<f64>,
    /// Divergence order to maximize.
    #[arg(long, required = true)]
    pub alpha: f64,
    #[arg(long)]
    pub restarts: Option<u32>,
    /// Objective evaluations allowed per restart.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}
