use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "privhalf",
    version,
    about = "Private, certifiably robust halfspace learning",
    args_override_self = true
)]
pub struct Cli {
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Noise level for a target (epsilon, delta) budget.
    Calibrate(CalibrateArgs),
    /// Train a one-vs-rest model and write it as JSON.
    Train(TrainArgs),
    /// Test accuracy, optionally with per-example certified radii.
    Evaluate(EvaluateArgs),
    /// Robust-accuracy curve as CSV.
    Curve(CurveArgs),
    /// Synthetic dataset with a known large-margin separator.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Accountant {
    Rdp,
    Analytic,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    /// Poisson sampling rate q.
    #[arg(long, conflicts_with = "batch_size")]
    pub sampling_rate: Option<f64>,
    /// Expected batch size; requires --n.
    #[arg(long, requires = "n")]
    pub batch_size: Option<usize>,
    /// Dataset size for --batch-size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of noisy steps T.
    #[arg(long)]
    pub steps: u64,
    #[arg(long, value_enum, default_value = "rdp")]
    pub accountant: Accountant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Perceptron,
    PerceptronFixed,
    Expmech,
    DpsgdHinge,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Perceptron => "perceptron",
            Algo::PerceptronFixed => "perceptron-fixed",
            Algo::Expmech => "expmech",
            Algo::DpsgdHinge => "dpsgd-hinge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pixel,
    #[value(name = "unit_ball")]
    UnitBall,
}

#[derive(Debug, Args)]
pub struct TrainInput {
    /// IDX image file (optionally gzipped).
    #[arg(long, requires = "train_labels", conflicts_with = "train_libsvm")]
    pub train_images: Option<PathBuf>,
    #[arg(long, requires = "train_images")]
    pub train_labels: Option<PathBuf>,
    /// libsvm text file (optionally gzipped); requires --dim.
    #[arg(long, requires = "dim")]
    pub train_libsvm: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: TrainInput,
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long, required_unless_present = "no_privacy")]
    pub epsilon: Option<f64>,
    #[arg(long, required_unless_present = "no_privacy")]
    pub delta: Option<f64>,
    /// Train without noise.
    #[arg(long, conflicts_with_all = ["epsilon", "delta"])]
    pub no_privacy: bool,
    /// Training margin.
    #[arg(long, default_value_t = 0.01)]
    pub gamma_prime: f64,
    /// Expected batch size B; the sampling rate is B / n.
    #[arg(long, default_value_t = 500)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1)]
    pub epochs: u64,
    /// Iteration budget for the early-stopping perceptron (default: epochs * ceil(n / B)).
    #[arg(long)]
    pub steps: Option<u64>,
    /// Target accuracy driving the early-stop threshold.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Candidate count for the exponential mechanism.
    #[arg(long, default_value_t = 4096)]
    pub candidates: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Gaussian kernel width; enables random Fourier features.
    #[arg(long)]
    pub kernel_width: Option<f64>,
    /// Number of random frequencies (features are twice this).
    #[arg(long, default_value_t = privhalf::kernel::DEFAULT_KERNEL_DIM)]
    pub kernel_dim: usize,
    #[arg(long, value_enum, default_value = "pixel")]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TestInput {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, requires = "test_labels", conflicts_with = "test_libsvm")]
    pub test_images: Option<PathBuf>,
    #[arg(long, requires = "test_images")]
    pub test_labels: Option<PathBuf>,
    #[arg(long)]
    pub test_libsvm: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: TestInput,
    /// Write `index,true_class,predicted_class,radius` rows here.
    #[arg(long)]
    pub radii_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub input: TestInput,
    #[arg(long, default_value_t = 2.0)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 50)]
    pub gamma_steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// libsvm output (labels -1 and 1).
    #[arg(long)]
    pub out: PathBuf,
    /// JSON file receiving the separator.
    #[arg(long)]
    pub w_out: PathBuf,
}
