//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "capgen",
    version,
    about = "Random generation, verification and conversion of fuzzy measures"
)]
pub struct Cli {
    /// Worker threads; overrides the CAPGEN_THREADS environment variable.
    /// Defaults to available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a batch of oracle-verified measures as JSONL records
    Gen(GenArgs),
    /// Check records against their tags (or an explicit class)
    Verify(VerifyArgs),
    /// Reproduce the repetition-ratio table as CSV
    Experiment(ExperimentArgs),
    /// Exhaustively enumerate linear extensions (n <= 4)
    Enumerate(EnumerateArgs),
    /// Emit the dual of every record with dual-mapped tags
    Dual(DualArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Measure class: normal | supermodular | antibuoyant | superadditive |
    /// p-symmetric | k-tolerant | k-interactive | k-maxitive | k-additive |
    /// k-nonadditive | k-nonmodular
    #[arg(long)]
    pub class: String,

    /// Number of elements in the ground set (2..=26)
    #[arg(long)]
    pub n: usize,

    /// Records to generate
    #[arg(long, default_value_t = 1)]
    pub count: usize,

    /// Base seed; record i uses RNG stream (seed, i)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Interaction order for the k-classes
    #[arg(long)]
    pub k: Option<usize>,

    /// Plateau level K in [0, 1] for k-interactive measures
    #[arg(short = 'K', long = "K", value_name = "K")]
    pub interaction: Option<f64>,

    /// Indifference blocks for p-symmetric measures, 1-based with blocks
    /// separated by '|' and elements by ',': e.g. "1,2|3"
    #[arg(long)]
    pub partition: Option<String>,

    /// Structural class enforced on the p-symmetric quotient:
    /// normal | supermodular | superadditive
    #[arg(long, default_value = "normal")]
    pub inner_class: String,

    /// Random-walk steps per record
    #[arg(long, default_value_t = 5)]
    pub walk_steps: usize,

    /// Shift magnitude as a fraction in (0, 1) of its feasibility bound
    #[arg(long, default_value_t = 0.3)]
    pub eta_fraction: f64,

    /// Allowable-range adjustment rounds (default: 2^n)
    #[arg(long)]
    pub adjust_rounds: Option<usize>,

    /// Make every defining inequality strict where the class supports it
    #[arg(long)]
    pub strict: bool,

    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    pub format: String,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Record file to verify
    #[arg(long)]
    pub input: PathBuf,

    /// Verify against this class instead of each record's own tags
    #[arg(long)]
    pub class: Option<String>,

    /// Interaction order when --class names a k-class
    #[arg(long)]
    pub k: Option<usize>,

    /// Plateau level for k-interactive verification
    #[arg(short = 'K', long = "K", value_name = "K")]
    pub interaction: Option<f64>,

    /// Partition for p-symmetric verification, e.g. "1,2|3"
    #[arg(long)]
    pub partition: Option<String>,

    /// Class-membership tolerance
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Smallest ground-set size
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,

    /// Largest ground-set size
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,

    /// Batch size per row (default: the published per-n sizes
    /// 20 / 1000 / 10000 / 100000)
    #[arg(long)]
    pub num: Option<usize>,

    /// Iterations to average over
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    pub format: String,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    /// Ground-set size (1..=4)
    #[arg(long)]
    pub n: usize,

    /// Print only the number of extensions
    #[arg(long)]
    pub count_only: bool,

    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DualArgs {
    /// Record file to dualize
    #[arg(long)]
    pub input: PathBuf,

    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Tolerance for re-verifying the dual-mapped tags
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}
