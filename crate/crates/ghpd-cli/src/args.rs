use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "ghpd",
    version,
    about = "Exact credible sets for discrete parameters, QDA classification, and steering-wheel plots"
)]
pub struct Cli {
    /// Flat `key = value` file supplying defaults; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the fair credible set of a posterior (JSON/CSV) or grid (JSON)
    Compute(ComputeArgs),
    /// Generate the seeded three-class benchmark, classify it, and render the panel
    Simulate(SimulateArgs),
    /// Fit QDA on a training CSV, classify a test CSV, and persist the model
    Classify(ClassifyArgs),
    /// Render a steering-wheel SVG from a credible-set JSON document
    Wheel(WheelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Svg,
    Both,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Posterior JSON ({"labels","probs"|"weights"}), posterior CSV
    /// (label,prob), or grid JSON ({"lo","hi","step","density"})
    #[arg(long)]
    pub input: PathBuf,
    /// Output path; stdout when omitted (json or svg only)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Miscoverage level in (0,1)
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Override the lower endpoint of a grid input
    #[arg(long)]
    pub grid_lo: Option<f64>,
    /// Override the upper endpoint of a grid input
    #[arg(long)]
    pub grid_hi: Option<f64>,
    /// Override the cell width of a grid input
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Hub label for the wheel output; defaults to the argmax label
    #[arg(long)]
    pub hub: Option<String>,
    /// Canvas size for SVG output
    #[arg(long)]
    pub size_px: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Directory receiving dataset.csv, records.jsonl, and panel.svg
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Samples drawn per class
    #[arg(long)]
    pub per_class: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Training CSV with header `f1,...,fd,label`
    #[arg(long)]
    pub train: PathBuf,
    /// Test CSV with header `f1,...,fd[,label]`
    #[arg(long)]
    pub test: PathBuf,
    /// Directory receiving predictions.jsonl, model.json, and wheels/
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Explicit class priors as label=p,label=p (default: class frequencies)
    #[arg(long)]
    pub priors: Option<String>,
    /// Canvas size for per-row wheel SVGs
    #[arg(long)]
    pub size_px: Option<u32>,
}

#[derive(Debug, Args)]
pub struct WheelArgs {
    /// Credible-set JSON document
    #[arg(long)]
    pub input: PathBuf,
    /// Output SVG path; stdout when omitted
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Hub label; defaults to the first interior (then boundary) label
    #[arg(long)]
    pub hub: Option<String>,
    #[arg(long)]
    pub size_px: Option<u32>,
}
