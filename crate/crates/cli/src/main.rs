//! `densefit`: batch pipeline around the dense-network interpolator.
//!
//! Subcommands: `train`, `predict`, `derivative`, `compare`. Every run
//! writes a `manifest.json` with the fully resolved configuration; given
//! the same inputs and seeds, re-running reproduces the data outputs byte
//! for byte. Errors come out as one JSON line on stderr with a nonzero
//! exit code.

mod commands;
mod manifest;
mod svg;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "densefit",
    version,
    about = "Interpolate and denoise sensor time series with an overfit dense network, next to classical baselines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the dense interpolator to a Time,Message CSV
    Train(TrainArgs),
    /// Evaluate a saved model over a dense time grid
    Predict(PredictArgs),
    /// Finite-difference derivative of a Time,Message CSV
    Derivative(DerivativeArgs),
    /// Race interpolation methods on a benchmark and report metrics
    Compare(CompareArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Input Time,Message CSV
    input: PathBuf,

    /// Training epochs
    #[arg(long, default_value_t = 1000)]
    epochs: usize,

    /// Seed for weight init and shuffling
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// "full" or a mini-batch size
    #[arg(long, default_value = "full")]
    batch: String,

    /// Adam learning rate
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,

    /// Trust the input to already lie on [0, 1] on both axes
    #[arg(long)]
    already_normalized: bool,

    /// Layer stack: comma-separated width + L (linear) or R (relu)
    #[arg(long, default_value = "1L,128R,64R,32R,64R,128R,1L")]
    arch: String,

    /// Output directory
    #[arg(short = 'o', long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// A .model.json file produced by `train`
    model: PathBuf,

    /// Number of grid points
    #[arg(long, default_value_t = 10_000)]
    points: usize,

    /// Rebuild the grid from this CSV's times instead of the stored hint
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Output directory
    #[arg(short = 'o', long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct DerivativeArgs {
    /// Input Time,Message CSV
    input: PathBuf,

    /// Output directory
    #[arg(short = 'o', long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CompareSource {
    /// "default" for the built-in benchmark, or a TOML spec file
    #[arg(long)]
    synthetic: Option<String>,

    /// Measure against a real Time,Message CSV (no clean reference:
    /// RMSE is reported against the observations themselves)
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    source: CompareSource,

    /// Methods to race
    #[arg(long, value_delimiter = ',', default_value = "linear,neural,polynomial,spline")]
    methods: Vec<String>,

    /// Dense grid size for the derivative comparison
    #[arg(long, default_value_t = 10_000)]
    points: usize,

    /// Training epochs for the neural method
    #[arg(long, default_value_t = 1000)]
    epochs: usize,

    /// Seed for the neural method
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// "full" or a mini-batch size
    #[arg(long, default_value = "full")]
    batch: String,

    /// Adam learning rate
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,

    /// Output directory
    #[arg(short = 'o', long, default_value = "out")]
    out_dir: PathBuf,
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => commands::train(args),
        Command::Predict(args) => commands::predict(args),
        Command::Derivative(args) => commands::derivative(args),
        Command::Compare(args) => commands::compare(args),
    };
    if let Err(error) = result {
        eprintln!("{}", serde_json::json!({ "error": error.to_string() }));
        std::process::exit(1);
    }
}
