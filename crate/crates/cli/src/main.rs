use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod bench;
mod check;
mod run;

/// Parameter-free clustering with self-adaptive noise identification.
#[derive(Parser)]
#[command(name = "sarfc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one dataset and report the estimated cluster count and scores.
    Run(RunArgs),
    /// Cluster every dataset of a manifest and print a results table.
    Bench(BenchArgs),
    /// Run the randomized property checks.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DistanceArg {
    Auto,
    Full,
    Streamed,
}

impl From<DistanceArg> for sarfc::DistanceMode {
    fn from(d: DistanceArg) -> Self {
        match d {
            DistanceArg::Auto => sarfc::DistanceMode::Auto,
            DistanceArg::Full => sarfc::DistanceMode::Full,
            DistanceArg::Streamed => sarfc::DistanceMode::Streamed,
        }
    }
}

#[derive(Args)]
pub struct PipelineArgs {
    /// Override the robustness order r.
    #[arg(long)]
    r: Option<usize>,
    /// Skip noise identification and cluster every point by fission.
    #[arg(long)]
    no_noise_id: bool,
    /// How pairwise distances are held.
    #[arg(long, value_enum, default_value = "auto")]
    distance: DistanceArg,
}

impl PipelineArgs {
    fn options(&self) -> sarfc::SarfcOptions {
        sarfc::SarfcOptions {
            distance_mode: self.distance.into(),
            r: self.r,
            noise_id: !self.no_noise_id,
            ..sarfc::SarfcOptions::default()
        }
    }
}

#[derive(Args)]
pub struct RunArgs {
    /// Manifest name (e.g. agg, iris) or path to a delimited text file.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    dataset: Option<String>,
    /// Generate a synthetic dataset: blobs, ring_s, imbalance, supole_like, squcir_like.
    #[arg(long)]
    generate: Option<String>,
    /// Number of points (for imbalance, the dense blob size).
    #[arg(long)]
    n: Option<usize>,
    /// Number of blobs.
    #[arg(long)]
    k: Option<usize>,
    /// Sparse blob size for imbalance.
    #[arg(long)]
    n_sparse: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// 0-based label column of a dataset file; defaults to the last column.
    #[arg(long)]
    label_col: Option<usize>,
    /// Treat every column of a dataset file as a feature.
    #[arg(long, conflicts_with = "label_col")]
    no_labels: bool,
    /// Manifest used to resolve dataset names; defaults to the bundled one.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Directory for result and diagnostics files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the density, smoothing, turning-angle and regression curves.
    #[arg(long, requires = "out")]
    diagnostics: bool,
    /// Write the fission trace as JSON lines.
    #[arg(long, requires = "out")]
    trace: bool,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Manifest listing the datasets; defaults to the bundled benchmark list.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Only these datasets (comma-separated names).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Directory for bench.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Number of random chains for the crack bound check.
    #[arg(long, default_value_t = 1000)]
    chains: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run::run(&a),
        Command::Bench(a) => bench::bench(&a),
        Command::Check(a) => check::check(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}

/// An error with the process exit code it maps to.
pub struct Failure {
    error: anyhow::Error,
    code: u8,
}

impl Failure {
    pub const RESOLVE: u8 = 2;
    pub const PIPELINE: u8 = 3;
    pub const IO: u8 = 4;

    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            error: error.into(),
            code,
        }
    }
}
