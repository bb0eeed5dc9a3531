//! `hetlink`: generate data, build graphs, train the link predictors and
//! tabulate their ROC-AUC.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "hetlink",
    version,
    about = "Link prediction on heterogeneous clinical-trial graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for data generation or for a single run. `reproduce` runs only
    /// this seed when given.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Flat `key=value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Run independent seeds concurrently.
    #[arg(long, global = true)]
    parallel_runs: bool,

    /// Start from the full-scale defaults (512-dimensional embeddings,
    /// walks of 200 nodes) instead of the desk preset.
    #[arg(long, global = true)]
    full_scale: bool,

    /// More log output; repeat for debug level.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic trial table to `trials.csv`.
    Generate,
    /// Validate a trial CSV and write its normalized form.
    Ingest {
        /// Trial table in CSV form.
        input: PathBuf,
    },
    /// Build a graph from a trial table (synthetic when `--input` is absent).
    BuildGraph {
        kind: GraphKind,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Metapath walks and skip-gram node embeddings over the knowledge graph,
    /// or HinSAGE node representations from a saved checkpoint.
    Embed {
        #[arg(long)]
        input: Option<PathBuf>,
        /// HinSAGE checkpoint written by `train hinsage`.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// One seed of one pipeline: report, ROC curve and test scores.
    Train {
        method: TrainMethod,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Adverse event for the kernel pipeline; defaults to the configured
        /// number of targets.
        #[arg(long)]
        target: Option<String>,
    },
    /// ROC curve and AUC of a `score<TAB>label` file.
    Evaluate { scores: PathBuf },
    /// Comparison table (per-run AUC, mean, SD) from run report files.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
    /// Every pipeline over every configured seed on one dataset.
    Reproduce {
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraphKind {
    Knowledge,
    Binodal,
    Constituent,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TrainMethod {
    Metapath,
    Hinsage,
    Kernel,
    Array,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
