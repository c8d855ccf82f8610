//! `topcap` command-line pipeline: synthesis, ingestion, feature extraction,
//! classifier evaluation, parameter sweeps and plotting.
//!
//! Every command writes its outputs under `--out` together with a
//! `<command>.manifest.json` that records the resolved parameters, input
//! digests and output digests. [`run`] is the whole binary; it returns the
//! process exit code.

pub mod cmd;
pub mod config;
pub mod io;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::Config;
pub use io::RunManifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub(crate) fn input(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{context}: {err}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "topcap", version, about = "Topological features of consonant recordings")]
pub struct Cli {
    /// Seed for every random choice (corpus generation, splits, folds).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for per-record work; defaults to the available cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON file overriding the built-in defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one of the synthetic variation series.
    Synth(cmd::synth::SynthArgs),
    /// Write a labelled corpus of voiced-like and voiceless-like records.
    Corpus(cmd::synth::CorpusArgs),
    /// Cut labelled consonant segments out of WAV + TextGrid pairs.
    Ingest(cmd::ingest::IngestArgs),
    /// Clean, embed and reduce records to (birth, lifetime) features.
    Pipeline(cmd::pipeline::PipelineArgs),
    /// Cross-validate and hold-out evaluate classifiers on a features CSV.
    TrainEval(cmd::train_eval::TrainEvalArgs),
    /// Maximal persistence over a grid of dimensions, delays and skips.
    Sweep(cmd::sweep::SweepArgs),
    /// Render a diagram JSON as SVG.
    Plot(cmd::plot::PlotArgs),
    /// Persistence diagrams of a point-cloud CSV.
    Ph(cmd::ph::PhArgs),
    /// Point cloud of a series CSV.
    Embed(cmd::embed::EmbedArgs),
    /// Re-run the command recorded in a manifest.
    Rerun(cmd::rerun::RerunArgs),
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli, &args) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn execute(cli: Cli, args: &[OsString]) -> Result<(), CliError> {
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    if let Command::Rerun(rerun) = &cli.command {
        return cmd::rerun::rerun(rerun, &cli);
    }
    if cli.jobs.is_some() {
        log::debug!("running with {jobs} worker threads");
    }
    let mut ctx = cmd::Context::new(&cli, replay_args(args))?;
    pool.install(|| cmd::dispatch(&cli.command, &mut ctx))?;
    ctx.finish()
}

/// Parses and executes a full argument list; used to replay manifests.
pub(crate) fn execute_args(args: Vec<OsString>) -> Result<(), CliError> {
    let cli = Cli::try_parse_from(&args).map_err(|e| CliError::Usage(e.to_string()))?;
    if matches!(cli.command, Command::Rerun(_)) {
        return Err(CliError::Usage("a manifest cannot replay `rerun`".into()));
    }
    execute(cli, &args)
}

/// Arguments after the program name, minus `--out` (a rerun picks its own).
fn replay_args(args: &[OsString]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip_next = false;
    for arg in args.iter().skip(1) {
        let arg = arg.to_string_lossy().into_owned();
        if skip_next {
            skip_next = false;
        } else if arg == "--out" {
            skip_next = true;
        } else if !arg.starts_with("--out=") {
            out.push(arg);
        }
    }
    out
}
