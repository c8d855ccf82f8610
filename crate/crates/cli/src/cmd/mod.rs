//! One module per subcommand plus the context they share.

pub mod embed;
pub mod ingest;
pub mod ph;
pub mod pipeline;
pub mod plot;
pub mod rerun;
pub mod sweep;
pub mod synth;
pub mod train_eval;

use std::path::Path;

use serde_json::Value;
use topcap_core::ClassLabel;

use crate::config::Config;
use crate::io::{Inputs, Outputs, RunManifest};
use crate::{Cli, CliError, Command};

/// Per-run state: resolved configuration, digests of everything read and
/// written, and the parameters to record in the manifest.
pub struct Context {
    pub config: Config,
    pub seed: u64,
    pub inputs: Inputs,
    pub outputs: Outputs,
    args: Vec<String>,
    command: String,
    params: Value,
}

impl Context {
    pub(crate) fn new(cli: &Cli, args: Vec<String>) -> Result<Self, CliError> {
        let inputs = Inputs::default();
        let config = match &cli.config {
            Some(path) => {
                let (config, bytes) = Config::load(path)?;
                inputs.record(path, &bytes);
                config
            }
            None => Config::default(),
        };
        Ok(Context {
            config,
            seed: cli.seed,
            inputs,
            outputs: Outputs::new(cli.out.clone()),
            args,
            command: String::new(),
            params: Value::Null,
        })
    }

    pub fn set_params(&mut self, command: &str, params: Value) {
        self.command = command.to_string();
        self.params = params;
    }

    pub(crate) fn finish(self) -> Result<(), CliError> {
        let manifest = RunManifest::assemble(&self.command, self.args, self.seed, self.params, &self.inputs, &self.outputs);
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Internal(e.to_string()))? + "\n";
        crate::io::write_atomic(&self.outputs.dir().join(RunManifest::file_name(&self.command)), text.as_bytes())
    }
}

pub(crate) fn dispatch(command: &Command, ctx: &mut Context) -> Result<(), CliError> {
    match command {
        Command::Synth(args) => synth::run(args, ctx),
        Command::Corpus(args) => synth::run_corpus(args, ctx),
        Command::Ingest(args) => ingest::run(args, ctx),
        Command::Pipeline(args) => pipeline::run(args, ctx),
        Command::TrainEval(args) => train_eval::run(args, ctx),
        Command::Sweep(args) => sweep::run(args, ctx),
        Command::Plot(args) => plot::run(args, ctx),
        Command::Ph(args) => ph::run(args, ctx),
        Command::Embed(args) => embed::run(args, ctx),
        Command::Rerun(_) => unreachable!("rerun is handled before dispatch"),
    }
}

/// File name without directory and extension.
pub(crate) fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "input".to_string(), |s| s.to_string_lossy().into_owned())
}

pub(crate) fn to_json_text<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map(|t| t + "\n").map_err(|e| CliError::Internal(e.to_string()))
}

/// One row of `records.csv`: a labelled series file, relative to the table.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RecordRow {
    pub record_id: String,
    pub label: ClassLabel,
    pub file: String,
    pub sample_rate: u32,
}

pub const RECORDS_FILE: &str = "records.csv";

pub(crate) fn write_records(rows: &[RecordRow]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

pub(crate) fn read_records(path: &Path, text: &str) -> Result<Vec<RecordRow>, CliError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader.deserialize().map(|row| row.map_err(|e| CliError::input(path.display(), e))).collect()
}

/// Comma-separated integers and inclusive `a..b` ranges, all at least 1.
pub(crate) fn parse_list(flag: &str, text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("--{flag}: expected positive integers or ranges like 1..10, got `{text}`"));
    let mut values = Vec::new();
    for item in text.split(',').map(str::trim) {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                values.extend(a..=b);
            }
            None => values.push(item.parse().map_err(|_| bad())?),
        }
    }
    if values.is_empty() || values.contains(&0) {
        return Err(bad());
    }
    Ok(values)
}
