use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use topcap_core::embedding::{check_cloud_size, embed, select_delay, CloudCheck, DelayRule, EmbeddingError};
use topcap_core::features::extract_feature;
use topcap_core::formats::{read_series_csv, write_diagram_json, write_features_csv};
use topcap_core::persistence::{rips_persistence, DistanceMatrix, PersistenceDiagram, RipsOptions, Threshold};
use topcap_core::signal::{clean, CleanOutcome, SignalError};
use topcap_core::{ClassLabel, Dataset, EmbeddingParams, FeatureRecord, TimeSeries};

use super::ingest::{audio_pairs, ingest_pair, load_table};
use super::train_eval::{self, EvalOptions};
use super::{read_records, stem, Context, RECORDS_FILE};
use crate::CliError;

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Series CSV, a directory holding `records.csv`, or a directory of
    /// WAV + TextGrid pairs. Defaults to the configured corpus directory.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Class of a single series CSV input.
    #[arg(long)]
    pub label: Option<ClassLabel>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub skip: Option<usize>,
    #[arg(long)]
    pub n_windows: Option<usize>,
    #[arg(long)]
    pub min_points: Option<usize>,
    #[arg(long)]
    pub amp_threshold: Option<f64>,
    #[arg(long)]
    pub min_len: Option<usize>,
    /// Rips truncation; defaults to the enclosing radius.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Also cross-validate and hold-out evaluate every classifier.
    #[arg(long)]
    pub evaluate: bool,
}

/// Resolved per-record settings.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineParams {
    pub amp_threshold: f64,
    pub min_len: usize,
    pub d: usize,
    pub n_windows: usize,
    pub skip: usize,
    pub min_points: usize,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum Status {
    Ok { feature: FeatureRecord<f64>, diagram: PersistenceDiagram<f64> },
    Rejected(String),
}

/// What happened to one record.
#[derive(Debug, Clone)]
pub struct RecordOutcome {
    pub record_id: String,
    pub label: ClassLabel,
    pub samples: usize,
    pub period: Option<usize>,
    pub tau: Option<usize>,
    pub rule: Option<DelayRule>,
    pub points: Option<usize>,
    pub status: Status,
}

/// clean -> delay -> embed -> size check -> Rips -> longest 1-cycle.
pub fn process_series(series: &TimeSeries<f64>, label: ClassLabel, params: &PipelineParams) -> Result<RecordOutcome, CliError> {
    let mut outcome = RecordOutcome {
        record_id: series.id().to_string(),
        label,
        samples: series.len(),
        period: None,
        tau: None,
        rule: None,
        points: None,
        status: Status::Rejected(String::new()),
    };
    let reject = |mut outcome: RecordOutcome, reason: String| {
        outcome.status = Status::Rejected(reason);
        Ok(outcome)
    };
    let series = match clean(series, params.amp_threshold, params.min_len) {
        CleanOutcome::Accepted(series) => series,
        CleanOutcome::Rejected(why) => return reject(outcome, why.to_string()),
    };
    outcome.samples = series.len();
    let (tau, diagnostics) = match select_delay(&series, params.d, params.n_windows) {
        Ok(found) => found,
        Err(EmbeddingError::NoPeriod(_)) => return reject(outcome, "no-period".into()),
        Err(EmbeddingError::SeriesTooShort { .. }) => return reject(outcome, "series-too-short".into()),
        Err(EmbeddingError::Signal(SignalError::Degenerate(_))) => return reject(outcome, "constant-signal".into()),
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    outcome.period = Some(diagnostics.period);
    outcome.tau = Some(tau);
    outcome.rule = Some(diagnostics.rule);
    let cloud = embed(&series, &EmbeddingParams::new(params.d, tau, params.skip)).map_err(|e| CliError::Usage(e.to_string()))?;
    outcome.points = Some(cloud.len());
    if let CloudCheck::TooFewPoints { points, min_points } = check_cloud_size(&cloud, params.min_points) {
        return reject(outcome, format!("too-few-points ({points} < {min_points})"));
    }
    let options = RipsOptions { max_dim: 1, threshold: params.threshold.map_or(Threshold::Auto, Threshold::Explicit) };
    let mut diagrams =
        rips_persistence(&DistanceMatrix::from_cloud(&cloud), &options).map_err(|e| CliError::Usage(e.to_string()))?;
    let diagram = diagrams.pop().expect("dimension 1 requested");
    match extract_feature(series.id(), label, &diagram) {
        Some(feature) => outcome.status = Status::Ok { feature, diagram },
        None => return reject(outcome, "empty-diagram".into()),
    }
    Ok(outcome)
}

enum Source {
    File(PathBuf),
    Loaded(TimeSeries<f64>),
}

struct Pending {
    id: String,
    label: ClassLabel,
    source: Source,
}

fn gather(input: &Path, label: Option<ClassLabel>, ctx: &Context) -> Result<Vec<Pending>, CliError> {
    if input.is_file() {
        let label = label.ok_or_else(|| CliError::Usage("--label is required for a single series input".into()))?;
        return Ok(vec![Pending { id: stem(input), label, source: Source::File(input.to_path_buf()) }]);
    }
    if !input.is_dir() {
        return Err(CliError::Input(format!("{}: no such file or directory", input.display())));
    }
    let table_path = input.join(RECORDS_FILE);
    if table_path.is_file() {
        let rows = read_records(&table_path, &ctx.inputs.read_text(&table_path)?)?;
        return Ok(rows
            .into_iter()
            .map(|row| Pending { id: row.record_id, label: row.label, source: Source::File(input.join(row.file)) })
            .collect());
    }
    let pairs = audio_pairs(input)?;
    if pairs.is_empty() {
        return Err(CliError::Input(format!("{}: neither {RECORDS_FILE} nor WAV files found", input.display())));
    }
    let table = load_table(None, ctx)?;
    let mut pending = Vec::new();
    for (wav, grid) in &pairs {
        for seg in ingest_pair(wav, grid, &table, &ctx.inputs)?.segments {
            pending.push(Pending { id: seg.series.id().to_string(), label: seg.label, source: Source::Loaded(seg.series) });
        }
    }
    Ok(pending)
}

pub fn run(args: &PipelineArgs, ctx: &mut Context) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let params = PipelineParams {
        amp_threshold: args.amp_threshold.unwrap_or(cfg.clean.amp_threshold),
        min_len: args.min_len.unwrap_or(cfg.clean.min_len),
        d: args.d.unwrap_or(cfg.embedding.d),
        n_windows: args.n_windows.unwrap_or(cfg.embedding.n_windows),
        skip: args.skip.unwrap_or(cfg.embedding.skip),
        min_points: args.min_points.unwrap_or(cfg.embedding.min_points),
        threshold: args.threshold.or(cfg.persistence.threshold),
    };
    if params.d < 2 || params.skip == 0 || params.n_windows == 0 {
        return Err(CliError::Usage(format!("need d >= 2, skip >= 1, n-windows >= 1 (got {params:?})")));
    }
    let input = args
        .input
        .clone()
        .or_else(|| cfg.corpus.audio_dir.clone())
        .ok_or_else(|| CliError::Usage("--input is required unless the config names corpus.audio_dir".into()))?;
    let eval = args.evaluate.then(|| EvalOptions::from_config(&ctx.config, ctx.seed));
    ctx.set_params(
        "pipeline",
        json!({"input": input.display().to_string(), "label": args.label, "pipeline": params, "evaluate": eval}),
    );

    let pending = gather(&input, args.label, ctx)?;
    let mut seen = BTreeSet::new();
    if let Some(dup) = pending.iter().find(|p| !seen.insert(p.id.as_str())) {
        return Err(CliError::Input(format!("record id `{}` appears twice", dup.id)));
    }

    let ctx_ref: &Context = ctx;
    let mut results: Vec<(RecordOutcome, f64)> = pending
        .par_iter()
        .map(|p| {
            let series = match &p.source {
                Source::Loaded(series) => series.clone(),
                Source::File(path) => {
                    let text = ctx_ref.inputs.read_text(path)?;
                    read_series_csv::<f64>(&p.id, &text, 0).map_err(|e| CliError::input(path.display(), e))?
                }
            };
            let start = Instant::now();
            let outcome = process_series(&series, p.label, &params)?;
            let seconds = start.elapsed().as_secs_f64();
            if let Status::Ok { diagram, .. } = &outcome.status {
                ctx_ref.outputs.write(&format!("diagrams/{}.json", p.id), write_diagram_json(diagram))?;
            }
            Ok((outcome, seconds))
        })
        .collect::<Result<_, CliError>>()?;
    results.sort_by(|a, b| a.0.record_id.cmp(&b.0.record_id));

    let features: Vec<FeatureRecord<f64>> = results
        .iter()
        .filter_map(|(o, _)| match &o.status {
            Status::Ok { feature, .. } => Some(feature.clone()),
            Status::Rejected(_) => None,
        })
        .collect();
    ctx.outputs.write("features.csv", write_features_csv(&features).map_err(|e| CliError::Internal(e.to_string()))?)?;
    ctx.outputs.write("pipeline_index.csv", index_csv(&results)?)?;
    let mut timing = String::from("record_id,seconds\n");
    for (o, seconds) in &results {
        timing.push_str(&format!("{},{seconds}\n", o.record_id));
    }
    ctx.outputs.write_timing("pipeline_timing.csv", timing)?;
    log::info!("{} of {} records produced features", features.len(), results.len());

    if let Some(eval) = eval {
        train_eval::evaluate_and_write(&Dataset::from_records(&features), &eval, ctx)?;
    }
    Ok(())
}

fn index_csv(results: &[(RecordOutcome, f64)]) -> Result<String, CliError> {
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["record_id", "label", "status", "reason", "samples", "T", "tau", "rule", "points"]).map_err(internal)?;
    let opt = |v: Option<usize>| v.map_or_else(String::new, |v| v.to_string());
    for (o, _) in results {
        let (status, reason) = match &o.status {
            Status::Ok { .. } => ("ok", ""),
            Status::Rejected(reason) => ("rejected", reason.as_str()),
        };
        w.write_record([
            o.record_id.as_str(),
            o.label.as_str(),
            status,
            reason,
            &o.samples.to_string(),
            &opt(o.period),
            &opt(o.tau),
            &o.rule.map_or_else(String::new, |r| r.to_string()),
            &opt(o.points),
        ])
        .map_err(internal)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?).map_err(|e| CliError::Internal(e.to_string()))
}
