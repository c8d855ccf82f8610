use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use topcap_core::formats::{read_features_csv, write_roc_csv, write_summary_csv};
use topcap_core::learn::{train_eval, ModelConfig};
use topcap_core::{Dataset, EvalReport, ModelKind, SplitSpec};

use super::{to_json_text, Context};
use crate::config::Config;
use crate::CliError;

#[derive(Debug, Args)]
pub struct TrainEvalArgs {
    /// Features CSV from `pipeline`.
    #[arg(long)]
    pub features: PathBuf,
    /// Models to evaluate (repeat or comma-separate); `all` for every model.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub model: Vec<String>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(long)]
    pub knn_k: Option<usize>,
    /// Fit on raw features instead of z-scores.
    #[arg(long)]
    pub no_standardize: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalOptions {
    pub models: Vec<ModelKind>,
    pub split: SplitSpec,
    pub model: ModelConfig,
}

impl EvalOptions {
    pub fn from_config(config: &Config, seed: u64) -> Self {
        EvalOptions {
            models: ModelKind::ALL.to_vec(),
            split: SplitSpec { test_fraction: config.learn.test_fraction, folds: config.learn.folds, seed },
            model: ModelConfig { knn_k: config.learn.knn_k, standardize: config.learn.standardize },
        }
    }
}

fn parse_models(names: &[String]) -> Result<Vec<ModelKind>, CliError> {
    let mut models = Vec::new();
    for name in names {
        if name == "all" {
            models.extend(ModelKind::ALL);
        } else {
            models.push(name.parse().map_err(CliError::Usage)?);
        }
    }
    models.sort();
    models.dedup();
    Ok(models)
}

pub fn run(args: &TrainEvalArgs, ctx: &mut Context) -> Result<(), CliError> {
    let mut options = EvalOptions::from_config(&ctx.config, ctx.seed);
    options.models = parse_models(&args.model)?;
    options.split.folds = args.folds.unwrap_or(options.split.folds);
    options.split.test_fraction = args.test_fraction.unwrap_or(options.split.test_fraction);
    options.model.knn_k = args.knn_k.unwrap_or(options.model.knn_k);
    options.model.standardize &= !args.no_standardize;
    options.split.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if options.model.knn_k == 0 {
        return Err(CliError::Usage("--knn-k must be at least 1".into()));
    }
    ctx.set_params("train-eval", json!({"features": args.features.display().to_string(), "options": options}));
    let text = ctx.inputs.read_text(&args.features)?;
    let records = read_features_csv::<f64>(&text).map_err(|e| CliError::input(args.features.display(), e))?;
    evaluate_and_write(&Dataset::new(records), &options, ctx)?;
    Ok(())
}

/// Evaluates every requested model (in parallel, reported in model order)
/// and writes the report JSON, summary CSV, per-model ROC CSVs and an ROC
/// plot.
pub fn evaluate_and_write(dataset: &Dataset, options: &EvalOptions, ctx: &Context) -> Result<Vec<EvalReport>, CliError> {
    let reports = options
        .models
        .par_iter()
        .map(|&kind| train_eval(dataset, &options.split, kind, &options.model))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Input(format!("evaluation: {e}")))?;
    ctx.outputs.write("eval_report.json", to_json_text(&reports)?)?;
    ctx.outputs.write("summary.csv", write_summary_csv(&reports))?;
    for report in &reports {
        ctx.outputs.write(&format!("roc_{}.csv", report.model), write_roc_csv(report))?;
    }
    ctx.outputs.write("roc.svg", crate::svg::roc_svg(&reports))?;
    Ok(reports)
}
