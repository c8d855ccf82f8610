use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde_json::json;
use topcap_core::embedding::{embed, select_delay};
use topcap_core::formats::read_series_csv;
use topcap_core::persistence::{max_persistence, rips_persistence, DistanceMatrix, RipsOptions};
use topcap_core::EmbeddingParams;

use super::{parse_list, stem, Context};
use crate::CliError;

/// Cells whose runs add up to this many seconds are not repeated further.
const REPEAT_BUDGET_SECONDS: f64 = 2.0;

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Series CSV.
    #[arg(long)]
    pub record: PathBuf,
    /// Embedding dimensions, e.g. `10,25,50,100` or `2..8`.
    #[arg(long, default_value = "100")]
    pub dims: String,
    /// Delays, or `desired` for the autocorrelation rule at each dimension.
    #[arg(long, default_value = "desired")]
    pub delays: String,
    #[arg(long, default_value = "5")]
    pub skips: String,
    #[arg(long)]
    pub n_windows: Option<usize>,
    /// Timed runs per cell (the minimum is reported); stops early once a
    /// cell has used two seconds.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
}

struct Row {
    d: usize,
    delay: String,
    skip: usize,
    period: String,
    rule: String,
    points: usize,
    value: String,
    seconds: Option<f64>,
}

pub fn run(args: &SweepArgs, ctx: &mut Context) -> Result<(), CliError> {
    let dims = parse_list("dims", &args.dims)?;
    let delays = if args.delays.trim() == "desired" { None } else { Some(parse_list("delays", &args.delays)?) };
    let skips = parse_list("skips", &args.skips)?;
    let n_windows = args.n_windows.unwrap_or(ctx.config.embedding.n_windows);
    if dims.contains(&1) || n_windows == 0 || args.repeat == 0 {
        return Err(CliError::Usage("dimensions must be at least 2; --n-windows and --repeat at least 1".into()));
    }
    ctx.set_params(
        "sweep",
        json!({"record": args.record.display().to_string(), "dims": dims, "delays": delays.as_ref().map_or(json!("desired"), |d| json!(d)), "skips": skips, "n_windows": n_windows, "repeat": args.repeat}),
    );
    let text = ctx.inputs.read_text(&args.record)?;
    let series = read_series_csv::<f64>(&stem(&args.record), &text, 0).map_err(|e| CliError::input(args.record.display(), e))?;

    let mut rows = Vec::new();
    for &d in &dims {
        let cells: Vec<(usize, String, String)> = match &delays {
            None => match select_delay(&series, d, n_windows) {
                Ok((tau, diag)) => vec![(tau, diag.period.to_string(), diag.rule.to_string())],
                Err(e) => {
                    log::warn!("d = {d}: {e}");
                    for &skip in &skips {
                        rows.push(Row { d, delay: "desired".into(), skip, period: String::new(), rule: "none".into(), points: 0, value: "empty".into(), seconds: None });
                    }
                    continue;
                }
            },
            Some(list) => list.iter().map(|&tau| (tau, String::new(), "explicit".to_string())).collect(),
        };
        for (tau, period, rule) in cells {
            for &skip in &skips {
                let params = EmbeddingParams::new(d, tau, skip);
                let mut row = Row { d, delay: tau.to_string(), skip, period: period.clone(), rule: rule.clone(), points: 0, value: "empty".into(), seconds: None };
                if params.point_count(series.len()).is_some() {
                    let (points, value, seconds) = timed_cell(&series, &params, args.repeat)?;
                    row.points = points;
                    row.value = value.map_or_else(|| "none".to_string(), |v| v.to_string());
                    row.seconds = Some(seconds);
                }
                rows.push(row);
            }
        }
    }

    let mut table = String::from("d,delay,skip,T,rule,points,max_persistence\n");
    let mut timing = String::from("d,delay,skip,points,seconds\n");
    for r in &rows {
        table.push_str(&format!("{},{},{},{},{},{},{}\n", r.d, r.delay, r.skip, r.period, r.rule, r.points, r.value));
        if let Some(s) = r.seconds {
            timing.push_str(&format!("{},{},{},{},{s}\n", r.d, r.delay, r.skip, r.points));
        }
    }
    ctx.outputs.write("sweep.csv", table)?;
    ctx.outputs.write_timing("sweep_timing.csv", timing)
}

/// Points, maximal persistence (`None` for an empty diagram) and the fastest
/// wall time of embedding plus persistence.
fn timed_cell(
    series: &topcap_core::TimeSeries<f64>,
    params: &EmbeddingParams,
    repeat: usize,
) -> Result<(usize, Option<f64>, f64), CliError> {
    let (mut best, mut spent) = (f64::INFINITY, 0.0);
    let mut result = (0, None);
    for _ in 0..repeat {
        let start = Instant::now();
        let cloud = embed(series, params).map_err(|e| CliError::Usage(e.to_string()))?;
        let diagrams = rips_persistence(&DistanceMatrix::from_cloud(&cloud), &RipsOptions::default())
            .map_err(|e| CliError::Internal(e.to_string()))?;
        let seconds = start.elapsed().as_secs_f64();
        result = (cloud.len(), max_persistence(&diagrams[1]).map(|m| m.lifetime));
        best = best.min(seconds);
        spent += seconds;
        if spent >= REPEAT_BUDGET_SECONDS {
            break;
        }
    }
    Ok((result.0, result.1, best))
}
