use std::path::PathBuf;

use clap::Args;
use serde_json::json;
use topcap_core::embedding::{embed, select_delay};
use topcap_core::features::pca3;
use topcap_core::formats::{read_series_csv, write_cloud_csv, write_pca, EmbeddingSidecar};
use topcap_core::EmbeddingParams;

use super::{stem, to_json_text, Context};
use crate::CliError;

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Series CSV.
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub d: Option<usize>,
    /// Delay in samples, or `desired` for the autocorrelation rule.
    #[arg(long, default_value = "desired")]
    pub tau: String,
    #[arg(long)]
    pub skip: Option<usize>,
    #[arg(long)]
    pub n_windows: Option<usize>,
    /// Also write the projection onto the top three principal axes.
    #[arg(long)]
    pub pca: bool,
}

pub fn run(args: &EmbedArgs, ctx: &mut Context) -> Result<(), CliError> {
    let d = args.d.unwrap_or(ctx.config.embedding.d);
    let skip = args.skip.unwrap_or(ctx.config.embedding.skip);
    let n_windows = args.n_windows.unwrap_or(ctx.config.embedding.n_windows);
    let explicit_tau = match args.tau.trim() {
        "desired" => None,
        other => Some(other.parse::<usize>().map_err(|_| CliError::Usage(format!("--tau: `{other}` is not a delay")))?),
    };
    ctx.set_params(
        "embed",
        json!({"series": args.series.display().to_string(), "d": d, "tau": args.tau, "skip": skip, "n_windows": n_windows, "pca": args.pca}),
    );
    let name = stem(&args.series);
    let text = ctx.inputs.read_text(&args.series)?;
    let series = read_series_csv::<f64>(&name, &text, 0).map_err(|e| CliError::input(args.series.display(), e))?;
    let (tau, period, rule) = match explicit_tau {
        Some(tau) => (tau, None, None),
        None => {
            let (tau, diag) = select_delay(&series, d, n_windows).map_err(|e| CliError::input(args.series.display(), e))?;
            (tau, Some(diag.period), Some(diag.rule.to_string()))
        }
    };
    let params = EmbeddingParams::new(d, tau, skip);
    params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let cloud = embed(&series, &params).map_err(|e| CliError::input(args.series.display(), e))?;
    ctx.outputs.write(&format!("{name}.cloud.csv"), write_cloud_csv(&cloud))?;
    let sidecar = EmbeddingSidecar { d, tau, skip, period, rule };
    ctx.outputs.write(&format!("{name}.params.json"), to_json_text(&sidecar)?)?;
    if args.pca {
        if cloud.len() < 4 {
            return Err(CliError::Input(format!("{}: PCA needs at least 4 points, cloud has {}", args.series.display(), cloud.len())));
        }
        let (coords, ratios) = write_pca(&pca3(&cloud));
        ctx.outputs.write(&format!("{name}.pca.csv"), coords)?;
        ctx.outputs.write(&format!("{name}.pca.json"), ratios)?;
    }
    Ok(())
}
