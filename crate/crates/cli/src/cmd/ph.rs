use std::path::PathBuf;

use clap::Args;
use serde_json::json;
use topcap_core::features::lower_region_density;
use topcap_core::formats::{read_cloud_csv, write_density_json, write_diagram_csv, write_diagram_json};
use topcap_core::persistence::{rips_persistence, DistanceMatrix, RipsOptions, Threshold};

use super::{stem, Context};
use crate::CliError;

#[derive(Debug, Args)]
pub struct PhArgs {
    /// Point-cloud CSV, one point per row.
    #[arg(long)]
    pub cloud: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub max_dim: u8,
    /// Rips truncation; defaults to the enclosing radius.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub bins_x: Option<usize>,
    #[arg(long)]
    pub bins_y: Option<usize>,
    /// Lifetime cutoff of the density grid, as a fraction of the largest.
    #[arg(long)]
    pub cutoff: Option<f64>,
}

pub fn run(args: &PhArgs, ctx: &mut Context) -> Result<(), CliError> {
    let threshold = args.threshold.or(ctx.config.persistence.threshold);
    let density = &ctx.config.density;
    let (bins_x, bins_y) = (args.bins_x.unwrap_or(density.bins_x), args.bins_y.unwrap_or(density.bins_y));
    let cutoff = args.cutoff.unwrap_or(density.cutoff_fraction);
    if bins_x == 0 || bins_y == 0 || !(cutoff > 0.0 && cutoff <= 1.0) {
        return Err(CliError::Usage("density grid needs positive bin counts and a cutoff in (0, 1]".into()));
    }
    ctx.set_params(
        "ph",
        json!({"cloud": args.cloud.display().to_string(), "max_dim": args.max_dim, "threshold": threshold,
               "density": {"bins_x": bins_x, "bins_y": bins_y, "cutoff_fraction": cutoff}}),
    );
    let name = stem(&args.cloud);
    let text = ctx.inputs.read_text(&args.cloud)?;
    let cloud = read_cloud_csv::<f64>(&name, &text).map_err(|e| CliError::input(args.cloud.display(), e))?;
    let options = RipsOptions { max_dim: usize::from(args.max_dim), threshold: threshold.map_or(Threshold::Auto, Threshold::Explicit) };
    let diagrams = rips_persistence(&DistanceMatrix::from_cloud(&cloud), &options).map_err(|e| CliError::Usage(e.to_string()))?;
    for diagram in &diagrams {
        ctx.outputs.write(&format!("{name}.dim{}.json", diagram.dim), write_diagram_json(diagram))?;
    }
    ctx.outputs.write(&format!("{name}.diagram.csv"), write_diagram_csv(&diagrams.iter().collect::<Vec<_>>()))?;
    if let Some(d1) = diagrams.get(1) {
        ctx.outputs.write(&format!("{name}.density.json"), write_density_json(&lower_region_density(d1, bins_x, bins_y, cutoff)))?;
    }
    Ok(())
}
