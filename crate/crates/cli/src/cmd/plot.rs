use std::path::PathBuf;

use clap::Args;
use serde_json::json;
use topcap_core::formats::read_diagram_json;

use super::{stem, Context};
use crate::CliError;

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Diagram JSON from `ph` or `pipeline`.
    #[arg(long)]
    pub diagram: PathBuf,
    /// Output file name inside `--out`; defaults to `<stem>.svg`.
    #[arg(long)]
    pub name: Option<String>,
}

pub fn run(args: &PlotArgs, ctx: &mut Context) -> Result<(), CliError> {
    let name = args.name.clone().unwrap_or_else(|| format!("{}.svg", stem(&args.diagram)));
    ctx.set_params("plot", json!({"diagram": args.diagram.display().to_string(), "name": name}));
    let text = ctx.inputs.read_text(&args.diagram)?;
    let diagram = read_diagram_json::<f64>(&text).map_err(|e| CliError::input(args.diagram.display(), e))?;
    let title = format!("{} (H{})", stem(&args.diagram), diagram.dim);
    ctx.outputs.write(&name, crate::svg::diagram_svg(&diagram, &title))
}
