use std::ffi::OsString;
use std::path::PathBuf;

use clap::Args;

use crate::io::RunManifest;
use crate::{Cli, CliError};

#[derive(Debug, Args)]
pub struct RerunArgs {
    /// A `<command>.manifest.json` written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Replays the recorded arguments into the current `--out`.
pub fn rerun(args: &RerunArgs, cli: &Cli) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.manifest).map_err(|e| CliError::input(args.manifest.display(), e))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| CliError::input(args.manifest.display(), e))?;
    let mut argv: Vec<OsString> = vec!["topcap".into(), "--out".into(), cli.out.clone().into_os_string()];
    argv.extend(manifest.args.iter().map(OsString::from));
    crate::execute_args(argv)
}
