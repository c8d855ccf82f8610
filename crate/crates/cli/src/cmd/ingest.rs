use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::json;
use topcap_core::formats::write_series_csv;
use topcap_core::signal::{parse_textgrid_bytes, read_wav, segment, LabeledSegment, PhoneInterval};
use topcap_core::PhoneClassTable;

use super::{stem, write_records, Context, RecordRow, RECORDS_FILE};
use crate::io::Inputs;
use crate::CliError;

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// PCM16 mono recording.
    #[arg(long, requires = "textgrid", conflicts_with = "dir")]
    pub wav: Option<PathBuf>,
    /// Praat TextGrid aligned with `--wav`.
    #[arg(long, requires = "wav")]
    pub textgrid: Option<PathBuf>,
    /// Directory of `<stem>.wav` + `<stem>.TextGrid` pairs.
    #[arg(long)]
    pub dir: Option<PathBuf>,
    /// Phone class table JSON; defaults to the configured table.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

/// Fate of one aligned interval.
pub(crate) struct IndexRow {
    pub source: String,
    pub interval: PhoneInterval,
    pub status: &'static str,
    pub record_id: String,
}

pub(crate) struct Ingested {
    pub segments: Vec<LabeledSegment<f64>>,
    pub index: Vec<IndexRow>,
}

pub(crate) fn load_table(path: Option<&Path>, ctx: &Context) -> Result<PhoneClassTable, CliError> {
    match path {
        Some(path) => {
            let text = ctx.inputs.read_text(path)?;
            PhoneClassTable::from_json(&text).map_err(|e| CliError::input(path.display(), e))
        }
        None => Ok(ctx.config.phone_classes.clone()),
    }
}

/// `<stem>.wav` files in `dir` with their TextGrids, sorted by stem.
pub(crate) fn audio_pairs(dir: &Path) -> Result<Vec<(PathBuf, PathBuf)>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::input(dir.display(), e))?;
    let mut wavs: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")))
        .collect();
    wavs.sort();
    wavs.into_iter()
        .map(|wav| {
            let grid = ["TextGrid", "textgrid", "TEXTGRID"]
                .iter()
                .map(|ext| wav.with_extension(ext))
                .find(|p| p.is_file())
                .ok_or_else(|| CliError::Input(format!("{}: no matching TextGrid", wav.display())))?;
            Ok((wav, grid))
        })
        .collect()
}

pub(crate) fn ingest_pair(wav: &Path, grid: &Path, table: &PhoneClassTable, inputs: &Inputs) -> Result<Ingested, CliError> {
    let source = stem(wav);
    let audio = inputs.read(wav)?;
    let series = read_wav::<f64>(&source, &audio).map_err(|e| CliError::input(wav.display(), e))?;
    let grid_bytes = inputs.read(grid)?;
    let intervals = parse_textgrid_bytes(&grid_bytes).map_err(|e| CliError::input(grid.display(), e))?;
    let parts = segment(&series, &intervals, table).map_err(|e| CliError::input(wav.display(), e))?;
    for interval in &parts.out_of_range {
        log::warn!("{source}: interval `{}` at {}s lies outside the recording", interval.label, interval.start_s);
    }
    let mut index: Vec<IndexRow> = parts
        .segments
        .iter()
        .map(|s| IndexRow { source: source.clone(), interval: s.interval.clone(), status: "emitted", record_id: s.series.id().to_string() })
        .chain(parts.unlisted.iter().map(|i| IndexRow { source: source.clone(), interval: i.clone(), status: "skipped", record_id: String::new() }))
        .chain(parts.out_of_range.iter().map(|i| IndexRow { source: source.clone(), interval: i.clone(), status: "out-of-range", record_id: String::new() }))
        .collect();
    index.sort_by(|a, b| a.interval.start_s.total_cmp(&b.interval.start_s).then_with(|| a.interval.label.cmp(&b.interval.label)));
    Ok(Ingested { segments: parts.segments, index })
}

pub fn run(args: &IngestArgs, ctx: &mut Context) -> Result<(), CliError> {
    let pairs = match (&args.wav, &args.textgrid, &args.dir) {
        (Some(wav), Some(grid), None) => vec![(wav.clone(), grid.clone())],
        (None, None, Some(dir)) => audio_pairs(dir)?,
        _ => return Err(CliError::Usage("give either --wav with --textgrid, or --dir".into())),
    };
    let table = load_table(args.table.as_deref(), ctx)?;
    ctx.set_params(
        "ingest",
        json!({
            "pairs": pairs.iter().map(|(w, g)| [w.display().to_string(), g.display().to_string()]).collect::<Vec<_>>(),
            "phone_classes": table,
        }),
    );

    let mut rows = Vec::new();
    let mut index = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    index.write_record(["source", "phone", "start_s", "end_s", "status", "record_id"]).map_err(internal)?;
    for (wav, grid) in &pairs {
        let ingested = ingest_pair(wav, grid, &table, &ctx.inputs)?;
        for seg in &ingested.segments {
            let file = format!("segments/{}.csv", seg.series.id());
            ctx.outputs.write(&file, write_series_csv(&seg.series))?;
            rows.push(RecordRow {
                record_id: seg.series.id().to_string(),
                label: seg.label,
                file,
                sample_rate: seg.series.sample_rate(),
            });
        }
        for row in &ingested.index {
            index
                .write_record([
                    row.source.as_str(),
                    row.interval.label.as_str(),
                    &row.interval.start_s.to_string(),
                    &row.interval.end_s.to_string(),
                    row.status,
                    row.record_id.as_str(),
                ])
                .map_err(internal)?;
        }
    }
    rows.sort_by(|a, b| a.record_id.cmp(&b.record_id));
    ctx.outputs.write(RECORDS_FILE, write_records(&rows)?)?;
    ctx.outputs.write("ingest_index.csv", index.into_inner().map_err(|e| CliError::Internal(e.to_string()))?)
}
