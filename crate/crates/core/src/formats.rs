//! Text formats for series, clouds, diagrams, features and reports.
//!
//! Floats are written in the shortest form that parses back to the same
//! value, so every writer/reader pair round-trips exactly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::embedding::{EmbeddingError, PointCloud};
use crate::features::{DensityGrid, FeatureRecord, Pca3};
use crate::learn::EvalReport;
use crate::persistence::PersistenceDiagram;
use crate::scalar::Scalar;
use crate::signal::{ClassLabel, SignalError, TimeSeries};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

fn parse_at<T: Scalar>(line: usize, field: &str) -> Result<T, FormatError> {
    field.trim().parse::<T>().map_err(|_| FormatError::Parse { line, message: format!("`{}` is not a number", field.trim()) })
}

/// Non-blank lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

/// One amplitude per line, optionally headed by `value`.
pub fn read_series_csv<T: Scalar>(id: &str, text: &str, sample_rate: u32) -> Result<TimeSeries<T>, FormatError> {
    let mut samples = Vec::new();
    for (k, (line, field)) in content_lines(text).enumerate() {
        if k == 0 && field == "value" {
            continue;
        }
        samples.push(parse_at(line, field)?);
    }
    Ok(TimeSeries::new(id, samples, sample_rate)?)
}

pub fn write_series_csv<T: Scalar>(series: &TimeSeries<T>) -> String {
    let mut out = String::from("value\n");
    for x in series.samples() {
        let _ = writeln!(out, "{x}");
    }
    out
}

/// One point per row; an optional `x0,x1,...` header is skipped.
pub fn read_cloud_csv<T: Scalar>(id: &str, text: &str) -> Result<PointCloud<T>, FormatError> {
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (k, (line, row)) in content_lines(text).enumerate() {
        if k == 0 && row.starts_with('x') {
            continue;
        }
        let parsed = row.split(',').map(|f| parse_at(line, f)).collect::<Result<Vec<T>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != parsed.len() {
                return Err(FormatError::Parse {
                    line,
                    message: format!("{} coordinates, expected {}", parsed.len(), first.len()),
                });
            }
        }
        rows.push(parsed);
    }
    Ok(PointCloud::from_rows(id, &rows)?)
}

pub fn write_cloud_csv<T: Scalar>(cloud: &PointCloud<T>) -> String {
    let mut out = (0..cloud.dim()).map(|j| format!("x{j}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for p in cloud.points() {
        out.push_str(&p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Sidecar describing how a cloud was embedded. `T` and `rule` are `null`
/// when the delay was given explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSidecar {
    pub d: usize,
    pub tau: usize,
    pub skip: usize,
    #[serde(rename = "T")]
    pub period: Option<usize>,
    pub rule: Option<String>,
}

fn number_or_inf<T: Scalar>(x: T) -> Value {
    if x.is_infinite() {
        Value::from("inf")
    } else {
        json!(x.to_f64_lossy())
    }
}

fn text_or_inf<T: Scalar>(x: T) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        x.to_string()
    }
}

pub fn diagram_to_json<T: Scalar>(diagram: &PersistenceDiagram<T>) -> Value {
    let points: Vec<Value> =
        diagram.canonical().into_iter().map(|(b, d)| Value::Array(vec![number_or_inf(b), number_or_inf(d)])).collect();
    json!({ "dim": diagram.dim, "points": points })
}

pub fn write_diagram_json<T: Scalar>(diagram: &PersistenceDiagram<T>) -> String {
    let mut text = serde_json::to_string_pretty(&diagram_to_json(diagram)).expect("diagram serializes");
    text.push('\n');
    text
}

pub fn read_diagram_json<T: Scalar>(text: &str) -> Result<PersistenceDiagram<T>, FormatError> {
    let value: Value = serde_json::from_str(text)?;
    let invalid = |m: &str| FormatError::Invalid(format!("diagram JSON: {m}"));
    let dim = value.get("dim").and_then(Value::as_u64).ok_or_else(|| invalid("missing `dim`"))? as usize;
    let raw = value.get("points").and_then(Value::as_array).ok_or_else(|| invalid("missing `points`"))?;
    let coord = |v: &Value| -> Result<T, FormatError> {
        match v {
            Value::String(s) if s == "inf" => Ok(T::infinity()),
            other => other.as_f64().map(T::of).ok_or_else(|| invalid("coordinates must be numbers or \"inf\"")),
        }
    };
    let mut points = Vec::with_capacity(raw.len());
    for p in raw {
        match p.as_array().map(Vec::as_slice) {
            Some([b, d]) => points.push((coord(b)?, coord(d)?)),
            _ => return Err(invalid("each point must be a [birth, death] pair")),
        }
    }
    Ok(PersistenceDiagram::new(dim, points))
}

/// `dim,birth,death` rows for any number of diagrams.
pub fn write_diagram_csv<T: Scalar>(diagrams: &[&PersistenceDiagram<T>]) -> String {
    let mut out = String::from("dim,birth,death\n");
    for diagram in diagrams {
        for (b, d) in diagram.canonical() {
            let _ = writeln!(out, "{},{},{}", diagram.dim, text_or_inf(b), text_or_inf(d));
        }
    }
    out
}

pub fn write_features_csv<T: Scalar>(records: &[FeatureRecord<T>]) -> Result<String, FormatError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["record_id", "label", "birth", "lifetime"])?;
    for r in records {
        writer.write_record([r.record_id.as_str(), r.label.as_str(), &r.birth.to_string(), &r.lifetime.to_string()])?;
    }
    finish_csv(writer)
}

pub fn read_features_csv<T: Scalar>(text: &str) -> Result<Vec<FeatureRecord<T>>, FormatError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["record_id", "label", "birth", "lifetime"] {
        return Err(FormatError::Invalid("features CSV header must be `record_id,label,birth,lifetime`".into()));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let label: ClassLabel = row[1].parse().map_err(|message| FormatError::Parse { line, message })?;
        records.push(FeatureRecord {
            record_id: row[0].to_string(),
            label,
            birth: parse_at(line, &row[2])?,
            lifetime: parse_at(line, &row[3])?,
        });
    }
    Ok(records)
}

fn finish_csv(writer: csv::Writer<Vec<u8>>) -> Result<String, FormatError> {
    let bytes = writer.into_inner().map_err(|e| FormatError::Invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn write_density_json<T: Scalar>(grid: &DensityGrid<T>) -> String {
    let edges = |e: &[T]| e.iter().map(|x| x.to_f64_lossy()).collect::<Vec<_>>();
    let value = json!({
        "x_edges": edges(&grid.x_edges),
        "y_edges": edges(&grid.y_edges),
        "bins_x": grid.x_edges.len() - 1,
        "bins_y": grid.y_edges.len() - 1,
        "counts": grid.counts,
        "degenerate": grid.degenerate,
    });
    serde_json::to_string_pretty(&value).expect("grid serializes") + "\n"
}

/// `x,y,z` coordinates and the ratios sidecar JSON.
pub fn write_pca<T: Scalar>(pca: &Pca3<T>) -> (String, String) {
    let mut csv = String::from("x,y,z\n");
    for p in &pca.projected {
        let _ = writeln!(csv, "{},{},{}", p[0], p[1], p[2]);
    }
    let ratios: Vec<f64> = pca.explained_ratio.iter().map(|r| r.to_f64_lossy()).collect();
    let sidecar = serde_json::to_string_pretty(&json!({ "explained_ratio": ratios })).expect("ratios serialize") + "\n";
    (csv, sidecar)
}

pub fn write_summary_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from("model,accuracy,auc\n");
    for r in reports {
        let _ = writeln!(out, "{},{},{}", r.model, r.accuracy, r.auc);
    }
    out
}

pub fn write_roc_csv(report: &EvalReport) -> String {
    let mut out = String::from("fpr,tpr\n");
    for (fpr, tpr) in &report.roc {
        let _ = writeln!(out, "{fpr},{tpr}");
    }
    out
}
