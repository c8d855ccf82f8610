//! Signal ingestion and preprocessing: WAV and TextGrid readers, phone
//! segmentation, amplitude cleaning, autocorrelation period estimates and the
//! synthetic vibrating series.

mod acf;
mod clean;
mod segment;
mod synth;
pub mod textgrid;
pub mod wav;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use acf::{autocorrelation, first_acf_peak};
pub use clean::{clean, CleanOutcome, Rejection, DEFAULT_AMP_THRESHOLD, DEFAULT_MIN_LEN};
pub use segment::{segment, LabeledSegment, Segmentation};
pub use synth::{gen_variation, voiced_like, voiceless_like, VariationKind, VariationSpec};
pub use textgrid::{parse_textgrid, parse_textgrid_bytes, write_textgrid, TextGridError};
pub use wav::{load_wav, read_wav, write_wav_pcm16, WavError};

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("time series `{0}` has no samples")]
    Empty(String),
    #[error("time series `{id}` has a non-finite sample at index {index}")]
    NonFinite { id: String, index: usize },
    #[error("series `{0}` has zero variance")]
    Degenerate(String),
    #[error("series `{id}` needs at least {needed} samples, has {len}")]
    TooShort { id: String, len: usize, needed: usize },
    #[error("series `{0}` has no sample rate (abstract time axis)")]
    NoSampleRate(String),
    #[error("invalid variation spec: {0}")]
    InvalidVariation(String),
    #[error("phone class table lists `{0}` as both voiced and voiceless")]
    OverlappingClasses(String),
    #[error(transparent)]
    Wav(#[from] wav::WavError),
    #[error(transparent)]
    TextGrid(#[from] textgrid::TextGridError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid phone class table: {0}")]
    Table(#[from] serde_json::Error),
}

/// Uniformly sampled real signal. `sample_rate == 0` marks an abstract time
/// axis (synthetic series).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    id: String,
    samples: Vec<T>,
    sample_rate: u32,
}

impl<T: Scalar> TimeSeries<T> {
    pub fn new(id: impl Into<String>, samples: Vec<T>, sample_rate: u32) -> Result<Self, SignalError> {
        let id = id.into();
        if samples.is_empty() {
            return Err(SignalError::Empty(id));
        }
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(SignalError::NonFinite { id, index });
        }
        Ok(Self { id, samples, sample_rate })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Sub-series over `range`. The range must be nonempty and in bounds.
    pub(crate) fn slice(&self, id: String, range: std::ops::Range<usize>) -> Self {
        debug_assert!(range.start < range.end && range.end <= self.samples.len());
        Self { id, samples: self.samples[range].to_vec(), sample_rate: self.sample_rate }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self, SignalError> {
        Self::new(self.id.clone(), self.samples.iter().map(|&x| f(x)).collect(), self.sample_rate)
    }
}

/// Aligned interval from a TextGrid interval tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhoneInterval {
    pub label: String,
    pub start_s: f64,
    pub end_s: f64,
    pub tier: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassLabel {
    Voiced,
    Voiceless,
}

impl ClassLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Voiced => "voiced",
            ClassLabel::Voiceless => "voiceless",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "voiced" => Ok(ClassLabel::Voiced),
            "voiceless" => Ok(ClassLabel::Voiceless),
            other => Err(format!("unknown class label `{other}`")),
        }
    }
}

/// Which phone labels count as voiced and voiceless consonants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct PhoneClassTable {
    voiced: BTreeSet<String>,
    voiceless: BTreeSet<String>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    voiced: Vec<String>,
    voiceless: Vec<String>,
}

impl TryFrom<RawTable> for PhoneClassTable {
    type Error = SignalError;

    fn try_from(raw: RawTable) -> Result<Self, Self::Error> {
        PhoneClassTable::new(raw.voiced, raw.voiceless)
    }
}

impl From<PhoneClassTable> for RawTable {
    fn from(table: PhoneClassTable) -> Self {
        RawTable {
            voiced: table.voiced.into_iter().collect(),
            voiceless: table.voiceless.into_iter().collect(),
        }
    }
}

/// Consonant inventory used for the English corpus.
pub const DEFAULT_VOICED: [&str; 7] = ["ŋ", "m", "n", "j", "l", "v", "ʒ"];
pub const DEFAULT_VOICELESS: [&str; 6] = ["f", "k", "θ", "t", "s", "tʃ"];

impl PhoneClassTable {
    pub fn new<I, J, S>(voiced: I, voiceless: J) -> Result<Self, SignalError>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let voiced: BTreeSet<String> = voiced.into_iter().map(Into::into).collect();
        let voiceless: BTreeSet<String> = voiceless.into_iter().map(Into::into).collect();
        if let Some(shared) = voiced.intersection(&voiceless).next() {
            return Err(SignalError::OverlappingClasses(shared.clone()));
        }
        Ok(Self { voiced, voiceless })
    }

    pub fn from_json(text: &str) -> Result<Self, SignalError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn classify(&self, label: &str) -> Option<ClassLabel> {
        let label = label.trim();
        if self.voiced.contains(label) {
            Some(ClassLabel::Voiced)
        } else if self.voiceless.contains(label) {
            Some(ClassLabel::Voiceless)
        } else {
            None
        }
    }

    pub fn voiced(&self) -> impl Iterator<Item = &str> {
        self.voiced.iter().map(String::as_str)
    }

    pub fn voiceless(&self) -> impl Iterator<Item = &str> {
        self.voiceless.iter().map(String::as_str)
    }
}

impl Default for PhoneClassTable {
    fn default() -> Self {
        Self::new(DEFAULT_VOICED, DEFAULT_VOICELESS).expect("default classes are disjoint")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(TimeSeries::<f64>::new("a", vec![], 0), Err(SignalError::Empty(_))));
        assert!(matches!(
            TimeSeries::new("a", vec![0.0, f64::NAN], 0),
            Err(SignalError::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn default_table_classifies_paper_inventory() {
        let table = PhoneClassTable::default();
        assert_eq!(table.classify("ŋ"), Some(ClassLabel::Voiced));
        assert_eq!(table.classify("tʃ"), Some(ClassLabel::Voiceless));
        assert_eq!(table.classify("d"), None);
        assert_eq!(table.classify("h"), None);
    }

    #[test]
    fn table_json_round_trip_and_overlap_check() {
        let table = PhoneClassTable::default();
        assert_eq!(PhoneClassTable::from_json(&table.to_json()).unwrap(), table);
        let err = PhoneClassTable::from_json(r#"{"voiced":["m"],"voiceless":["m"]}"#).unwrap_err();
        assert!(err.to_string().contains("invalid phone class table"));
    }
}
