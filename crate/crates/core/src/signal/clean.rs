use std::fmt;

use super::TimeSeries;
use crate::scalar::Scalar;

pub const DEFAULT_AMP_THRESHOLD: f64 = 0.03;
pub const DEFAULT_MIN_LEN: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    /// No sample exceeds the amplitude threshold.
    NoSignal,
    TooShort { len: usize, min_len: usize },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NoSignal => f.write_str("no-signal"),
            Rejection::TooShort { len, min_len } => write!(f, "too-short ({len} < {min_len})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CleanOutcome<T> {
    Accepted(TimeSeries<T>),
    Rejected(Rejection),
}

impl<T> CleanOutcome<T> {
    pub fn accepted(self) -> Option<TimeSeries<T>> {
        match self {
            CleanOutcome::Accepted(series) => Some(series),
            CleanOutcome::Rejected(_) => None,
        }
    }
}

/// Trims leading and trailing samples up to the first and last sample whose
/// magnitude exceeds `amp_threshold`, then rejects results shorter than
/// `min_len`.
pub fn clean<T: Scalar>(series: &TimeSeries<T>, amp_threshold: T, min_len: usize) -> CleanOutcome<T> {
    let loud = |x: &T| x.abs() > amp_threshold;
    let samples = series.samples();
    let (Some(first), Some(last)) = (samples.iter().position(loud), samples.iter().rposition(loud)) else {
        return CleanOutcome::Rejected(Rejection::NoSignal);
    };
    let len = last - first + 1;
    if len < min_len {
        return CleanOutcome::Rejected(Rejection::TooShort { len, min_len });
    }
    CleanOutcome::Accepted(series.slice(series.id().to_string(), first..last + 1))
}
