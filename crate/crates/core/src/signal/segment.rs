use super::{ClassLabel, PhoneClassTable, PhoneInterval, SignalError, TimeSeries};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSegment<T> {
    pub series: TimeSeries<T>,
    pub label: ClassLabel,
    pub interval: PhoneInterval,
}

/// Result of slicing a recording into classified phones.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation<T> {
    pub segments: Vec<LabeledSegment<T>>,
    /// Intervals whose label is in neither class.
    pub unlisted: Vec<PhoneInterval>,
    /// Classified intervals that fall outside the recording (or are empty
    /// once rounded to samples).
    pub out_of_range: Vec<PhoneInterval>,
}

impl<T> Segmentation<T> {
    pub fn warning_count(&self) -> usize {
        self.out_of_range.len()
    }
}

fn sample_index(seconds: f64, rate: u32) -> Option<usize> {
    let index = (seconds * f64::from(rate)).round();
    (index.is_finite() && index >= 0.0).then_some(index as usize)
}

/// Cuts one sub-series per interval whose label the table classifies, over
/// samples `[round(start*rate), round(end*rate))`. Sub-series ids are
/// `<series id>-<interval position>` so they stay unique and sortable.
pub fn segment<T: Scalar>(
    series: &TimeSeries<T>,
    intervals: &[PhoneInterval],
    table: &PhoneClassTable,
) -> Result<Segmentation<T>, SignalError> {
    let rate = series.sample_rate();
    if rate == 0 {
        return Err(SignalError::NoSampleRate(series.id().to_string()));
    }
    let mut out = Segmentation { segments: Vec::new(), unlisted: Vec::new(), out_of_range: Vec::new() };
    for (position, interval) in intervals.iter().enumerate() {
        let Some(label) = table.classify(&interval.label) else {
            out.unlisted.push(interval.clone());
            continue;
        };
        let bounds = sample_index(interval.start_s, rate).zip(sample_index(interval.end_s, rate));
        match bounds {
            Some((start, end)) if start < end && end <= series.len() => {
                let id = format!("{}-{position:05}", series.id());
                out.segments.push(LabeledSegment {
                    series: series.slice(id, start..end),
                    label,
                    interval: interval.clone(),
                });
            }
            _ => {
                log::warn!(
                    "interval {:?} [{}, {}) lies outside `{}`",
                    interval.label,
                    interval.start_s,
                    interval.end_s,
                    series.id()
                );
                out.out_of_range.push(interval.clone());
            }
        }
    }
    Ok(out)
}
