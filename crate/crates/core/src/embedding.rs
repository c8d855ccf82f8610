//! Time-delay embedding and delay selection.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::signal::{autocorrelation, first_acf_peak, SignalError, TimeSeries};

pub const DEFAULT_DIMENSION: usize = 100;
pub const DEFAULT_SKIP: usize = 5;
pub const DEFAULT_WINDOWS: usize = 6;
pub const DEFAULT_MIN_POINTS: usize = 40;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("embedding window {window} exceeds series length {len}")]
    WindowExceedsSeries { window: usize, len: usize },
    #[error("invalid embedding parameters: {0}")]
    InvalidParams(String),
    #[error("no autocorrelation peak, cannot estimate a period for `{0}`")]
    NoPeriod(String),
    #[error("series of length {len} is too short for dimension {d}")]
    SeriesTooShort { len: usize, d: usize },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    pub d: usize,
    pub tau: usize,
    pub skip: usize,
    /// Number of periods `n` spanned by the window when the delay is chosen
    /// as `n T / d`.
    pub n_windows: usize,
}

impl EmbeddingParams {
    pub fn new(d: usize, tau: usize, skip: usize) -> Self {
        Self { d, tau, skip, n_windows: DEFAULT_WINDOWS }
    }

    pub fn validate(&self) -> Result<(), EmbeddingError> {
        let bad = |msg: String| Err(EmbeddingError::InvalidParams(msg));
        if self.d < 2 {
            return bad(format!("dimension must be at least 2, got {}", self.d));
        }
        if self.tau == 0 || self.skip == 0 || self.n_windows == 0 {
            return bad(format!("tau, skip and n must be positive ({:?})", self));
        }
        Ok(())
    }

    /// Samples covered by one embedded point: `(d - 1) tau + 1`.
    pub fn window(&self) -> usize {
        (self.d - 1) * self.tau + 1
    }

    /// Points produced from a series of `len` samples, or `None` when the
    /// window does not fit.
    pub fn point_count(&self, len: usize) -> Option<usize> {
        let window = self.window();
        (window <= len).then(|| (len - window) / self.skip + 1)
    }
}

/// Ordered points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    coords: Vec<T>,
    dim: usize,
    source_id: String,
}

impl<T: Scalar> PointCloud<T> {
    /// Builds a cloud from explicit rows. Rows must share one dimension,
    /// there must be at least one, and every coordinate must be finite.
    pub fn from_rows(source_id: impl Into<String>, rows: &[Vec<T>]) -> Result<Self, EmbeddingError> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || dim == 0 {
            return Err(EmbeddingError::InvalidParams("point cloud needs at least one point of dimension >= 1".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(EmbeddingError::InvalidParams(format!("row {i} has dimension {} not {dim}", rows[i].len())));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(EmbeddingError::InvalidParams("non-finite coordinate".into()));
        }
        Ok(Self { coords: rows.concat(), dim, source_id: source_id.into() })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[T]> {
        self.coords.chunks_exact(self.dim)
    }
}

/// Sliding-window embedding: point `k` is
/// `(x[k], x[k + tau], ..., x[k + (d - 1) tau])` for `k = 0, skip, 2 skip, ...`
/// while the window stays inside the series.
pub fn embed<T: Scalar>(series: &TimeSeries<T>, params: &EmbeddingParams) -> Result<PointCloud<T>, EmbeddingError> {
    params.validate()?;
    let x = series.samples();
    let count = params
        .point_count(x.len())
        .ok_or(EmbeddingError::WindowExceedsSeries { window: params.window(), len: x.len() })?;
    let mut coords = Vec::with_capacity(count * params.d);
    for start in (0..count).map(|i| i * params.skip) {
        coords.extend((0..params.d).map(|j| x[start + j * params.tau]));
    }
    Ok(PointCloud { coords, dim: params.d, source_id: series.id().to_string() })
}

/// Which rule produced the delay returned by [`select_delay`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DelayRule {
    /// `round(n T / d)`
    Ratio,
    /// The ratio rounded to zero and was raised to 1.
    RaisedToOne,
    /// The window overran the series; `floor(|S| / d)` was used instead.
    FitToSeries,
}

impl fmt::Display for DelayRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DelayRule::Ratio => "ratio",
            DelayRule::RaisedToOne => "raised-to-one",
            DelayRule::FitToSeries => "fit-to-series",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayDiagnostics {
    /// Estimated period in samples (first autocorrelation peak).
    pub period: usize,
    pub rule: DelayRule,
}

/// Delay from the autocorrelation period: `tau = round(n T / d)` (half away
/// from zero), raised to 1 if it rounds to 0, and replaced by `floor(|S| / d)`
/// when the resulting window `(d - 1) tau + 1` exceeds the series.
pub fn select_delay<T: Scalar>(
    series: &TimeSeries<T>,
    d: usize,
    n_windows: usize,
) -> Result<(usize, DelayDiagnostics), EmbeddingError> {
    if d < 2 || n_windows == 0 {
        return Err(EmbeddingError::InvalidParams(format!("d = {d}, n = {n_windows}")));
    }
    let acf = autocorrelation(series)?;
    let period = first_acf_peak(&acf).ok_or_else(|| EmbeddingError::NoPeriod(series.id().to_string()))?;
    let (tau, rule) = delay_for_period(period, series.len(), d, n_windows)?;
    Ok((tau, DelayDiagnostics { period, rule }))
}

pub(crate) fn delay_for_period(
    period: usize,
    len: usize,
    d: usize,
    n_windows: usize,
) -> Result<(usize, DelayRule), EmbeddingError> {
    let ratio = (n_windows as f64 * period as f64 / d as f64).round() as usize;
    let (tau, rule) = if ratio == 0 { (1, DelayRule::RaisedToOne) } else { (ratio, DelayRule::Ratio) };
    if (d - 1) * tau + 1 <= len {
        return Ok((tau, rule));
    }
    match len / d {
        0 => Err(EmbeddingError::SeriesTooShort { len, d }),
        fitted => Ok((fitted, DelayRule::FitToSeries)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudCheck {
    Accepted,
    TooFewPoints { points: usize, min_points: usize },
}

pub fn check_cloud_size<T: Scalar>(cloud: &PointCloud<T>, min_points: usize) -> CloudCheck {
    if cloud.len() < min_points {
        CloudCheck::TooFewPoints { points: cloud.len(), min_points }
    } else {
        CloudCheck::Accepted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(samples: Vec<f64>) -> TimeSeries<f64> {
        TimeSeries::new("s", samples, 0).unwrap()
    }

    fn ramp(len: usize) -> TimeSeries<f64> {
        series((0..len).map(|i| i as f64).collect())
    }

    #[test]
    fn closed_curve_example_count() {
        let samples = (0..=200)
            .map(|n| {
                let t = std::f64::consts::PI * n as f64 / 50.0;
                (2.0 * t).sin() - 3.0 * t.sin()
            })
            .collect();
        let cloud = embed(&series(samples), &EmbeddingParams::new(3, 10, 1)).unwrap();
        assert_eq!(cloud.len(), 181);
        assert_eq!(cloud.dim(), 3);
    }

    #[test]
    fn coordinates_follow_delay() {
        let cloud = embed(&ramp(30), &EmbeddingParams::new(3, 4, 5)).unwrap();
        assert_eq!(cloud.point(0), &[0.0, 4.0, 8.0]);
        assert_eq!(cloud.point(1), &[5.0, 9.0, 13.0]);
        assert_eq!(cloud.len(), (30 - 9) / 5 + 1);
    }

    #[test]
    fn boundary_window_gives_single_point() {
        let cloud = embed(&ramp(500), &EmbeddingParams::new(100, 5, 5)).unwrap();
        assert_eq!(cloud.len(), 1);
    }

    #[test]
    fn oversized_window_is_an_error() {
        let err = embed(&ramp(100), &EmbeddingParams::new(100, 2, 1)).unwrap_err();
        assert!(matches!(err, EmbeddingError::WindowExceedsSeries { window: 199, len: 100 }));
    }

    #[test]
    fn delay_rules() {
        assert_eq!(delay_for_period(120, 5000, 100, 6).unwrap(), (7, DelayRule::Ratio));
        assert_eq!(delay_for_period(8, 5000, 100, 6).unwrap(), (1, DelayRule::RaisedToOne));
        // tau = round(6 * 133 / 100) = 8, window 793 > 500
        assert_eq!(delay_for_period(133, 500, 100, 6).unwrap(), (5, DelayRule::FitToSeries));
        assert!(matches!(delay_for_period(500, 99, 100, 6), Err(EmbeddingError::SeriesTooShort { .. })));
    }

    #[test]
    fn half_rounds_away_from_zero() {
        // 6 * 25 / 100 = 1.5
        assert_eq!(delay_for_period(25, 5000, 100, 6).unwrap().0, 2);
    }

    #[test]
    fn select_delay_on_cosine() {
        let samples = (0..20_000).map(|t| (std::f64::consts::TAU * t as f64 / 120.0).cos()).collect();
        let (tau, diag) = select_delay(&series(samples), 100, 6).unwrap();
        assert_eq!(diag.period, 120);
        assert_eq!(tau, 7);
        assert_eq!(diag.rule, DelayRule::Ratio);
    }

    #[test]
    fn select_delay_needs_a_peak() {
        let samples = (0..200).map(|t| t as f64).collect();
        assert!(matches!(select_delay(&series(samples), 10, 6), Err(EmbeddingError::NoPeriod(_))));
    }

    #[test]
    fn cloud_size_threshold() {
        let cloud = |n: usize| embed(&ramp(n + 1), &EmbeddingParams::new(2, 1, 1)).unwrap();
        assert_eq!(check_cloud_size(&cloud(39), 40), CloudCheck::TooFewPoints { points: 39, min_points: 40 });
        assert_eq!(check_cloud_size(&cloud(40), 40), CloudCheck::Accepted);
        // d = 630, tau = 1, skip = 5 on a 1337-sample record
        let long = embed(&ramp(1337), &EmbeddingParams::new(630, 1, 5)).unwrap();
        assert_eq!(long.len(), 142);
        assert_eq!(check_cloud_size(&long, 40), CloudCheck::Accepted);
    }

    fn naive_count(len: usize, d: usize, tau: usize, skip: usize) -> usize {
        let mut count = 0;
        let mut k = 0;
        while k + (d - 1) * tau < len {
            count += 1;
            k += skip;
        }
        count
    }

    proptest! {
        #[test]
        fn count_formula(len in 1usize..400, d in 2usize..20, tau in 1usize..20, skip in 1usize..10) {
            let params = EmbeddingParams::new(d, tau, skip);
            match embed(&ramp(len), &params) {
                Ok(cloud) => prop_assert_eq!(cloud.len(), naive_count(len, d, tau, skip)),
                Err(_) => prop_assert_eq!(naive_count(len, d, tau, skip), 0),
            }
        }

        #[test]
        fn linear_and_translation_equivariant(
            samples in prop::collection::vec(-1.0f64..1.0, 40..120),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
        ) {
            let params = EmbeddingParams::new(4, 3, 2);
            let base = embed(&series(samples.clone()), &params).unwrap();
            let scaled = embed(&series(samples.iter().map(|x| alpha * x).collect()), &params).unwrap();
            let shifted = embed(&series(samples.iter().map(|x| x + beta).collect()), &params).unwrap();
            for i in 0..base.len() {
                for j in 0..4 {
                    prop_assert_eq!(scaled.point(i)[j], alpha * base.point(i)[j]);
                    prop_assert_eq!(shifted.point(i)[j], base.point(i)[j] + beta);
                }
            }
        }

        #[test]
        fn skip_subsamples_dense_cloud(samples in prop::collection::vec(-1.0f64..1.0, 30..100), skip in 1usize..7) {
            let dense = embed(&series(samples.clone()), &EmbeddingParams::new(3, 2, 1)).unwrap();
            let sparse = embed(&series(samples), &EmbeddingParams::new(3, 2, skip)).unwrap();
            for (i, point) in sparse.points().enumerate() {
                prop_assert_eq!(point, dense.point(i * skip));
            }
        }
    }
}
