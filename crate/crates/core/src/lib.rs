//! Topological features of one-dimensional signals.
//!
//! A series is cleaned, embedded with a time-delay (sliding window) map, and
//! the Vietoris-Rips persistence of the resulting point cloud is reduced to
//! the (birth, lifetime) pair of its most persistent 1-cycle. Those pairs feed
//! small native classifiers that separate voiced from voiceless consonants.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below name the common instantiations.

pub mod embedding;
pub mod features;
pub mod formats;
pub mod learn;
pub mod persistence;
pub mod scalar;
pub mod signal;

pub use scalar::Scalar;
pub use embedding::{EmbeddingParams, PointCloud};
pub use features::FeatureRecord;
pub use learn::{Dataset, EvalReport, ModelKind, SplitSpec};
pub use persistence::{DistanceMatrix, PersistenceDiagram, RipsOptions};
pub use signal::{ClassLabel, PhoneClassTable, PhoneInterval, TimeSeries};

pub type TimeSeriesF64 = TimeSeries<f64>;
pub type TimeSeriesF32 = TimeSeries<f32>;
pub type PointCloudF64 = PointCloud<f64>;
pub type PointCloudF32 = PointCloud<f32>;
pub type DistanceMatrixF64 = DistanceMatrix<f64>;
pub type PersistenceDiagramF64 = PersistenceDiagram<f64>;
pub type FeatureRecordF64 = FeatureRecord<f64>;
