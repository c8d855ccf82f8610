//! Vietoris-Rips persistent homology in dimensions 0 and 1 over the
//! two-element field.
//!
//! [`rips_persistence`] is the production engine: union-find for dimension 0
//! and a coboundary-matrix reduction with clearing for dimension 1.
//! [`brute_force_persistence`] builds the full boundary matrix and reduces it
//! naively; it shares no reduction code with the engine and exists to check it.

mod diagram;
mod distance;
mod oracle;
mod rips;
mod union_find;

use thiserror::Error;

pub use diagram::{max_persistence, MaxPersistence, PersistenceDiagram};
pub use distance::DistanceMatrix;
pub use oracle::{brute_force_persistence, ORACLE_MAX_POINTS};
pub use rips::{rips_persistence, RipsOptions, Threshold};
pub use union_find::UnionFind;

#[derive(Debug, Error, PartialEq)]
pub enum PersistenceError {
    #[error("persistence of an empty point set")]
    EmptyInput,
    #[error("brute-force reduction refuses {n} points (limit {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
}
