//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the signal, embedding and persistence code is generic over.
///
/// Implemented for `f32` and `f64`. Classifiers in [`crate::learn`] always
/// work in `f64`; convert with [`Scalar::to_f64_lossy`] at that boundary.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + FromStr + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` constant, panicking only if the target type cannot
    /// represent finite values at all (never the case for `f32`/`f64`).
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("scalar conversion from f64")
    }

    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("scalar conversion from usize")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Total order for finite scalars. NaN compares equal to everything, which
/// never happens for values that passed construction-time validation.
pub(crate) fn total_cmp<T: Scalar>(a: &T, b: &T) -> std::cmp::Ordering {
    a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
}
