use super::{SignalError, TimeSeries};
use crate::scalar::Scalar;

/// Mean-centred, biased, normalized autocorrelation for lags `0..len`.
///
/// `r(k) = sum_t (x_t - m)(x_{t+k} - m) / sum_t (x_t - m)^2`, so `r(0) == 1`
/// exactly and `|r(k)| <= 1`.
pub fn autocorrelation<T: Scalar>(series: &TimeSeries<T>) -> Result<Vec<T>, SignalError> {
    let x = series.samples();
    if x.len() < 2 {
        return Err(SignalError::TooShort { id: series.id().to_string(), len: x.len(), needed: 2 });
    }
    let mean = x.iter().copied().sum::<T>() / T::of_usize(x.len());
    let centred: Vec<T> = x.iter().map(|&v| v - mean).collect();
    let energy: T = centred.iter().map(|&v| v * v).sum();
    if energy <= T::zero() {
        return Err(SignalError::Degenerate(series.id().to_string()));
    }
    let mut acf = Vec::with_capacity(x.len());
    acf.push(T::one());
    for lag in 1..x.len() {
        let sum: T = centred.iter().zip(&centred[lag..]).map(|(&a, &b)| a * b).sum();
        acf.push(sum / energy);
    }
    Ok(acf)
}

/// Lag of the first peak of an autocorrelation sequence.
///
/// A peak is a strict rise into a top followed by a strict fall. A top may be
/// flat, in which case the last lag of the plateau is reported; a strict
/// local maximum is the one-sample case. Returns `None` when the sequence
/// never rises and then falls.
pub fn first_acf_peak<T: Scalar>(acf: &[T]) -> Option<usize> {
    let mut k = 1;
    while k + 1 < acf.len() {
        if acf[k - 1] < acf[k] {
            let mut end = k;
            while end + 1 < acf.len() && acf[end + 1] == acf[k] {
                end += 1;
            }
            if end + 1 < acf.len() && acf[end + 1] < acf[end] {
                return Some(end);
            }
            k = end + 1;
        } else {
            k += 1;
        }
    }
    None
}
