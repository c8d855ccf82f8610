//! Synthetic series: the three fundamental variations of a cosine carrier and
//! seeded voiced-like / voiceless-like stand-ins for phone recordings.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{SignalError, TimeSeries};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationKind {
    /// `cos(R(t) * t)`
    Frequency,
    /// `R(t) * cos(t)`
    Amplitude,
    /// `cos(t) + R(t)`
    AverageLine,
}

impl VariationKind {
    pub const ALL: [VariationKind; 3] = [VariationKind::Frequency, VariationKind::Amplitude, VariationKind::AverageLine];

    pub fn as_str(self) -> &'static str {
        match self {
            VariationKind::Frequency => "frequency",
            VariationKind::Amplitude => "amplitude",
            VariationKind::AverageLine => "average_line",
        }
    }
}

impl fmt::Display for VariationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s || k.as_str().replace('_', "-") == s)
            .ok_or_else(|| format!("unknown variation kind `{s}` (frequency, amplitude, average_line)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationSpec {
    pub kind: VariationKind,
    /// Ramp start `c/4`; 4 means no variation.
    pub c: u8,
    pub t_max: f64,
    pub dt: f64,
}

impl VariationSpec {
    pub fn new(kind: VariationKind, c: u8) -> Self {
        Self { kind, c, t_max: 7.0 * std::f64::consts::PI, dt: 0.01 }
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if !(1..=4).contains(&self.c) {
            return Err(SignalError::InvalidVariation(format!("c must be in 1..=4, got {}", self.c)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SignalError::InvalidVariation(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(SignalError::InvalidVariation(format!("t_max must be positive, got {}", self.t_max)));
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        (self.t_max / self.dt).floor() as usize + 1
    }
}

/// Samples one of the three variations of `cos(t)` on `t_n = dt * n`.
///
/// All kinds share the linear ramp `R(t) = c/4 + (1 - c/4) t / t_max`, which
/// runs from `c/4` at `t = 0` to 1 at `t = t_max`. The series has
/// `sample_rate == 0` (abstract time).
pub fn gen_variation<T: Scalar>(spec: &VariationSpec) -> Result<TimeSeries<T>, SignalError> {
    spec.validate()?;
    let start = T::of(f64::from(spec.c) / 4.0);
    let t_max = T::of(spec.t_max);
    let dt = T::of(spec.dt);
    let samples = (0..spec.sample_count())
        .map(|n| {
            let t = dt * T::of_usize(n);
            let ramp = start + (T::one() - start) * t / t_max;
            match spec.kind {
                VariationKind::Frequency => (ramp * t).cos(),
                VariationKind::Amplitude => ramp * t.cos(),
                VariationKind::AverageLine => t.cos() + ramp,
            }
        })
        .collect();
    TimeSeries::new(format!("{}-c{}", spec.kind, spec.c), samples, 0)
}

/// Quasi-periodic stand-in for a voiced consonant: a two-harmonic carrier
/// with ramped amplitude and pitch plus white noise of standard deviation
/// `noise_sd`.
pub fn voiced_like<R: Rng + ?Sized>(
    rng: &mut R,
    id: impl Into<String>,
    sample_rate: u32,
    noise_sd: f64,
) -> Result<TimeSeries<f64>, SignalError> {
    let rate = f64::from(sample_rate.max(1));
    let len = rng.random_range(1400..=2200usize);
    let f0 = rng.random_range(90.0..220.0);
    let f1 = f0 * rng.random_range(0.9..1.1);
    let a0 = rng.random_range(0.3..0.6);
    let a1 = rng.random_range(0.3..0.6);
    let second = rng.random_range(0.2..0.5);
    let shift = rng.random_range(0.0..std::f64::consts::TAU);
    let noise = Normal::new(0.0, noise_sd).expect("finite noise level");
    let mut phase = 0.0;
    let samples = (0..len)
        .map(|n| {
            let u = n as f64 / (len - 1) as f64;
            let amp = a0 + (a1 - a0) * u;
            phase += std::f64::consts::TAU * (f0 + (f1 - f0) * u) / rate;
            amp * (phase.sin() + second * (2.0 * phase + shift).sin()) + noise.sample(rng)
        })
        .collect();
    TimeSeries::new(id, samples, sample_rate)
}

/// Noise-like stand-in for a voiceless consonant: seeded Gaussian noise passed
/// through a first-order high-pass (pre-emphasis) filter.
pub fn voiceless_like<R: Rng + ?Sized>(
    rng: &mut R,
    id: impl Into<String>,
    sample_rate: u32,
) -> Result<TimeSeries<f64>, SignalError> {
    let len = rng.random_range(1400..=2200usize);
    let level = rng.random_range(0.1..0.3);
    let coefficient = rng.random_range(0.5..0.95);
    let noise = Normal::new(0.0, level).expect("finite noise level");
    let mut previous = 0.0;
    let samples = (0..len)
        .map(|_| {
            let x: f64 = noise.sample(rng);
            let y = x - coefficient * previous;
            previous = x;
            y
        })
        .collect();
    TimeSeries::new(id, samples, sample_rate)
}
