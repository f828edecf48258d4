//! Raw accelerometer traces and the magnitude transform.
//!
//! A trace is a uniformly sampled sequence of 3-axis accelerometer readings
//! in m/s^2. All downstream analysis works on the per-sample Euclidean
//! magnitude, which is rotation invariant: the phone's orientation while
//! falling does not matter.

use crate::error::{Error, Result};

/// Standard gravity in m/s^2, used as the default local gravity everywhere.
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Default sampling rate of phone accelerometer traces, in Hz.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 100.0;

/// A validated, uniformly sampled 3-axis accelerometer recording.
///
/// Invariants enforced at construction: a positive finite sample rate, at
/// least one sample, and every component finite.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelTrace {
    sample_rate_hz: f64,
    start_time_s: f64,
    samples: Vec<[f64; 3]>,
}

impl AccelTrace {
    /// Builds a trace whose first sample is at t = 0.
    pub fn new(sample_rate_hz: f64, samples: Vec<[f64; 3]>) -> Result<Self> {
        Self::with_start_time(sample_rate_hz, 0.0, samples)
    }

    /// Builds a trace whose first sample is at `start_time_s`.
    pub fn with_start_time(
        sample_rate_hz: f64,
        start_time_s: f64,
        samples: Vec<[f64; 3]>,
    ) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidTrace(format!(
                "sample rate must be positive and finite, got {sample_rate_hz}"
            )));
        }
        if !start_time_s.is_finite() {
            return Err(Error::InvalidTrace(format!(
                "start time must be finite, got {start_time_s}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidTrace("trace has no samples".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidTrace(format!(
                    "non-finite component in sample {i}: [{}, {}, {}]",
                    s[0], s[1], s[2]
                )));
            }
        }
        Ok(AccelTrace {
            sample_rate_hz,
            start_time_s,
            samples,
        })
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn start_time_s(&self) -> f64 {
        self.start_time_s
    }

    pub fn samples(&self) -> &[[f64; 3]] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Timestamp of sample `index` in seconds.
    pub fn time_at(&self, index: usize) -> f64 {
        self.start_time_s + index as f64 / self.sample_rate_hz
    }
}

/// The per-sample Euclidean magnitude of a trace, in m/s^2.
///
/// Values are non-negative and finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSeries {
    sample_rate_hz: f64,
    values: Vec<f64>,
}

impl MagnitudeSeries {
    /// Builds a series from precomputed magnitudes (used by tests and by
    /// consumers that already hold scalar data).
    pub fn from_values(sample_rate_hz: f64, values: Vec<f64>) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidTrace(format!(
                "sample rate must be positive and finite, got {sample_rate_hz}"
            )));
        }
        if values.is_empty() {
            return Err(Error::InvalidTrace(
                "magnitude series has no samples".into(),
            ));
        }
        for (i, v) in values.iter().enumerate() {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::InvalidTrace(format!(
                    "magnitude must be finite and non-negative, got {v} at index {i}"
                )));
            }
        }
        Ok(MagnitudeSeries {
            sample_rate_hz,
            values,
        })
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Collapses a 3-axis trace into its per-sample magnitude,
/// sqrt(ax^2 + ay^2 + az^2).
///
/// Infallible because [`AccelTrace`] guarantees finite components; the
/// result is always non-negative and finite.
pub fn magnitude(trace: &AccelTrace) -> MagnitudeSeries {
    let values = trace
        .samples()
        .iter()
        .map(|[x, y, z]| (x * x + y * y + z * z).sqrt())
        .collect();
    MagnitudeSeries {
        sample_rate_hz: trace.sample_rate_hz(),
        values,
    }
}
