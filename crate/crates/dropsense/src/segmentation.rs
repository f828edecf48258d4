//! Drop-phase segmentation.
//!
//! A phone-drop recording has four phases: hand hold (magnitude near
//! gravity), free fall (near zero), impact (a sharp spike, possibly with
//! bounces), and rest (near gravity again). This module finds the free-fall
//! region with a sliding-window power scan, then locates touchdown and the
//! first rest instant, and cuts out the impact segment between them.
//!
//! The stages are exposed individually ([`window_power`],
//! [`locate_weightless`], [`detect_touchdown`], [`detect_rest`]) and composed
//! by [`cut`].

use crate::error::{Error, Result};
use crate::signal::{magnitude, AccelTrace, MagnitudeSeries, STANDARD_GRAVITY};

/// Tuning knobs for segmentation. The defaults target 100 Hz phone traces.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationConfig {
    /// Power-scan window length in seconds.
    pub window_size_s: f64,
    /// Power-scan stride in seconds.
    pub step_s: f64,
    /// Touchdown fires at the first sample above `local_gravity * touchdown_factor`.
    pub touchdown_factor: f64,
    /// Half-width of the rest band around gravity, m/s^2.
    pub rest_jitter: f64,
    /// How long the signal must stay inside the rest band, seconds.
    pub rest_duration_s: f64,
    /// Local gravity, m/s^2.
    pub local_gravity: f64,
    /// A window whose mean power is below `weightless_power_ratio *
    /// local_gravity^2` counts as weightless.
    pub weightless_power_ratio: f64,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig {
            window_size_s: 0.10,
            step_s: 0.02,
            touchdown_factor: 2.0,
            rest_jitter: 0.5,
            rest_duration_s: 0.2,
            local_gravity: STANDARD_GRAVITY,
            weightless_power_ratio: 0.25,
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("window_size_s", self.window_size_s),
            ("step_s", self.step_s),
            ("touchdown_factor", self.touchdown_factor),
            ("rest_jitter", self.rest_jitter),
            ("rest_duration_s", self.rest_duration_s),
            ("local_gravity", self.local_gravity),
            ("weightless_power_ratio", self.weightless_power_ratio),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if self.weightless_power_ratio >= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "weightless_power_ratio must be below 1, got {}",
                self.weightless_power_ratio
            )));
        }
        Ok(())
    }

    /// Window length in samples at `rate` Hz (at least 1).
    pub fn window_samples(&self, rate: f64) -> usize {
        ((self.window_size_s * rate).round() as usize).max(1)
    }

    /// Stride in samples at `rate` Hz (at least 1).
    pub fn step_samples(&self, rate: f64) -> usize {
        ((self.step_s * rate).round() as usize).max(1)
    }

    /// Rest-band dwell length in samples at `rate` Hz (at least 1).
    pub fn rest_samples(&self, rate: f64) -> usize {
        ((self.rest_duration_s * rate).round() as usize).max(1)
    }
}

/// Mean power of each analysis window, window starts included for traceability.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    /// Start sample of each window.
    pub window_starts: Vec<usize>,
    /// Mean of squared magnitudes over each window.
    pub powers: Vec<f64>,
}

/// Where the free-fall region was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightlessRegion {
    /// Index into the [`PowerSeries`].
    pub window_index: usize,
    /// Start sample of that window in the magnitude series.
    pub start_sample: usize,
}

/// A cut-out impact segment together with the detected phase boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct DropSegment {
    /// Start sample of the detected weightless window.
    pub weightless_start: usize,
    /// First sample above the touchdown threshold.
    pub touchdown: usize,
    /// First sample of the rest phase.
    pub rest: usize,
    /// Magnitudes from `touchdown` to `rest`, both ends included.
    pub cut: MagnitudeSeries,
    /// Seconds between the weightless-window start and touchdown.
    pub fall_duration_s: f64,
}

/// Computes the mean power (mean of squared magnitudes) of sliding windows.
///
/// Windows advance by the configured stride; a trailing partial window is
/// dropped. Errors with [`Error::SegmentTooShort`] if the series cannot fit
/// a single window.
pub fn window_power(mag: &MagnitudeSeries, cfg: &SegmentationConfig) -> Result<PowerSeries> {
    cfg.validate()?;
    let rate = mag.sample_rate_hz();
    let window = cfg.window_samples(rate);
    let step = cfg.step_samples(rate);
    let values = mag.values();
    if values.len() < window {
        return Err(Error::SegmentTooShort {
            len: values.len(),
            min: window,
        });
    }
    let mut window_starts = Vec::new();
    let mut powers = Vec::new();
    for start in (0..=values.len() - window).step_by(step) {
        let sum: f64 = values[start..start + window].iter().map(|v| v * v).sum();
        window_starts.push(start);
        powers.push(sum / window as f64);
    }
    Ok(PowerSeries {
        window_starts,
        powers,
    })
}

/// Finds the free-fall window in a power series.
///
/// Picks the earliest window whose power falls below
/// `weightless_power_ratio * local_gravity^2`. If no window qualifies, falls
/// back to the global minimum-power window provided it is at least below
/// half of `local_gravity^2`; otherwise the signal contains no fall and
/// [`Error::NoWeightlessRegion`] is returned.
pub fn locate_weightless(
    power: &PowerSeries,
    cfg: &SegmentationConfig,
) -> Result<WeightlessRegion> {
    cfg.validate()?;
    if power.powers.is_empty() || power.powers.len() != power.window_starts.len() {
        return Err(Error::InvalidArgument(
            "power series is empty or inconsistent".into(),
        ));
    }
    let g2 = cfg.local_gravity * cfg.local_gravity;
    let threshold = cfg.weightless_power_ratio * g2;
    for (i, &p) in power.powers.iter().enumerate() {
        if p < threshold {
            return Ok(WeightlessRegion {
                window_index: i,
                start_sample: power.window_starts[i],
            });
        }
    }
    let (min_index, &min_power) = power
        .powers
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty checked above");
    if min_power < 0.5 * g2 {
        return Ok(WeightlessRegion {
            window_index: min_index,
            start_sample: power.window_starts[min_index],
        });
    }
    Err(Error::NoWeightlessRegion)
}

/// Finds touchdown: the first sample at or after `search_from` whose
/// magnitude exceeds `local_gravity * touchdown_factor`.
pub fn detect_touchdown(
    mag: &MagnitudeSeries,
    search_from: usize,
    cfg: &SegmentationConfig,
) -> Result<usize> {
    cfg.validate()?;
    let threshold = cfg.local_gravity * cfg.touchdown_factor;
    for (i, &v) in mag.values().iter().enumerate().skip(search_from) {
        if v > threshold {
            return Ok(i);
        }
    }
    Err(Error::NoTouchdown)
}

/// Finds the first rest instant after touchdown.
///
/// Returns the smallest index `k > touchdown` such that the magnitude at `k`
/// and over the following `rest_duration_s` stays strictly within
/// `rest_jitter` of gravity. At 100 Hz with the default 0.2 s dwell that is
/// a run of 21 in-band samples starting at `k`.
pub fn detect_rest(
    mag: &MagnitudeSeries,
    touchdown: usize,
    cfg: &SegmentationConfig,
) -> Result<usize> {
    cfg.validate()?;
    let values = mag.values();
    let dwell = cfg.rest_samples(mag.sample_rate_hz());
    let in_band = |v: f64| (v - cfg.local_gravity).abs() < cfg.rest_jitter;
    // k + dwell must stay inside the series, so the last candidate start is
    // len - 1 - dwell.
    let last_start = match values.len().checked_sub(dwell + 1) {
        Some(last) => last,
        None => return Err(Error::NeverSettles),
    };
    for k in touchdown + 1..=last_start {
        if values[k..=k + dwell].iter().all(|&v| in_band(v)) {
            return Ok(k);
        }
    }
    Err(Error::NeverSettles)
}

/// Runs the full segmentation pipeline on a raw trace.
pub fn cut(trace: &AccelTrace, cfg: &SegmentationConfig) -> Result<DropSegment> {
    cut_magnitude(&magnitude(trace), cfg)
}

/// Runs the full segmentation pipeline on a precomputed magnitude series.
pub fn cut_magnitude(mag: &MagnitudeSeries, cfg: &SegmentationConfig) -> Result<DropSegment> {
    cfg.validate()?;
    let rate = mag.sample_rate_hz();
    let power = window_power(mag, cfg)?;
    let region = locate_weightless(&power, cfg)?;
    // Touchdown cannot be inside the weightless window itself, so start the
    // scan at the first sample after it.
    let search_from = region.start_sample + cfg.window_samples(rate);
    let touchdown = detect_touchdown(mag, search_from, cfg)?;
    let rest = detect_rest(mag, touchdown, cfg)?;
    let cut_values = mag.values()[touchdown..=rest].to_vec();
    let cut = MagnitudeSeries::from_values(rate, cut_values)?;
    Ok(DropSegment {
        weightless_start: region.start_sample,
        touchdown,
        rest,
        cut,
        fall_duration_s: (touchdown - region.start_sample) as f64 / rate,
    })
}
