//! Time-domain feature extraction from a cut impact segment.
//!
//! Every segment is summarized by the same 25 scalar features regardless of
//! its length: value-distribution statistics (max, moments, shape ratios),
//! energy, timing, and peak-structure measurements (counts and widths). The
//! fixed dimensionality is what lets segments of different lengths feed one
//! classifier.
//!
//! Peak widths come in two flavors, both in seconds:
//! - half-height width: where the signal stays above the midpoint between
//!   the peak and its deeper adjacent valley;
//! - half-max width: where it stays above half the peak value.

use crate::error::{Error, Result};
use crate::segmentation::DropSegment;

/// Number of features in a [`FeatureVector`].
pub const FEATURE_COUNT: usize = 25;

/// Default peak prominence threshold in m/s^2. Suppresses sensor-noise
/// micro-peaks that would make the extrema count meaningless.
pub const DEFAULT_MIN_PROMINENCE: f64 = 1.0;

/// Canonical short names of the 25 features, in vector order. These are the
/// column names used by the feature-table CSV.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "max",
    "min",
    "ppv",
    "mean",
    "rv",
    "var",
    "sd",
    "rms",
    "se",
    "sk",
    "sf",
    "pf",
    "pulf",
    "marf",
    "clf",
    "power",
    "fall_time",
    "peak_time",
    "count_pv",
    "pwh",
    "pwh_first3",
    "pwh_sum",
    "pwh_abs",
    "pvn",
    "pvnp",
];

/// The 25 time-domain features of one impact segment. All values are finite.
///
/// Field order matches [`FEATURE_NAMES`] and [`FeatureVector::to_array`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    /// Largest magnitude in the cut.
    pub max: f64,
    /// Smallest magnitude in the cut.
    pub min: f64,
    /// Peak-to-peak value, `max - min`.
    pub peak_to_peak: f64,
    /// Arithmetic mean.
    pub mean: f64,
    /// Mean of square roots (valid because magnitudes are non-negative).
    pub root_amplitude: f64,
    /// Population variance.
    pub variance: f64,
    /// Population standard deviation, `sqrt(variance)`.
    pub std_dev: f64,
    /// Root mean square, `sqrt(mean of squares)`.
    pub rms: f64,
    /// Raw fourth central moment (not normalized by the variance).
    pub fourth_moment: f64,
    /// Raw third central moment (not normalized by the variance).
    pub third_moment: f64,
    /// Shape factor, `rms / mean`.
    pub shape_factor: f64,
    /// Peak factor, `max / rms`.
    pub peak_factor: f64,
    /// Pulse factor, `max / mean`.
    pub pulse_factor: f64,
    /// Margin factor, `max / root_amplitude`.
    pub margin_factor: f64,
    /// Clearance factor, `max / variance`.
    pub clearance_factor: f64,
    /// Total energy, sum of squared magnitudes.
    pub power: f64,
    /// Free-fall duration in seconds (weightless start to touchdown).
    pub fall_time_s: f64,
    /// Seconds from the segment start to the maximum magnitude.
    pub peak_time_s: f64,
    /// Number of detected peaks plus interleaved valleys.
    pub extrema_count: f64,
    /// Half-height width of the tallest peak, seconds.
    pub half_width_s: f64,
    /// Sum of half-height widths over the first three peaks, seconds.
    pub half_width_first3_s: f64,
    /// Sum of half-height widths over all peaks, seconds.
    pub half_width_sum_s: f64,
    /// Half-max width of the tallest peak, seconds.
    pub half_max_width_s: f64,
    /// `extrema_count * n` where `n` is the cut length.
    pub extrema_len_product: f64,
    /// `extrema_count * n / half_width_s`.
    pub extrema_len_per_width: f64,
}

impl FeatureVector {
    /// The features in canonical order (see [`FEATURE_NAMES`]).
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.max,
            self.min,
            self.peak_to_peak,
            self.mean,
            self.root_amplitude,
            self.variance,
            self.std_dev,
            self.rms,
            self.fourth_moment,
            self.third_moment,
            self.shape_factor,
            self.peak_factor,
            self.pulse_factor,
            self.margin_factor,
            self.clearance_factor,
            self.power,
            self.fall_time_s,
            self.peak_time_s,
            self.extrema_count,
            self.half_width_s,
            self.half_width_first3_s,
            self.half_width_sum_s,
            self.half_max_width_s,
            self.extrema_len_product,
            self.extrema_len_per_width,
        ]
    }

    /// Rebuilds a vector from canonical-order values.
    pub fn from_array(values: [f64; FEATURE_COUNT]) -> Self {
        FeatureVector {
            max: values[0],
            min: values[1],
            peak_to_peak: values[2],
            mean: values[3],
            root_amplitude: values[4],
            variance: values[5],
            std_dev: values[6],
            rms: values[7],
            fourth_moment: values[8],
            third_moment: values[9],
            shape_factor: values[10],
            peak_factor: values[11],
            pulse_factor: values[12],
            margin_factor: values[13],
            clearance_factor: values[14],
            power: values[15],
            fall_time_s: values[16],
            peak_time_s: values[17],
            extrema_count: values[18],
            half_width_s: values[19],
            half_width_first3_s: values[20],
            half_width_sum_s: values[21],
            half_max_width_s: values[22],
            extrema_len_product: values[23],
            extrema_len_per_width: values[24],
        }
    }
}

/// One detected peak with its widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Sample index within the cut.
    pub index: usize,
    /// Magnitude at the peak.
    pub value: f64,
    /// Width in seconds where the signal stays above the midpoint between
    /// the peak and its deeper adjacent valley.
    pub half_width_s: f64,
    /// Width in seconds where the signal stays above half the peak value.
    pub half_max_width_s: f64,
}

/// Peaks and the valleys between them, in ascending index order.
///
/// Valleys strictly interleave the peaks: with `p` peaks there are
/// `p - 1` valleys (none if `p <= 1`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
    pub valley_indices: Vec<usize>,
}

impl PeakSet {
    /// Total number of extrema (peaks plus valleys).
    pub fn extrema_count(&self) -> usize {
        self.peaks.len() + self.valley_indices.len()
    }

    /// The tallest peak (first one on exact ties), if any peak exists.
    pub fn tallest(&self) -> Option<&Peak> {
        self.peaks
            .iter()
            .reduce(|best, p| if p.value > best.value { p } else { best })
    }
}

/// Prominence of a strict local maximum at `index`: its height above the
/// higher of the two minima found by walking outward until a taller sample
/// or the segment boundary is reached.
fn prominence(values: &[f64], index: usize) -> f64 {
    let peak = values[index];
    let mut left_min = peak;
    let mut j = index;
    while j > 0 {
        j -= 1;
        if values[j] > peak {
            break;
        }
        left_min = left_min.min(values[j]);
    }
    let mut right_min = peak;
    let mut j = index;
    while j + 1 < values.len() {
        j += 1;
        if values[j] > peak {
            break;
        }
        right_min = right_min.min(values[j]);
    }
    peak - left_min.max(right_min)
}

/// Fractional-sample width of the region around `peak` where the signal
/// stays above `level`, clamped to the segment boundaries. Crossings are
/// located by linear interpolation between the two bracketing samples.
fn width_above(values: &[f64], peak: usize, level: f64) -> f64 {
    let mut left = 0.0;
    for j in (0..peak).rev() {
        if values[j] <= level {
            // values[j] <= level < values[j + 1], so the denominator is > 0.
            left = j as f64 + (level - values[j]) / (values[j + 1] - values[j]);
            break;
        }
    }
    let mut right = (values.len() - 1) as f64;
    for j in peak + 1..values.len() {
        if values[j] <= level {
            right = (j - 1) as f64 + (values[j - 1] - level) / (values[j - 1] - values[j]);
            break;
        }
    }
    right - left
}

/// Finds strict local maxima with at least `min_prominence` of prominence,
/// the interleaving minima, and per-peak widths.
///
/// Requires a cut of at least 3 samples; shorter segments cannot contain an
/// interior extremum.
pub fn detect_peaks(segment: &DropSegment, min_prominence: f64) -> Result<PeakSet> {
    if !(min_prominence.is_finite() && min_prominence >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "min_prominence must be finite and non-negative, got {min_prominence}"
        )));
    }
    let values = segment.cut.values();
    let n = values.len();
    if n < 3 {
        return Err(Error::SegmentTooShort { len: n, min: 3 });
    }
    let rate = segment.cut.sample_rate_hz();

    let mut peak_indices = Vec::new();
    for i in 1..n - 1 {
        if values[i] > values[i - 1]
            && values[i] > values[i + 1]
            && prominence(values, i) >= min_prominence
        {
            peak_indices.push(i);
        }
    }

    let mut valley_indices = Vec::with_capacity(peak_indices.len().saturating_sub(1));
    for pair in peak_indices.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let valley = (lo + 1..hi)
            .reduce(|best, j| if values[j] < values[best] { j } else { best })
            .expect("strict maxima are at least 2 apart");
        valley_indices.push(valley);
    }

    let mut peaks = Vec::with_capacity(peak_indices.len());
    for (k, &p) in peak_indices.iter().enumerate() {
        // Floor on each side: the interleaved valley if there is an inner
        // neighbor, otherwise the minimum out to the segment boundary.
        let left_floor = if k > 0 {
            values[valley_indices[k - 1]]
        } else {
            values[..p].iter().copied().fold(f64::INFINITY, f64::min)
        };
        let right_floor = if k + 1 < peak_indices.len() {
            values[valley_indices[k]]
        } else {
            values[p + 1..]
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        };
        let deeper = left_floor.min(right_floor);
        let half_level = (values[p] + deeper) / 2.0;
        let half_max_level = values[p] / 2.0;
        peaks.push(Peak {
            index: p,
            value: values[p],
            half_width_s: width_above(values, p, half_level) / rate,
            half_max_width_s: width_above(values, p, half_max_level) / rate,
        });
    }

    Ok(PeakSet {
        peaks,
        valley_indices,
    })
}

/// Basic value-distribution statistics of a cut, shared by several features.
struct Stats {
    max: f64,
    min: f64,
    mean: f64,
    root_amplitude: f64,
    variance: f64,
    rms: f64,
    fourth_moment: f64,
    third_moment: f64,
    power: f64,
    argmax: usize,
}

fn stats(values: &[f64]) -> Stats {
    let n = values.len() as f64;
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    let mut argmax = 0;
    let mut sum = 0.0;
    let mut sum_sqrt = 0.0;
    let mut sum_sq = 0.0;
    for (i, &v) in values.iter().enumerate() {
        if v > max {
            max = v;
            argmax = i;
        }
        min = min.min(v);
        sum += v;
        sum_sqrt += v.sqrt();
        sum_sq += v * v;
    }
    let mean = sum / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    Stats {
        max,
        min,
        mean,
        root_amplitude: sum_sqrt / n,
        variance: m2 / n,
        rms: (sum_sq / n).sqrt(),
        fourth_moment: m4 / n,
        third_moment: m3 / n,
        power: sum_sq,
        argmax,
    }
}

/// Computes the 25-feature vector of a segment given its detected peaks.
///
/// Errors:
/// - all-zero cut: every denominator (mean, rms, root amplitude) vanishes;
/// - constant cut: zero variance makes the clearance factor undefined;
/// - no detected peaks: the width features and their ratios are undefined.
pub fn extract_features(segment: &DropSegment, peaks: &PeakSet) -> Result<FeatureVector> {
    let values = segment.cut.values();
    let n = values.len() as f64;
    let s = stats(values);

    if s.mean == 0.0 {
        return Err(Error::DegenerateSegment(
            "all-zero segment: mean, rms and root amplitude vanish".into(),
        ));
    }
    // A relative threshold catches both exact zero variance and variance
    // that is pure rounding noise from a numerically constant cut.
    if s.variance <= s.mean * s.mean * 1e-24 {
        return Err(Error::DegenerateSegment(
            "constant segment: zero variance makes the clearance factor undefined".into(),
        ));
    }
    let tallest = peaks.tallest().ok_or_else(|| {
        Error::DegeneratePeak("no peaks detected: width features are undefined".into())
    })?;

    let extrema = peaks.extrema_count() as f64;
    let half_width_sum: f64 = peaks.peaks.iter().map(|p| p.half_width_s).sum();
    let half_width_first3: f64 = peaks.peaks.iter().take(3).map(|p| p.half_width_s).sum();

    Ok(FeatureVector {
        max: s.max,
        min: s.min,
        peak_to_peak: s.max - s.min,
        mean: s.mean,
        root_amplitude: s.root_amplitude,
        variance: s.variance,
        std_dev: s.variance.sqrt(),
        rms: s.rms,
        fourth_moment: s.fourth_moment,
        third_moment: s.third_moment,
        shape_factor: s.rms / s.mean,
        peak_factor: s.max / s.rms,
        pulse_factor: s.max / s.mean,
        margin_factor: s.max / s.root_amplitude,
        clearance_factor: s.max / s.variance,
        power: s.power,
        fall_time_s: segment.fall_duration_s,
        peak_time_s: s.argmax as f64 / segment.cut.sample_rate_hz(),
        extrema_count: extrema,
        half_width_s: tallest.half_width_s,
        half_width_first3_s: half_width_first3,
        half_width_sum_s: half_width_sum,
        half_max_width_s: tallest.half_max_width_s,
        extrema_len_product: extrema * n,
        extrema_len_per_width: extrema * n / tallest.half_width_s,
    })
}

/// Convenience wrapper: peak detection followed by feature extraction.
pub fn features_from_segment(segment: &DropSegment, min_prominence: f64) -> Result<FeatureVector> {
    let peaks = detect_peaks(segment, min_prominence)?;
    extract_features(segment, &peaks)
}
