//! C ABI for the dropsense pipeline.
//!
//! The API follows the usual handle pattern: constructors return opaque
//! pointers through an out-parameter and a [`DsStatus`] code, every handle
//! has a matching `_free`, and the most recent failure message for the
//! calling thread is available from [`ds_last_error_message`]. Handles are
//! not thread-safe to mutate concurrently, but distinct handles can be used
//! from distinct threads freely.
//!
//! The matching header (`include/dropsense.h`) is generated by cbindgen at
//! build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;
use std::slice;

use dropsense::features::{features_from_segment, FEATURE_COUNT};
use dropsense::io::{load_model, read_trace_csv};
use dropsense::mlp::{predict, MlpModel, CLASS_COUNT};
use dropsense::segmentation::{cut, DropSegment, SegmentationConfig};
use dropsense::signal::AccelTrace;
use dropsense::Error;

/// Number of entries written by `ds_segment_features`.
pub const DS_FEATURE_COUNT: usize = 25;

/// Number of material classes (and probability entries).
pub const DS_CLASS_COUNT: usize = 5;

// The literals above end up in the generated header; make sure they cannot
// drift from the core crate.
const _: () = assert!(DS_FEATURE_COUNT == FEATURE_COUNT);
const _: () = assert!(DS_CLASS_COUNT == CLASS_COUNT);

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument or input value is out of range or inconsistent.
    InvalidInput = 2,
    /// The trace contains no detectable drop (see the error message).
    SegmentationFailed = 3,
    /// The segment cannot support feature extraction.
    DegenerateSegment = 4,
    /// A file could not be read or is missing.
    IoFailed = 5,
    /// A file was read but does not match the expected format.
    ParseFailed = 6,
}

/// An accelerometer recording. Opaque; create with `ds_trace_new` or
/// `ds_trace_load_csv`, release with `ds_trace_free`.
pub struct DsTrace {
    inner: AccelTrace,
}

/// A cut impact segment. Opaque; create with `ds_trace_segment`, release
/// with `ds_segment_free`.
pub struct DsSegment {
    inner: DropSegment,
}

/// A trained classifier. Opaque; create with `ds_model_load`, release with
/// `ds_model_free`.
pub struct DsModel {
    inner: MlpModel,
}

/// Segmentation thresholds; obtain defaults from
/// `ds_segmentation_config_default` and override individual fields.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DsSegmentationConfig {
    /// Power-scan window length, seconds.
    pub window_size_s: f64,
    /// Power-scan stride, seconds.
    pub step_s: f64,
    /// Touchdown threshold as a multiple of local gravity.
    pub touchdown_factor: f64,
    /// Half-width of the rest band around gravity, m/s^2.
    pub rest_jitter: f64,
    /// Required dwell inside the rest band, seconds.
    pub rest_duration_s: f64,
    /// Local gravity, m/s^2.
    pub local_gravity: f64,
    /// Weightless power threshold as a fraction of gravity squared.
    pub weightless_power_ratio: f64,
}

/// Detected phase boundaries of a segment, as sample indices of the
/// original trace.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DsSegmentInfo {
    /// First sample of the weightless window.
    pub weightless_start: usize,
    /// Touchdown sample (first above the impact threshold).
    pub touchdown: usize,
    /// First rest sample.
    pub rest: usize,
    /// Length of the cut segment (touchdown..=rest).
    pub cut_len: usize,
    /// Free-fall duration, seconds.
    pub fall_duration_s: f64,
    /// Sample rate of the trace, Hz.
    pub sample_rate_hz: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn clear_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

fn fail(status: DsStatus, message: impl Into<Vec<u8>>) -> DsStatus {
    let text = CString::new(message).unwrap_or_else(|_| CString::new("invalid message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
    status
}

fn fail_with(err: Error) -> DsStatus {
    let status = match &err {
        Error::InvalidTrace(_)
        | Error::InvalidConfig(_)
        | Error::InvalidScenario(_)
        | Error::InvalidArgument(_)
        | Error::InvalidDataset(_) => DsStatus::InvalidInput,
        Error::SegmentTooShort { .. }
        | Error::NoWeightlessRegion
        | Error::NoTouchdown
        | Error::NeverSettles => DsStatus::SegmentationFailed,
        Error::DegenerateSegment(_) | Error::DegeneratePeak(_) => DsStatus::DegenerateSegment,
        Error::Malformed { .. } | Error::MissingColumn { .. } | Error::VersionMismatch { .. } => {
            DsStatus::ParseFailed
        }
        Error::MissingFile(_) | Error::Io { .. } => DsStatus::IoFailed,
    };
    fail(status, err.to_string())
}

fn null_argument(what: &str) -> DsStatus {
    fail(DsStatus::NullArgument, format!("{what} must not be null"))
}

/// Returns the library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Returns the error message of the most recent failing call on this
/// thread, or null if no call has failed yet.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ds_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |msg| msg.as_ptr())
    })
}

/// Returns the default segmentation thresholds (tuned for 100 Hz traces).
#[no_mangle]
pub extern "C" fn ds_segmentation_config_default() -> DsSegmentationConfig {
    let cfg = SegmentationConfig::default();
    DsSegmentationConfig {
        window_size_s: cfg.window_size_s,
        step_s: cfg.step_s,
        touchdown_factor: cfg.touchdown_factor,
        rest_jitter: cfg.rest_jitter,
        rest_duration_s: cfg.rest_duration_s,
        local_gravity: cfg.local_gravity,
        weightless_power_ratio: cfg.weightless_power_ratio,
    }
}

fn to_config(c: &DsSegmentationConfig) -> SegmentationConfig {
    SegmentationConfig {
        window_size_s: c.window_size_s,
        step_s: c.step_s,
        touchdown_factor: c.touchdown_factor,
        rest_jitter: c.rest_jitter,
        rest_duration_s: c.rest_duration_s,
        local_gravity: c.local_gravity,
        weightless_power_ratio: c.weightless_power_ratio,
    }
}

unsafe fn path_from(raw: *const c_char) -> PathBuf {
    PathBuf::from(CStr::from_ptr(raw).to_string_lossy().into_owned())
}

/// Builds a trace from interleaved samples `[x0, y0, z0, x1, y1, z1, ...]`.
///
/// # Safety
/// `samples_xyz` must point to `3 * sample_count` readable doubles and
/// `out_trace` to a writable pointer slot. On success `*out_trace` owns the
/// new handle; free it with `ds_trace_free`.
#[no_mangle]
pub unsafe extern "C" fn ds_trace_new(
    sample_rate_hz: f64,
    samples_xyz: *const f64,
    sample_count: usize,
    out_trace: *mut *mut DsTrace,
) -> DsStatus {
    if out_trace.is_null() {
        return null_argument("out_trace");
    }
    *out_trace = ptr::null_mut();
    if samples_xyz.is_null() {
        return null_argument("samples_xyz");
    }
    clear_error();
    let flat = slice::from_raw_parts(samples_xyz, sample_count * 3);
    let samples: Vec<[f64; 3]> = flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    match AccelTrace::new(sample_rate_hz, samples) {
        Ok(inner) => {
            *out_trace = Box::into_raw(Box::new(DsTrace { inner }));
            DsStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Loads a trace from a `t,ax,ay,az` CSV file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out_trace` a writable
/// pointer slot. On success `*out_trace` owns the new handle.
#[no_mangle]
pub unsafe extern "C" fn ds_trace_load_csv(
    path: *const c_char,
    out_trace: *mut *mut DsTrace,
) -> DsStatus {
    if out_trace.is_null() {
        return null_argument("out_trace");
    }
    *out_trace = ptr::null_mut();
    if path.is_null() {
        return null_argument("path");
    }
    clear_error();
    match read_trace_csv(&path_from(path)) {
        Ok(inner) => {
            *out_trace = Box::into_raw(Box::new(DsTrace { inner }));
            DsStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Number of samples in a trace (0 for null).
///
/// # Safety
/// `trace` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ds_trace_len(trace: *const DsTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.inner.len())
}

/// Sample rate of a trace in Hz (0 for null).
///
/// # Safety
/// `trace` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ds_trace_sample_rate(trace: *const DsTrace) -> f64 {
    trace.as_ref().map_or(0.0, |t| t.inner.sample_rate_hz())
}

/// Releases a trace handle. Null is a no-op.
///
/// # Safety
/// `trace` must be null or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ds_trace_free(trace: *mut DsTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Cuts the impact segment out of a trace. A null `config` uses defaults.
///
/// # Safety
/// `trace` must be a live handle, `config` null or a readable struct, and
/// `out_segment` a writable pointer slot. On success `*out_segment` owns
/// the new handle; free it with `ds_segment_free`.
#[no_mangle]
pub unsafe extern "C" fn ds_trace_segment(
    trace: *const DsTrace,
    config: *const DsSegmentationConfig,
    out_segment: *mut *mut DsSegment,
) -> DsStatus {
    if out_segment.is_null() {
        return null_argument("out_segment");
    }
    *out_segment = ptr::null_mut();
    let Some(trace) = trace.as_ref() else {
        return null_argument("trace");
    };
    clear_error();
    let cfg = config
        .as_ref()
        .map_or_else(SegmentationConfig::default, to_config);
    match cut(&trace.inner, &cfg) {
        Ok(inner) => {
            *out_segment = Box::into_raw(Box::new(DsSegment { inner }));
            DsStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Copies the detected boundaries of a segment into `out_info`.
///
/// # Safety
/// `segment` must be a live handle and `out_info` a writable struct slot.
#[no_mangle]
pub unsafe extern "C" fn ds_segment_info(
    segment: *const DsSegment,
    out_info: *mut DsSegmentInfo,
) -> DsStatus {
    if out_info.is_null() {
        return null_argument("out_info");
    }
    let Some(segment) = segment.as_ref() else {
        return null_argument("segment");
    };
    clear_error();
    let s = &segment.inner;
    *out_info = DsSegmentInfo {
        weightless_start: s.weightless_start,
        touchdown: s.touchdown,
        rest: s.rest,
        cut_len: s.cut.len(),
        fall_duration_s: s.fall_duration_s,
        sample_rate_hz: s.cut.sample_rate_hz(),
    };
    DsStatus::Ok
}

/// Copies up to `capacity` cut magnitudes into `buffer` and returns the
/// full cut length, so a first call with capacity 0 sizes the buffer.
///
/// # Safety
/// `segment` must be null or a live handle; `buffer` must point to at least
/// `capacity` writable doubles when `capacity > 0`.
#[no_mangle]
pub unsafe extern "C" fn ds_segment_values(
    segment: *const DsSegment,
    buffer: *mut f64,
    capacity: usize,
) -> usize {
    let Some(segment) = segment.as_ref() else {
        return 0;
    };
    let values = segment.inner.cut.values();
    if !buffer.is_null() && capacity > 0 {
        let n = values.len().min(capacity);
        ptr::copy_nonoverlapping(values.as_ptr(), buffer, n);
    }
    values.len()
}

/// Releases a segment handle. Null is a no-op.
///
/// # Safety
/// `segment` must be null or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ds_segment_free(segment: *mut DsSegment) {
    if !segment.is_null() {
        drop(Box::from_raw(segment));
    }
}

/// Extracts the 25 features of a segment into `out_features`.
///
/// # Safety
/// `segment` must be a live handle and `out_features` must point to
/// `DS_FEATURE_COUNT` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ds_segment_features(
    segment: *const DsSegment,
    min_prominence: f64,
    out_features: *mut f64,
) -> DsStatus {
    if out_features.is_null() {
        return null_argument("out_features");
    }
    let Some(segment) = segment.as_ref() else {
        return null_argument("segment");
    };
    clear_error();
    match features_from_segment(&segment.inner, min_prominence) {
        Ok(vector) => {
            let array = vector.to_array();
            ptr::copy_nonoverlapping(array.as_ptr(), out_features, FEATURE_COUNT);
            DsStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Loads a trained model from JSON.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out_model` a writable
/// pointer slot. On success `*out_model` owns the new handle; free it with
/// `ds_model_free`.
#[no_mangle]
pub unsafe extern "C" fn ds_model_load(
    path: *const c_char,
    out_model: *mut *mut DsModel,
) -> DsStatus {
    if out_model.is_null() {
        return null_argument("out_model");
    }
    *out_model = ptr::null_mut();
    if path.is_null() {
        return null_argument("path");
    }
    clear_error();
    match load_model(&path_from(path)) {
        Ok(inner) => {
            *out_model = Box::into_raw(Box::new(DsModel { inner }));
            DsStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Releases a model handle. Null is a no-op.
///
/// # Safety
/// `model` must be null or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ds_model_free(model: *mut DsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn write_prediction(
    prediction: dropsense::Prediction,
    out_label: *mut u32,
    out_probabilities: *mut f64,
) {
    if !out_label.is_null() {
        *out_label = prediction.label as u32;
    }
    if !out_probabilities.is_null() {
        ptr::copy_nonoverlapping(
            prediction.probabilities.as_ptr(),
            out_probabilities,
            CLASS_COUNT,
        );
    }
}

/// Classifies a feature vector. `out_probabilities` may be null if only the
/// label is wanted.
///
/// # Safety
/// `model` must be a live handle; `features` must point to
/// `DS_FEATURE_COUNT` readable doubles; `out_label` and `out_probabilities`
/// must each be null or writable (`out_probabilities` with
/// `DS_CLASS_COUNT` slots).
#[no_mangle]
pub unsafe extern "C" fn ds_model_predict(
    model: *const DsModel,
    features: *const f64,
    out_label: *mut u32,
    out_probabilities: *mut f64,
) -> DsStatus {
    let Some(model) = model.as_ref() else {
        return null_argument("model");
    };
    if features.is_null() {
        return null_argument("features");
    }
    clear_error();
    let mut input = [0.0f64; FEATURE_COUNT];
    input.copy_from_slice(slice::from_raw_parts(features, FEATURE_COUNT));
    match predict(&model.inner, &input) {
        Ok(prediction) => {
            write_prediction(prediction, out_label, out_probabilities);
            DsStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Runs the full pipeline on a trace: segment with default thresholds,
/// extract features, classify.
///
/// # Safety
/// Same contracts as `ds_trace_segment` and `ds_model_predict`.
#[no_mangle]
pub unsafe extern "C" fn ds_model_predict_trace(
    model: *const DsModel,
    trace: *const DsTrace,
    min_prominence: f64,
    out_label: *mut u32,
    out_probabilities: *mut f64,
) -> DsStatus {
    let Some(model) = model.as_ref() else {
        return null_argument("model");
    };
    let Some(trace) = trace.as_ref() else {
        return null_argument("trace");
    };
    clear_error();
    let result = cut(&trace.inner, &SegmentationConfig::default())
        .and_then(|segment| features_from_segment(&segment, min_prominence))
        .and_then(|features| predict(&model.inner, &features.to_array()));
    match result {
        Ok(prediction) => {
            write_prediction(prediction, out_label, out_probabilities);
            DsStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Returns the static material name for a class label, or null if the
/// label is out of range.
#[no_mangle]
pub extern "C" fn ds_material_name(label: u32) -> *const c_char {
    const NAMES: [&CStr; 5] = [c"quilt", c"carpet", c"asphalt", c"granite", c"marble"];
    NAMES
        .get(label as usize)
        .map_or(ptr::null(), |name| name.as_ptr())
}
