#ifndef DROPSENSE_H
#define DROPSENSE_H

/* Generated by cbindgen from dropsense-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of entries written by `ds_segment_features`.
 */
#define DS_FEATURE_COUNT 25

/**
 * Number of material classes (and probability entries).
 */
#define DS_CLASS_COUNT 5

/**
 * Result of every fallible call.
 */
typedef enum {
  /**
   * The call succeeded.
   */
  DS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  DS_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument or input value is out of range or inconsistent.
   */
  DS_STATUS_INVALID_INPUT = 2,
  /**
   * The trace contains no detectable drop (see the error message).
   */
  DS_STATUS_SEGMENTATION_FAILED = 3,
  /**
   * The segment cannot support feature extraction.
   */
  DS_STATUS_DEGENERATE_SEGMENT = 4,
  /**
   * A file could not be read or is missing.
   */
  DS_STATUS_IO_FAILED = 5,
  /**
   * A file was read but does not match the expected format.
   */
  DS_STATUS_PARSE_FAILED = 6,
} DsStatus;

/**
 * A trained classifier. Opaque; create with `ds_model_load`, release with
 * `ds_model_free`.
 */
typedef struct DsModel DsModel;

/**
 * A cut impact segment. Opaque; create with `ds_trace_segment`, release
 * with `ds_segment_free`.
 */
typedef struct DsSegment DsSegment;

/**
 * An accelerometer recording. Opaque; create with `ds_trace_new` or
 * `ds_trace_load_csv`, release with `ds_trace_free`.
 */
typedef struct DsTrace DsTrace;

/**
 * Segmentation thresholds; obtain defaults from
 * `ds_segmentation_config_default` and override individual fields.
 */
typedef struct {
  /**
   * Power-scan window length, seconds.
   */
  double window_size_s;
  /**
   * Power-scan stride, seconds.
   */
  double step_s;
  /**
   * Touchdown threshold as a multiple of local gravity.
   */
  double touchdown_factor;
  /**
   * Half-width of the rest band around gravity, m/s^2.
   */
  double rest_jitter;
  /**
   * Required dwell inside the rest band, seconds.
   */
  double rest_duration_s;
  /**
   * Local gravity, m/s^2.
   */
  double local_gravity;
  /**
   * Weightless power threshold as a fraction of gravity squared.
   */
  double weightless_power_ratio;
} DsSegmentationConfig;

/**
 * Detected phase boundaries of a segment, as sample indices of the
 * original trace.
 */
typedef struct {
  /**
   * First sample of the weightless window.
   */
  size_t weightless_start;
  /**
   * Touchdown sample (first above the impact threshold).
   */
  size_t touchdown;
  /**
   * First rest sample.
   */
  size_t rest;
  /**
   * Length of the cut segment (touchdown..=rest).
   */
  size_t cut_len;
  /**
   * Free-fall duration, seconds.
   */
  double fall_duration_s;
  /**
   * Sample rate of the trace, Hz.
   */
  double sample_rate_hz;
} DsSegmentInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the library version as a static NUL-terminated string.
 */
const char *ds_version(void);

/**
 * Returns the error message of the most recent failing call on this
 * thread, or null if no call has failed yet.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *ds_last_error_message(void);

/**
 * Returns the default segmentation thresholds (tuned for 100 Hz traces).
 */
DsSegmentationConfig ds_segmentation_config_default(void);

/**
 * Builds a trace from interleaved samples `[x0, y0, z0, x1, y1, z1, ...]`.
 *
 * # Safety
 * `samples_xyz` must point to `3 * sample_count` readable doubles and
 * `out_trace` to a writable pointer slot. On success `*out_trace` owns the
 * new handle; free it with `ds_trace_free`.
 */
DsStatus ds_trace_new(double sample_rate_hz,
                      const double *samples_xyz,
                      size_t sample_count,
                      DsTrace **out_trace);

/**
 * Loads a trace from a `t,ax,ay,az` CSV file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out_trace` a writable
 * pointer slot. On success `*out_trace` owns the new handle.
 */
DsStatus ds_trace_load_csv(const char *path, DsTrace **out_trace);

/**
 * Number of samples in a trace (0 for null).
 *
 * # Safety
 * `trace` must be null or a live handle from this library.
 */
size_t ds_trace_len(const DsTrace *trace);

/**
 * Sample rate of a trace in Hz (0 for null).
 *
 * # Safety
 * `trace` must be null or a live handle from this library.
 */
double ds_trace_sample_rate(const DsTrace *trace);

/**
 * Releases a trace handle. Null is a no-op.
 *
 * # Safety
 * `trace` must be null or an unfreed handle from this library.
 */
void ds_trace_free(DsTrace *trace);

/**
 * Cuts the impact segment out of a trace. A null `config` uses defaults.
 *
 * # Safety
 * `trace` must be a live handle, `config` null or a readable struct, and
 * `out_segment` a writable pointer slot. On success `*out_segment` owns
 * the new handle; free it with `ds_segment_free`.
 */
DsStatus ds_trace_segment(const DsTrace *trace,
                          const DsSegmentationConfig *config,
                          DsSegment **out_segment);

/**
 * Copies the detected boundaries of a segment into `out_info`.
 *
 * # Safety
 * `segment` must be a live handle and `out_info` a writable struct slot.
 */
DsStatus ds_segment_info(const DsSegment *segment, DsSegmentInfo *out_info);

/**
 * Copies up to `capacity` cut magnitudes into `buffer` and returns the
 * full cut length, so a first call with capacity 0 sizes the buffer.
 *
 * # Safety
 * `segment` must be null or a live handle; `buffer` must point to at least
 * `capacity` writable doubles when `capacity > 0`.
 */
size_t ds_segment_values(const DsSegment *segment, double *buffer, size_t capacity);

/**
 * Releases a segment handle. Null is a no-op.
 *
 * # Safety
 * `segment` must be null or an unfreed handle from this library.
 */
void ds_segment_free(DsSegment *segment);

/**
 * Extracts the 25 features of a segment into `out_features`.
 *
 * # Safety
 * `segment` must be a live handle and `out_features` must point to
 * `DS_FEATURE_COUNT` writable doubles.
 */
DsStatus ds_segment_features(const DsSegment *segment, double min_prominence, double *out_features);

/**
 * Loads a trained model from JSON.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out_model` a writable
 * pointer slot. On success `*out_model` owns the new handle; free it with
 * `ds_model_free`.
 */
DsStatus ds_model_load(const char *path, DsModel **out_model);

/**
 * Releases a model handle. Null is a no-op.
 *
 * # Safety
 * `model` must be null or an unfreed handle from this library.
 */
void ds_model_free(DsModel *model);

/**
 * Classifies a feature vector. `out_probabilities` may be null if only the
 * label is wanted.
 *
 * # Safety
 * `model` must be a live handle; `features` must point to
 * `DS_FEATURE_COUNT` readable doubles; `out_label` and `out_probabilities`
 * must each be null or writable (`out_probabilities` with
 * `DS_CLASS_COUNT` slots).
 */
DsStatus ds_model_predict(const DsModel *model,
                          const double *features,
                          uint32_t *out_label,
                          double *out_probabilities);

/**
 * Runs the full pipeline on a trace: segment with default thresholds,
 * extract features, classify.
 *
 * # Safety
 * Same contracts as `ds_trace_segment` and `ds_model_predict`.
 */
DsStatus ds_model_predict_trace(const DsModel *model,
                                const DsTrace *trace,
                                double min_prominence,
                                uint32_t *out_label,
                                double *out_probabilities);

/**
 * Returns the static material name for a class label, or null if the
 * label is out of range.
 */
const char *ds_material_name(uint32_t label);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DROPSENSE_H */
