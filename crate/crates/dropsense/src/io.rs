//! On-disk formats: trace CSV, feature tables, model files, manifests, and
//! the smaller diagnostic artifacts.
//!
//! All floating point values are written with Rust's shortest-roundtrip
//! formatting, so a value read back is bit-identical to the one written and
//! repeated runs with the same inputs produce byte-identical files. No
//! artifact embeds timestamps or hostnames for the same reason.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetManifest, ManifestRecord, MANIFEST_FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
use crate::mlp::{ConfusionMatrix, MlpModel, CLASS_COUNT};
use crate::segmentation::DropSegment;
use crate::signal::AccelTrace;
use crate::simulator::{validate_material_set, MaterialParams, MATERIAL_NAMES};

/// Model file schema version written by this crate.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Trace CSV column names, in order.
pub const TRACE_COLUMNS: [&str; 4] = ["t", "ax", "ay", "az"];

/// One row of a feature table.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub trace_id: String,
    pub label: usize,
    pub features: FeatureVector,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Splits one CSV line into trimmed fields. The formats here never quote or
/// embed separators, so a plain split is exact.
fn csv_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

/// Checks a header against the expected column names. A missing column is
/// reported by name; anything else (reordering, extras) as a malformed
/// header.
fn check_header<S: AsRef<str>>(
    path: &Path,
    line: &str,
    expected: &[S],
    format: &'static str,
) -> Result<()> {
    let fields = csv_fields(line);
    if fields.len() == expected.len() && fields.iter().zip(expected).all(|(f, e)| *f == e.as_ref())
    {
        return Ok(());
    }
    for column in expected {
        if !fields.contains(&column.as_ref()) {
            return Err(Error::MissingColumn {
                path: path.to_path_buf(),
                column: column.as_ref().to_string(),
            });
        }
    }
    let expected_joined: Vec<&str> = expected.iter().map(AsRef::as_ref).collect();
    Err(Error::malformed(
        path,
        format,
        format!(
            "header columns are `{}`, expected `{}`",
            fields.join(","),
            expected_joined.join(",")
        ),
    ))
}

fn parse_float(
    path: &Path,
    format: &'static str,
    row: usize,
    column: &str,
    raw: &str,
) -> Result<f64> {
    let value: f64 = raw.parse().map_err(|_| {
        Error::malformed(
            path,
            format,
            format!("row {row}: `{raw}` in column {column} is not a number"),
        )
    })?;
    if !value.is_finite() {
        return Err(Error::malformed(
            path,
            format,
            format!("row {row}: column {column} is not finite"),
        ));
    }
    Ok(value)
}

/// Writes a trace as `t,ax,ay,az` rows at the trace's sample spacing.
pub fn write_trace_csv(path: &Path, trace: &AccelTrace) -> Result<()> {
    let mut out = String::with_capacity(trace.len() * 32 + 16);
    out.push_str(&TRACE_COLUMNS.join(","));
    out.push('\n');
    for (i, sample) in trace.samples().iter().enumerate() {
        let t = trace.time_at(i);
        out.push_str(&format!("{t},{},{},{}\n", sample[0], sample[1], sample[2]));
    }
    write_file(path, &out)
}

/// Reads a `t,ax,ay,az` CSV back into a trace.
///
/// The sample rate is inferred from the time column, which must be uniform;
/// rates within one part in a million of an integer are snapped to it.
pub fn read_trace_csv(path: &Path) -> Result<AccelTrace> {
    const FORMAT: &str = "trace csv";
    let text = read_file(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::malformed(path, FORMAT, "file is empty"))?;
    check_header(path, header, &TRACE_COLUMNS, FORMAT)?;

    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (line_no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let row = line_no + 1;
        let fields = csv_fields(line);
        if fields.len() != TRACE_COLUMNS.len() {
            return Err(Error::malformed(
                path,
                FORMAT,
                format!(
                    "row {row}: expected {} fields, got {}",
                    TRACE_COLUMNS.len(),
                    fields.len()
                ),
            ));
        }
        times.push(parse_float(path, FORMAT, row, "t", fields[0])?);
        samples.push([
            parse_float(path, FORMAT, row, "ax", fields[1])?,
            parse_float(path, FORMAT, row, "ay", fields[2])?,
            parse_float(path, FORMAT, row, "az", fields[3])?,
        ]);
    }
    if samples.is_empty() {
        return Err(Error::malformed(
            path,
            FORMAT,
            "no samples after the header",
        ));
    }
    if samples.len() == 1 {
        return Err(Error::malformed(
            path,
            FORMAT,
            "a single sample does not determine the sample rate",
        ));
    }

    let dt = times[1] - times[0];
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::malformed(
            path,
            FORMAT,
            format!("time step from row 2 to row 3 is {dt}, expected a positive step"),
        ));
    }
    for (i, pair) in times.windows(2).enumerate() {
        let step = pair[1] - pair[0];
        if ((step - dt) / dt).abs() > 1e-6 {
            return Err(Error::malformed(
                path,
                FORMAT,
                format!(
                    "non-uniform sampling at row {}: step {step} s, expected {dt} s",
                    i + 3
                ),
            ));
        }
    }
    let mut rate = 1.0 / dt;
    let snapped = rate.round();
    if snapped > 0.0 && ((rate - snapped) / snapped).abs() <= 1e-6 {
        rate = snapped;
    }
    AccelTrace::with_start_time(rate, times[0], samples)
}

/// Phase boundaries stored next to a segment dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentSidecar {
    pub weightless_start: usize,
    pub t_c: usize,
    pub t_w: usize,
    pub fall_duration_s: f64,
    pub sample_rate_hz: f64,
}

/// Writes a cut segment as `index,magnitude` rows plus a JSON sidecar with
/// the detected boundaries. Indices refer to the original trace.
pub fn write_segment_dump(csv_path: &Path, segment: &DropSegment) -> Result<PathBuf> {
    let mut out = String::with_capacity(segment.cut.len() * 24 + 16);
    out.push_str("index,magnitude\n");
    for (offset, value) in segment.cut.values().iter().enumerate() {
        out.push_str(&format!("{},{value}\n", segment.touchdown + offset));
    }
    write_file(csv_path, &out)?;

    let sidecar = SegmentSidecar {
        weightless_start: segment.weightless_start,
        t_c: segment.touchdown,
        t_w: segment.rest,
        fall_duration_s: segment.fall_duration_s,
        sample_rate_hz: segment.cut.sample_rate_hz(),
    };
    let sidecar_path = csv_path.with_extension("json");
    write_json(&sidecar_path, &sidecar)?;
    Ok(sidecar_path)
}

fn feature_header() -> String {
    let mut columns = Vec::with_capacity(FEATURE_COUNT + 2);
    columns.push("trace_id");
    columns.push("label");
    columns.extend_from_slice(&FEATURE_NAMES);
    columns.join(",")
}

/// Writes a feature table: `trace_id,label` plus the 25 feature columns.
pub fn write_feature_csv(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 320 + 256);
    out.push_str(&feature_header());
    out.push('\n');
    for row in rows {
        out.push_str(&row.trace_id);
        out.push_str(&format!(",{}", row.label));
        for value in row.features.to_array() {
            out.push_str(&format!(",{value}"));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Reads a feature table written by [`write_feature_csv`].
pub fn read_feature_csv(path: &Path) -> Result<Vec<FeatureRow>> {
    const FORMAT: &str = "feature csv";
    let text = read_file(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::malformed(path, FORMAT, "file is empty"))?;
    let expected: Vec<String> = feature_header().split(',').map(str::to_string).collect();
    check_header(path, header, &expected, FORMAT)?;

    let mut rows = Vec::new();
    for (line_no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let row_no = line_no + 1;
        let fields = csv_fields(line);
        if fields.len() != FEATURE_COUNT + 2 {
            return Err(Error::malformed(
                path,
                FORMAT,
                format!(
                    "row {row_no}: expected {} fields, got {}",
                    FEATURE_COUNT + 2,
                    fields.len()
                ),
            ));
        }
        let trace_id = fields[0].to_string();
        if trace_id.is_empty() {
            return Err(Error::malformed(
                path,
                FORMAT,
                format!("row {row_no}: empty trace_id"),
            ));
        }
        let label: usize = fields[1].parse().map_err(|_| {
            Error::malformed(
                path,
                FORMAT,
                format!("row {row_no}: `{}` is not a class label", fields[1]),
            )
        })?;
        let mut values = [0.0f64; FEATURE_COUNT];
        for (i, value) in values.iter_mut().enumerate() {
            *value = parse_float(path, FORMAT, row_no, FEATURE_NAMES[i], fields[i + 2])?;
        }
        rows.push(FeatureRow {
            trace_id,
            label,
            features: FeatureVector::from_array(values),
        });
    }
    Ok(rows)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::malformed(path, "json", e.to_string()))?;
    text.push('\n');
    write_file(path, &text)
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    #[serde(flatten)]
    model: MlpModel,
}

/// Saves a trained model as versioned JSON.
pub fn save_model(path: &Path, model: &MlpModel) -> Result<()> {
    write_json(
        path,
        &ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            model: model.clone(),
        },
    )
}

/// Loads and validates a model file.
pub fn load_model(path: &Path) -> Result<MlpModel> {
    let text = read_file(path)?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| Error::malformed(path, "model json", e.to_string()))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            path: path.to_path_buf(),
            found: file.format_version,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    file.model.validate()?;
    Ok(file.model)
}

/// Saves a dataset manifest as versioned JSON.
pub fn save_manifest(path: &Path, manifest: &DatasetManifest) -> Result<()> {
    manifest.validate()?;
    write_json(path, manifest)
}

/// Resolves a record's trace file against the manifest's directory.
pub fn record_path(manifest_path: &Path, record: &ManifestRecord) -> PathBuf {
    match manifest_path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir.join(&record.file),
        _ => record.file.clone(),
    }
}

/// Loads a manifest and verifies that every referenced trace file exists.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = read_file(path)?;
    let manifest: DatasetManifest = serde_json::from_str(&text)
        .map_err(|e| Error::malformed(path, "manifest json", e.to_string()))?;
    if manifest.format_version != MANIFEST_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            path: path.to_path_buf(),
            found: manifest.format_version,
            supported: MANIFEST_FORMAT_VERSION,
        });
    }
    manifest.validate()?;
    for record in &manifest.records {
        let file = record_path(path, record);
        if !file.is_file() {
            return Err(Error::MissingFile(file));
        }
    }
    Ok(manifest)
}

/// Loads a material parameter set from a JSON array.
pub fn load_materials(path: &Path) -> Result<Vec<MaterialParams>> {
    let text = read_file(path)?;
    let materials: Vec<MaterialParams> = serde_json::from_str(&text)
        .map_err(|e| Error::malformed(path, "materials json", e.to_string()))?;
    validate_material_set(&materials)?;
    Ok(materials)
}

/// Writes per-epoch validation metrics as `epoch,val_loss,val_accuracy`.
pub fn write_curves_csv(path: &Path, val_loss: &[f64], val_accuracy: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(val_loss.len() * 24 + 32);
    out.push_str("epoch,val_loss,val_accuracy\n");
    for (epoch, (loss, acc)) in val_loss.iter().zip(val_accuracy).enumerate() {
        out.push_str(&format!("{},{loss},{acc}\n", epoch + 1));
    }
    write_file(path, &out)
}

/// Writes a confusion matrix with true materials as rows and predicted
/// materials as columns.
pub fn write_confusion_csv(path: &Path, matrix: &ConfusionMatrix) -> Result<()> {
    let mut out = String::with_capacity(CLASS_COUNT * 48 + 64);
    out.push_str("true_material");
    for name in MATERIAL_NAMES {
        out.push_str(&format!(",{name}"));
    }
    out.push('\n');
    for (label, row) in matrix.counts.iter().enumerate() {
        out.push_str(MATERIAL_NAMES[label]);
        for count in row {
            out.push_str(&format!(",{count}"));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Writes traces that failed segmentation or feature extraction, with the
/// stage error message.
pub fn write_rejects_csv(path: &Path, rejects: &[(String, String)]) -> Result<()> {
    let mut out = String::from("trace_id,reason\n");
    for (trace_id, reason) in rejects {
        // Reasons may contain commas; quote the field.
        out.push_str(&format!("{trace_id},\"{}\"\n", reason.replace('"', "'")));
    }
    write_file(path, &out)
}
