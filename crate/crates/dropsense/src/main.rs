//! Batch CLI for the drop-classification pipeline.
//!
//! Subcommands mirror the pipeline stages: `simulate` builds a synthetic
//! dataset, `segment` and `features` turn traces into feature tables,
//! `train`/`eval` fit and score the classifier, and `predict` runs one trace
//! end to end. Every run is reproducible: identical inputs and seeds yield
//! byte-identical artifacts.
//!
//! Exit codes: 0 success, 1 runtime or data failure, 2 usage error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::Value;

use dropsense::dataset::{DatasetManifest, ManifestRecord, Split, SplitCounts};
use dropsense::features::{features_from_segment, DEFAULT_MIN_PROMINENCE};
use dropsense::io::{self, FeatureRow};
use dropsense::mlp::{self, Activation, LabeledSet, TrainConfig};
use dropsense::segmentation::{cut, SegmentationConfig};
use dropsense::simulator::{generate_grid, MaterialParams, MATERIAL_NAMES};
use dropsense::Error;

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "dropsense",
    version,
    about = "Identify ground material from phone-drop accelerometer traces"
)]
struct Cli {
    /// Base random seed (simulation, splitting, and training default to it).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// JSON object supplying defaults for any long flag, keyed by flag name.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic drop grid (4 heights x 5 poses x 5 materials)
    /// plus a dataset manifest.
    Simulate {
        /// Repetitions per grid condition.
        #[arg(long, value_name = "N")]
        reps: Option<usize>,
        /// Output directory for trace CSVs and manifest.json.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// JSON file with custom material parameters (default: built-in presets).
        #[arg(long, value_name = "FILE")]
        materials: Option<PathBuf>,
    },
    /// Cut the impact segment out of one trace.
    Segment {
        /// Input trace CSV (t,ax,ay,az).
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        /// Output prefix; writes PREFIX.csv and PREFIX.json.
        #[arg(long, value_name = "PREFIX")]
        out: Option<PathBuf>,
        /// Power-scan window length, seconds.
        #[arg(long, value_name = "S")]
        window_size_s: Option<f64>,
        /// Power-scan stride, seconds.
        #[arg(long, value_name = "S")]
        step_s: Option<f64>,
        /// Touchdown threshold as a multiple of local gravity.
        #[arg(long, value_name = "X")]
        touchdown_factor: Option<f64>,
        /// Half-width of the rest band around gravity, m/s^2.
        #[arg(long, value_name = "A")]
        rest_jitter: Option<f64>,
        /// Required dwell inside the rest band, seconds.
        #[arg(long, value_name = "S")]
        rest_duration_s: Option<f64>,
        /// Local gravity, m/s^2.
        #[arg(long, value_name = "A")]
        local_gravity: Option<f64>,
        /// Weightless power threshold as a fraction of gravity squared.
        #[arg(long, value_name = "X")]
        weightless_power_ratio: Option<f64>,
    },
    /// Segment every manifest trace and write the feature table.
    Features {
        /// Dataset manifest (from `simulate`).
        #[arg(long, value_name = "FILE")]
        manifest: Option<PathBuf>,
        /// Output feature CSV.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Rejects CSV (default: OUT with a -rejects suffix).
        #[arg(long, value_name = "FILE")]
        rejects: Option<PathBuf>,
        /// Minimum peak prominence, m/s^2.
        #[arg(long, value_name = "A")]
        min_prominence: Option<f64>,
    },
    /// Train the classifier on the train split of a feature table.
    Train {
        /// Feature CSV (from `features`).
        #[arg(long, value_name = "FILE")]
        features: Option<PathBuf>,
        /// Seed for the stratified split (default: --seed).
        #[arg(long, value_name = "N")]
        split_seed: Option<u64>,
        /// Explicit split sizes as train,val,test (default: 7:1:2 ratio).
        #[arg(long, value_name = "T,V,E")]
        counts: Option<String>,
        /// Output model JSON.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Per-epoch validation metrics CSV.
        #[arg(long, value_name = "FILE")]
        curves: Option<PathBuf>,
        /// Hidden layer widths, e.g. 64,32.
        #[arg(long, value_name = "D,D,...")]
        hidden_dims: Option<String>,
        /// Hidden activation: relu or tanh.
        #[arg(long, value_name = "NAME")]
        activation: Option<String>,
        /// Gradient descent step size.
        #[arg(long, value_name = "X")]
        learning_rate: Option<f64>,
        /// Mini-batch size.
        #[arg(long, value_name = "N")]
        batch_size: Option<usize>,
        /// Training epochs.
        #[arg(long, value_name = "N")]
        epochs: Option<usize>,
    },
    /// Evaluate a model on one split of a feature table.
    Eval {
        /// Model JSON (from `train`).
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        /// Feature CSV (from `features`).
        #[arg(long, value_name = "FILE")]
        features: Option<PathBuf>,
        /// Which split to evaluate: train, val, or test.
        #[arg(long, value_name = "NAME")]
        split: Option<String>,
        /// Seed for the stratified split; must match the one used in `train`.
        #[arg(long, value_name = "N")]
        split_seed: Option<u64>,
        /// Explicit split sizes as train,val,test; must match `train`.
        #[arg(long, value_name = "T,V,E")]
        counts: Option<String>,
        /// Also write the confusion matrix as CSV.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Classify a single trace.
    Predict {
        /// Model JSON (from `train`).
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        /// Input trace CSV (t,ax,ay,az).
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        /// Minimum peak prominence, m/s^2.
        #[arg(long, value_name = "A")]
        min_prominence: Option<f64>,
        /// Emit the result as one JSON object.
        #[arg(long)]
        json: bool,
    },
}

/// Failures split by exit code: usage errors exit 2, runtime errors exit 1.
enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

type CliResult<T> = Result<T, CliError>;

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Flag defaults loaded from --config: a flat JSON object keyed by long
/// flag names. Command-line flags win; keys for other subcommands are
/// ignored.
struct FileConfig(serde_json::Map<String, Value>);

impl FileConfig {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(FileConfig(serde_json::Map::new()));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| usage(format!("config {} is not valid JSON: {e}", path.display())))?;
        match value {
            Value::Object(map) => Ok(FileConfig(map)),
            _ => Err(usage(format!(
                "config {} must be a JSON object keyed by flag names",
                path.display()
            ))),
        }
    }

    fn u64(&self, flag: &str, cli: Option<u64>) -> CliResult<Option<u64>> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.0.get(flag) {
            None => Ok(None),
            Some(Value::Number(n)) if n.as_u64().is_some() => Ok(n.as_u64()),
            Some(Value::String(s)) => s
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("config: `{flag}` is not an unsigned integer"))),
            Some(_) => Err(usage(format!(
                "config: `{flag}` is not an unsigned integer"
            ))),
        }
    }

    fn usize(&self, flag: &str, cli: Option<usize>) -> CliResult<Option<usize>> {
        Ok(self.u64(flag, cli.map(|v| v as u64))?.map(|v| v as usize))
    }

    fn f64(&self, flag: &str, cli: Option<f64>) -> CliResult<Option<f64>> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.0.get(flag) {
            None => Ok(None),
            Some(Value::Number(n)) if n.as_f64().is_some() => Ok(n.as_f64()),
            Some(Value::String(s)) => s
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("config: `{flag}` is not a number"))),
            Some(_) => Err(usage(format!("config: `{flag}` is not a number"))),
        }
    }

    fn string(&self, flag: &str, cli: Option<String>) -> CliResult<Option<String>> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.0.get(flag) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            // Lists like counts/hidden-dims may be written as JSON arrays.
            Some(Value::Array(items)) => {
                let mut parts = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        Value::Number(n) => parts.push(n.to_string()),
                        Value::String(s) => parts.push(s.clone()),
                        _ => return Err(usage(format!("config: `{flag}` has a non-scalar item"))),
                    }
                }
                Ok(Some(parts.join(",")))
            }
            Some(Value::Number(n)) => Ok(Some(n.to_string())),
            Some(_) => Err(usage(format!("config: `{flag}` is not a string"))),
        }
    }

    fn path(&self, flag: &str, cli: Option<PathBuf>) -> CliResult<Option<PathBuf>> {
        Ok(self
            .string(flag, cli.map(|p| p.to_string_lossy().into_owned()))?
            .map(PathBuf::from))
    }

    fn bool(&self, flag: &str, cli: bool) -> CliResult<bool> {
        if cli {
            return Ok(true);
        }
        match self.0.get(flag) {
            None => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => Err(usage(format!("config: `{flag}` is not a boolean"))),
        }
    }
}

fn require<T>(flag: &str, value: Option<T>) -> CliResult<T> {
    value.ok_or_else(|| {
        usage(format!(
            "missing required flag --{flag} (pass it or set it in --config)"
        ))
    })
}

fn parse_counts(raw: &str) -> CliResult<SplitCounts> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(usage(format!(
            "--counts expects train,val,test (three integers), got `{raw}`"
        )));
    }
    let mut values = [0usize; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| usage(format!("--counts: `{part}` is not an unsigned integer")))?;
    }
    Ok(SplitCounts {
        train: values[0],
        val: values[1],
        test: values[2],
    })
}

fn parse_dims(raw: &str) -> CliResult<Vec<usize>> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| usage(format!("--hidden-dims: `{part}` is not a layer width")))
        })
        .collect()
}

fn parse_split(raw: &str) -> CliResult<Split> {
    match raw {
        "train" => Ok(Split::Train),
        "val" => Ok(Split::Val),
        "test" => Ok(Split::Test),
        other => Err(usage(format!(
            "--split must be train, val, or test, got `{other}`"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors and 0 on --help/--version.
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let seed = file.u64("seed", cli.seed)?.unwrap_or(DEFAULT_SEED);

    match cli.command {
        Command::Simulate {
            reps,
            out,
            materials,
        } => cmd_simulate(&file, seed, reps, out, materials),
        Command::Segment {
            input,
            out,
            window_size_s,
            step_s,
            touchdown_factor,
            rest_jitter,
            rest_duration_s,
            local_gravity,
            weightless_power_ratio,
        } => {
            let cfg = segmentation_config(
                &file,
                window_size_s,
                step_s,
                touchdown_factor,
                rest_jitter,
                rest_duration_s,
                local_gravity,
                weightless_power_ratio,
            )?;
            cmd_segment(&file, input, out, &cfg)
        }
        Command::Features {
            manifest,
            out,
            rejects,
            min_prominence,
        } => cmd_features(&file, manifest, out, rejects, min_prominence),
        Command::Train {
            features,
            split_seed,
            counts,
            out,
            curves,
            hidden_dims,
            activation,
            learning_rate,
            batch_size,
            epochs,
        } => cmd_train(
            &file,
            seed,
            features,
            split_seed,
            counts,
            out,
            curves,
            hidden_dims,
            activation,
            learning_rate,
            batch_size,
            epochs,
        ),
        Command::Eval {
            model,
            features,
            split,
            split_seed,
            counts,
            out,
        } => cmd_eval(&file, seed, model, features, split, split_seed, counts, out),
        Command::Predict {
            model,
            input,
            min_prominence,
            json,
        } => cmd_predict(&file, model, input, min_prominence, json),
    }
}

#[allow(clippy::too_many_arguments)]
fn segmentation_config(
    file: &FileConfig,
    window_size_s: Option<f64>,
    step_s: Option<f64>,
    touchdown_factor: Option<f64>,
    rest_jitter: Option<f64>,
    rest_duration_s: Option<f64>,
    local_gravity: Option<f64>,
    weightless_power_ratio: Option<f64>,
) -> CliResult<SegmentationConfig> {
    let defaults = SegmentationConfig::default();
    let cfg = SegmentationConfig {
        window_size_s: file
            .f64("window-size-s", window_size_s)?
            .unwrap_or(defaults.window_size_s),
        step_s: file.f64("step-s", step_s)?.unwrap_or(defaults.step_s),
        touchdown_factor: file
            .f64("touchdown-factor", touchdown_factor)?
            .unwrap_or(defaults.touchdown_factor),
        rest_jitter: file
            .f64("rest-jitter", rest_jitter)?
            .unwrap_or(defaults.rest_jitter),
        rest_duration_s: file
            .f64("rest-duration-s", rest_duration_s)?
            .unwrap_or(defaults.rest_duration_s),
        local_gravity: file
            .f64("local-gravity", local_gravity)?
            .unwrap_or(defaults.local_gravity),
        weightless_power_ratio: file
            .f64("weightless-power-ratio", weightless_power_ratio)?
            .unwrap_or(defaults.weightless_power_ratio),
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn cmd_simulate(
    file: &FileConfig,
    seed: u64,
    reps: Option<usize>,
    out: Option<PathBuf>,
    materials: Option<PathBuf>,
) -> CliResult<()> {
    let reps = file.usize("reps", reps)?.unwrap_or(1);
    let out = require("out", file.path("out", out)?)?;
    let materials = match file.path("materials", materials)? {
        Some(path) => io::load_materials(&path).map_err(|e| usage(e.to_string()))?,
        None => MaterialParams::presets(),
    };
    if reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }

    let drops = generate_grid(&materials, reps, seed)?;
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;

    let mut records = Vec::with_capacity(drops.len());
    for drop in &drops {
        let file_name = format!("{}.csv", drop.trace_id);
        io::write_trace_csv(&out.join(&file_name), &drop.trace)?;
        records.push(ManifestRecord {
            trace_id: drop.trace_id.clone(),
            file: PathBuf::from(file_name),
            label: drop.scenario.material.label,
            material: drop.scenario.material.name.clone(),
            height_m: drop.scenario.height_m,
            pose: drop.scenario.pose,
            seed: drop.scenario.seed,
            truth: drop.truth,
            split: None,
        });
    }
    records.sort_by(|a, b| a.trace_id.cmp(&b.trace_id));
    let manifest = DatasetManifest::new(records);
    io::save_manifest(&out.join("manifest.json"), &manifest)?;

    println!("{} traces written", drops.len());
    println!("manifest: {}", out.join("manifest.json").display());
    Ok(())
}

fn cmd_segment(
    file: &FileConfig,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    cfg: &SegmentationConfig,
) -> CliResult<()> {
    let input = require("in", file.path("in", input)?)?;
    let out = require("out", file.path("out", out)?)?;

    let trace = io::read_trace_csv(&input)?;
    let segment = cut(&trace, cfg)?;

    let csv_path = out.with_extension("csv");
    let sidecar_path = io::write_segment_dump(&csv_path, &segment)?;

    println!("t_c: {}", segment.touchdown);
    println!("t_w: {}", segment.rest);
    println!("fall duration: {} s", segment.fall_duration_s);
    println!(
        "segment: {} (boundaries in {})",
        csv_path.display(),
        sidecar_path.display()
    );
    Ok(())
}

fn default_rejects_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "features".to_string());
    out.with_file_name(format!("{stem}-rejects.csv"))
}

fn cmd_features(
    file: &FileConfig,
    manifest_path: Option<PathBuf>,
    out: Option<PathBuf>,
    rejects_path: Option<PathBuf>,
    min_prominence: Option<f64>,
) -> CliResult<()> {
    let manifest_path = require("manifest", file.path("manifest", manifest_path)?)?;
    let out = require("out", file.path("out", out)?)?;
    let rejects_path = file
        .path("rejects", rejects_path)?
        .unwrap_or_else(|| default_rejects_path(&out));
    let min_prominence = file
        .f64("min-prominence", min_prominence)?
        .unwrap_or(DEFAULT_MIN_PROMINENCE);
    if !(min_prominence.is_finite() && min_prominence >= 0.0) {
        return Err(usage(format!(
            "--min-prominence must be non-negative, got {min_prominence}"
        )));
    }

    let manifest = io::load_manifest(&manifest_path)?;
    if manifest.records.is_empty() {
        return Err(usage(format!(
            "manifest {} has no records",
            manifest_path.display()
        )));
    }

    // Canonical output order regardless of manifest order.
    let mut records: Vec<&ManifestRecord> = manifest.records.iter().collect();
    records.sort_by(|a, b| a.trace_id.cmp(&b.trace_id));

    let cfg = SegmentationConfig::default();
    let mut rows = Vec::with_capacity(records.len());
    let mut rejects: Vec<(String, String)> = Vec::new();
    for record in records {
        let path = io::record_path(&manifest_path, record);
        let result = io::read_trace_csv(&path)
            .and_then(|trace| cut(&trace, &cfg))
            .and_then(|segment| features_from_segment(&segment, min_prominence));
        match result {
            Ok(features) => rows.push(FeatureRow {
                trace_id: record.trace_id.clone(),
                label: record.label,
                features,
            }),
            Err(e) => rejects.push((record.trace_id.clone(), e.to_string())),
        }
    }

    io::write_feature_csv(&out, &rows)?;
    io::write_rejects_csv(&rejects_path, &rejects)?;

    let total = manifest.records.len();
    println!("{} feature rows written to {}", rows.len(), out.display());
    println!(
        "{} rejects listed in {}",
        rejects.len(),
        rejects_path.display()
    );
    if rejects.len() * 10 > total {
        return Err(CliError::Runtime(anyhow::anyhow!(
            "{} of {} traces were rejected (more than 10%); see {}",
            rejects.len(),
            total,
            rejects_path.display()
        )));
    }
    Ok(())
}

/// Splits feature rows into labeled sets per partition.
fn partition_rows(
    rows: &[FeatureRow],
    counts: Option<SplitCounts>,
    split_seed: u64,
) -> CliResult<[(Split, LabeledSet); 3]> {
    let labels: Vec<usize> = rows.iter().map(|r| r.label).collect();
    let assignment = dropsense::stratified_split(&labels, counts, split_seed)?;
    let mut parts: [(Vec<[f64; 25]>, Vec<usize>); 3] = Default::default();
    for (row, split) in rows.iter().zip(&assignment) {
        let slot = match split {
            Split::Train => &mut parts[0],
            Split::Val => &mut parts[1],
            Split::Test => &mut parts[2],
        };
        slot.0.push(row.features.to_array());
        slot.1.push(row.label);
    }
    let [train, val, test] = parts;
    Ok([
        (Split::Train, LabeledSet::new(train.0, train.1)?),
        (Split::Val, LabeledSet::new(val.0, val.1)?),
        (Split::Test, LabeledSet::new(test.0, test.1)?),
    ])
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    file: &FileConfig,
    seed: u64,
    features: Option<PathBuf>,
    split_seed: Option<u64>,
    counts: Option<String>,
    out: Option<PathBuf>,
    curves: Option<PathBuf>,
    hidden_dims: Option<String>,
    activation: Option<String>,
    learning_rate: Option<f64>,
    batch_size: Option<usize>,
    epochs: Option<usize>,
) -> CliResult<()> {
    let features_path = require("features", file.path("features", features)?)?;
    let out = require("out", file.path("out", out)?)?;
    let curves = file.path("curves", curves)?;
    let split_seed = file.u64("split-seed", split_seed)?.unwrap_or(seed);
    let counts = match file.string("counts", counts)? {
        Some(raw) => Some(parse_counts(&raw)?),
        None => None,
    };

    let defaults = TrainConfig::default();
    let cfg = TrainConfig {
        hidden_dims: match file.string("hidden-dims", hidden_dims)? {
            Some(raw) => parse_dims(&raw)?,
            None => defaults.hidden_dims,
        },
        activation: match file.string("activation", activation)? {
            Some(raw) => raw
                .parse::<Activation>()
                .map_err(|e| usage(e.to_string()))?,
            None => defaults.activation,
        },
        learning_rate: file
            .f64("learning-rate", learning_rate)?
            .unwrap_or(defaults.learning_rate),
        batch_size: file
            .usize("batch-size", batch_size)?
            .unwrap_or(defaults.batch_size),
        epochs: file.usize("epochs", epochs)?.unwrap_or(defaults.epochs),
        seed,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let rows = io::read_feature_csv(&features_path)?;
    let [(_, train_set), (_, val_set), _] = partition_rows(&rows, counts, split_seed)?;

    let (model, report) = mlp::train(&train_set, &val_set, &cfg)?;
    io::save_model(&out, &model)?;
    if let Some(curves_path) = &curves {
        io::write_curves_csv(curves_path, &report.val_loss, &report.val_accuracy)?;
    }

    println!(
        "trained on {} rows, validated on {} rows",
        train_set.len(),
        val_set.len()
    );
    println!("training time: {:.2} s", report.train_seconds);
    if let (Some(loss), Some(acc)) = (report.val_loss.last(), report.val_accuracy.last()) {
        println!("final val loss: {loss:.6}");
        println!("final val accuracy: {:.2}%", acc * 100.0);
    }
    println!("model: {}", out.display());
    if let Some(curves_path) = &curves {
        println!("curves: {}", curves_path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    file: &FileConfig,
    seed: u64,
    model: Option<PathBuf>,
    features: Option<PathBuf>,
    split: Option<String>,
    split_seed: Option<u64>,
    counts: Option<String>,
    out: Option<PathBuf>,
) -> CliResult<()> {
    let model_path = require("model", file.path("model", model)?)?;
    let features_path = require("features", file.path("features", features)?)?;
    let split = match file.string("split", split)? {
        Some(raw) => parse_split(&raw)?,
        None => Split::Test,
    };
    let split_seed = file.u64("split-seed", split_seed)?.unwrap_or(seed);
    let counts = match file.string("counts", counts)? {
        Some(raw) => Some(parse_counts(&raw)?),
        None => None,
    };
    let out = file.path("out", out)?;

    let model = io::load_model(&model_path)?;
    let rows = io::read_feature_csv(&features_path)?;
    let parts = partition_rows(&rows, counts, split_seed)?;
    let set = parts
        .iter()
        .find(|(s, _)| *s == split)
        .map(|(_, set)| set)
        .expect("all splits present");

    let matrix = mlp::evaluate(&model, set)?;
    if let Some(out) = &out {
        io::write_confusion_csv(out, &matrix)?;
    }

    println!("split: {} ({} rows)", split.name(), set.len());
    print!("{}", render_confusion(&matrix));
    println!(
        "overall accuracy: {:.2}% ({}/{} correct)",
        matrix.overall_accuracy() * 100.0,
        matrix.correct(),
        matrix.total()
    );
    println!("inference time: {:.4} s", matrix.inference_seconds);
    if let Some(out) = &out {
        println!("confusion matrix: {}", out.display());
    }
    Ok(())
}

/// Formats the confusion matrix as a fixed-width table: true materials as
/// rows, predictions as columns, per-class accuracy on the right.
fn render_confusion(matrix: &dropsense::ConfusionMatrix) -> String {
    let mut text = String::new();
    let _ = write!(text, "{:<14}", "true\\predicted");
    for name in MATERIAL_NAMES {
        let _ = write!(text, "{name:>9}");
    }
    let _ = writeln!(text, "{:>10}", "accuracy");
    for (label, row) in matrix.counts.iter().enumerate() {
        let _ = write!(text, "{:<14}", MATERIAL_NAMES[label]);
        for count in row {
            let _ = write!(text, "{count:>9}");
        }
        match matrix.per_class_accuracy(label) {
            Some(acc) => {
                let _ = writeln!(text, "{:>9.2}%", acc * 100.0);
            }
            None => {
                let _ = writeln!(text, "{:>10}", "-");
            }
        }
    }
    text
}

fn cmd_predict(
    file: &FileConfig,
    model: Option<PathBuf>,
    input: Option<PathBuf>,
    min_prominence: Option<f64>,
    json: bool,
) -> CliResult<()> {
    let model_path = require("model", file.path("model", model)?)?;
    let input = require("in", file.path("in", input)?)?;
    let min_prominence = file
        .f64("min-prominence", min_prominence)?
        .unwrap_or(DEFAULT_MIN_PROMINENCE);
    let json = file.bool("json", json)?;

    let model = io::load_model(&model_path)?;
    let trace = io::read_trace_csv(&input)?;
    let segment = cut(&trace, &SegmentationConfig::default())?;
    let features = features_from_segment(&segment, min_prominence)?;
    let prediction = mlp::predict(&model, &features.to_array())?;
    let material = MATERIAL_NAMES[prediction.label];

    if json {
        let value = serde_json::json!({
            "label": prediction.label,
            "material": material,
            "probabilities": prediction.probabilities,
        });
        println!(
            "{}",
            serde_json::to_string(&value).context("serialize prediction")?
        );
    } else {
        println!("{} {material}", prediction.label);
        let probs: Vec<String> = prediction
            .probabilities
            .iter()
            .map(|p| p.to_string())
            .collect();
        println!("probabilities: {}", probs.join(" "));
    }
    Ok(())
}
