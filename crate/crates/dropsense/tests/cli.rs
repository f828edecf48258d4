//! End-to-end checks of the `dropsense` binary: flag handling, exit codes,
//! output artifacts, and determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn dropsense(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dropsense"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn assert_code(output: &Output, expected: i32) {
    assert_eq!(
        output.status.code(),
        Some(expected),
        "stdout:\n{}\nstderr:\n{}",
        stdout(output),
        stderr(output)
    );
}

/// Writes a trace that never falls: constant gravity plus nothing else.
fn write_flat_trace(path: &Path) {
    let mut text = String::from("t,ax,ay,az\n");
    for i in 0..400 {
        text.push_str(&format!("{},0,0,9.80665\n", i as f64 / 100.0));
    }
    fs::write(path, text).unwrap();
}

/// Simulates a small grid and returns the manifest path.
fn simulate_into(dir: &Path, reps: usize, seed: u64) -> std::path::PathBuf {
    let out = dropsense(
        &[
            "simulate",
            "--reps",
            &reps.to_string(),
            "--out",
            "sim",
            "--seed",
            &seed.to_string(),
        ],
        dir,
    );
    assert_code(&out, 0);
    dir.join("sim/manifest.json")
}

#[test]
fn simulate_writes_grid_and_prints_count() {
    let dir = TempDir::new().unwrap();
    let out = dropsense(
        &["simulate", "--reps", "1", "--out", "sim", "--seed", "5"],
        dir.path(),
    );
    assert_code(&out, 0);
    assert!(stdout(&out).contains("100 traces written"));

    let manifest = dir.path().join("sim/manifest.json");
    assert!(manifest.is_file());
    let csvs = fs::read_dir(dir.path().join("sim"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .map(|x| x == "csv")
                .unwrap_or(false)
        })
        .count();
    assert_eq!(csvs, 100);
}

#[test]
fn simulate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    simulate_into(dir.path(), 1, 11);
    let first = fs::read(dir.path().join("sim/manifest.json")).unwrap();
    let trace_first = fs::read(dir.path().join("sim/m2_h120_p3_r000.csv")).unwrap();

    let dir2 = TempDir::new().unwrap();
    simulate_into(dir2.path(), 1, 11);
    assert_eq!(
        first,
        fs::read(dir2.path().join("sim/manifest.json")).unwrap()
    );
    assert_eq!(
        trace_first,
        fs::read(dir2.path().join("sim/m2_h120_p3_r000.csv")).unwrap()
    );
}

#[test]
fn segment_reports_boundaries_and_writes_dump() {
    let dir = TempDir::new().unwrap();
    simulate_into(dir.path(), 1, 3);
    let out = dropsense(
        &["segment", "--in", "sim/m4_h160_p0_r000.csv", "--out", "seg"],
        dir.path(),
    );
    assert_code(&out, 0);
    let text = stdout(&out);
    assert!(text.contains("t_c:"), "{text}");
    assert!(text.contains("t_w:"), "{text}");
    assert!(text.contains("fall duration:"), "{text}");
    assert!(dir.path().join("seg.csv").is_file());
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("seg.json")).unwrap()).unwrap();
    assert!(sidecar["t_w"].as_u64().unwrap() > sidecar["t_c"].as_u64().unwrap());
}

#[test]
fn segment_names_the_failing_stage() {
    let dir = TempDir::new().unwrap();
    write_flat_trace(&dir.path().join("flat.csv"));
    let out = dropsense(&["segment", "--in", "flat.csv", "--out", "seg"], dir.path());
    assert_code(&out, 1);
    assert!(
        stderr(&out).contains("no weightless region"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn features_processes_a_manifest() {
    let dir = TempDir::new().unwrap();
    simulate_into(dir.path(), 1, 9);
    let out = dropsense(
        &[
            "features",
            "--manifest",
            "sim/manifest.json",
            "--out",
            "features.csv",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    assert!(stdout(&out).contains("100 feature rows written"));

    let table = fs::read_to_string(dir.path().join("features.csv")).unwrap();
    assert_eq!(table.lines().count(), 101);
    assert!(table.starts_with("trace_id,label,"));
    // Canonical ordering by trace_id.
    let ids: Vec<&str> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    assert_eq!(ids, sorted);

    let rejects = fs::read_to_string(dir.path().join("features-rejects.csv")).unwrap();
    assert_eq!(rejects, "trace_id,reason\n");
}

#[test]
fn features_reports_corrupt_traces_in_rejects() {
    let dir = TempDir::new().unwrap();
    let manifest_path = simulate_into(dir.path(), 1, 13);
    // Corrupt one referenced trace: header intact, garbage row.
    fs::write(
        dir.path().join("sim/m1_h080_p2_r000.csv"),
        "t,ax,ay,az\n0,oops,0,0\n0.01,0,0,9.8\n",
    )
    .unwrap();
    let out = dropsense(
        &[
            "features",
            "--manifest",
            manifest_path.to_str().unwrap(),
            "--out",
            "features.csv",
        ],
        dir.path(),
    );
    // One reject out of 100 stays under the failure threshold.
    assert_code(&out, 0);
    let rejects = fs::read_to_string(dir.path().join("features-rejects.csv")).unwrap();
    assert!(rejects.contains("m1_h080_p2_r000"), "{rejects}");
    let table = fs::read_to_string(dir.path().join("features.csv")).unwrap();
    assert_eq!(table.lines().count(), 100);
}

#[test]
fn features_fails_when_too_many_traces_reject() {
    let dir = TempDir::new().unwrap();
    let manifest_path = simulate_into(dir.path(), 1, 17);
    // Two-record manifest, one of them a non-drop trace: 50% rejects.
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&manifest_path).unwrap()).unwrap();
    let mut records = manifest["records"].as_array().unwrap().clone();
    records.truncate(2);
    write_flat_trace(
        &dir.path()
            .join("sim")
            .join(records[1]["file"].as_str().unwrap()),
    );
    let small = serde_json::json!({ "format_version": 1, "records": records });
    fs::write(dir.path().join("sim/small.json"), small.to_string()).unwrap();

    let out = dropsense(
        &[
            "features",
            "--manifest",
            "sim/small.json",
            "--out",
            "features.csv",
        ],
        dir.path(),
    );
    assert_code(&out, 1);
    assert!(stderr(&out).contains("rejected"), "{}", stderr(&out));
    // The partial table and the rejects file are still written.
    assert!(dir.path().join("features.csv").is_file());
    assert!(fs::read_to_string(dir.path().join("features-rejects.csv"))
        .unwrap()
        .contains("no weightless region"));
}

#[test]
fn features_rejects_empty_manifest_as_usage_error() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("empty.json"),
        "{\"format_version\": 1, \"records\": []}\n",
    )
    .unwrap();
    let out = dropsense(
        &[
            "features",
            "--manifest",
            "empty.json",
            "--out",
            "features.csv",
        ],
        dir.path(),
    );
    assert_code(&out, 2);
}

fn prepare_features(dir: &Path, seed: u64) {
    simulate_into(dir, 2, seed);
    let out = dropsense(
        &[
            "features",
            "--manifest",
            "sim/manifest.json",
            "--out",
            "features.csv",
        ],
        dir,
    );
    assert_code(&out, 0);
}

#[test]
fn train_writes_model_and_curves() {
    let dir = TempDir::new().unwrap();
    prepare_features(dir.path(), 21);
    let out = dropsense(
        &[
            "train",
            "--features",
            "features.csv",
            "--out",
            "model.json",
            "--curves",
            "curves.csv",
            "--epochs",
            "7",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    assert!(stdout(&out).contains("training time:"));
    assert!(dir.path().join("model.json").is_file());
    let curves = fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    // Header plus one row per epoch.
    assert_eq!(curves.lines().count(), 8);
    assert!(curves.starts_with("epoch,val_loss,val_accuracy\n"));
}

#[test]
fn train_rejects_malformed_counts() {
    let dir = TempDir::new().unwrap();
    prepare_features(dir.path(), 23);
    let out = dropsense(
        &[
            "train",
            "--features",
            "features.csv",
            "--out",
            "model.json",
            "--counts",
            "1,2",
        ],
        dir.path(),
    );
    assert_code(&out, 2);

    // Counts that do not match the dataset size are a data error.
    let out = dropsense(
        &[
            "train",
            "--features",
            "features.csv",
            "--out",
            "model.json",
            "--counts",
            "1,2,3",
        ],
        dir.path(),
    );
    assert_code(&out, 1);
}

#[test]
fn eval_prints_confusion_table() {
    let dir = TempDir::new().unwrap();
    prepare_features(dir.path(), 25);
    let out = dropsense(
        &[
            "train",
            "--features",
            "features.csv",
            "--out",
            "model.json",
            "--epochs",
            "30",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let out = dropsense(
        &[
            "eval",
            "--model",
            "model.json",
            "--features",
            "features.csv",
            "--split",
            "test",
            "--out",
            "confusion.csv",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let text = stdout(&out);
    assert!(text.contains("split: test (40 rows)"), "{text}");
    assert!(text.contains("overall accuracy:"), "{text}");
    assert!(text.contains("quilt"), "{text}");
    assert!(text.contains("inference time:"), "{text}");
    let confusion = fs::read_to_string(dir.path().join("confusion.csv")).unwrap();
    assert!(confusion.starts_with("true_material,quilt,carpet,asphalt,granite,marble\n"));
    assert_eq!(confusion.lines().count(), 6);
}

#[test]
fn eval_missing_model_is_a_runtime_error() {
    let dir = TempDir::new().unwrap();
    prepare_features(dir.path(), 27);
    let out = dropsense(
        &["eval", "--model", "nope.json", "--features", "features.csv"],
        dir.path(),
    );
    assert_code(&out, 1);
}

#[test]
fn predict_prints_label_and_probabilities() {
    let dir = TempDir::new().unwrap();
    prepare_features(dir.path(), 29);
    let out = dropsense(
        &[
            "train",
            "--features",
            "features.csv",
            "--out",
            "model.json",
            "--epochs",
            "60",
        ],
        dir.path(),
    );
    assert_code(&out, 0);

    let out = dropsense(
        &[
            "predict",
            "--model",
            "model.json",
            "--in",
            "sim/m4_h160_p4_r000.csv",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    // "<label> <material>" with a known material name.
    let mut parts = first.split_whitespace();
    let label: usize = parts.next().unwrap().parse().unwrap();
    let material = parts.next().unwrap();
    assert!(label < 5);
    assert!(["quilt", "carpet", "asphalt", "granite", "marble"].contains(&material));
    assert!(lines.next().unwrap().starts_with("probabilities:"));

    let out = dropsense(
        &[
            "predict",
            "--model",
            "model.json",
            "--in",
            "sim/m0_h040_p0_r000.csv",
            "--json",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(value["label"].as_u64().unwrap() < 5);
    let probs = value["probabilities"].as_array().unwrap();
    assert_eq!(probs.len(), 5);
    let sum: f64 = probs.iter().map(|p| p.as_f64().unwrap()).sum();
    assert!((sum - 1.0).abs() < 1e-6);
}

#[test]
fn predict_surfaces_segmentation_failure() {
    let dir = TempDir::new().unwrap();
    prepare_features(dir.path(), 31);
    let out = dropsense(
        &[
            "train",
            "--features",
            "features.csv",
            "--out",
            "model.json",
            "--epochs",
            "5",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    write_flat_trace(&dir.path().join("flat.csv"));
    let out = dropsense(
        &["predict", "--model", "model.json", "--in", "flat.csv"],
        dir.path(),
    );
    assert_code(&out, 1);
    assert!(stderr(&out).contains("no weightless region"));
}

#[test]
fn config_file_supplies_flags_and_cli_wins() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("run.json"),
        "{\"reps\": 3, \"out\": \"sim\", \"seed\": 19}\n",
    )
    .unwrap();
    // Config alone supplies everything.
    let out = dropsense(&["simulate", "--config", "run.json"], dir.path());
    assert_code(&out, 0);
    assert!(stdout(&out).contains("300 traces written"));

    // An explicit flag overrides the config value.
    let dir2 = TempDir::new().unwrap();
    fs::copy(dir.path().join("run.json"), dir2.path().join("run.json")).unwrap();
    let out = dropsense(
        &["simulate", "--config", "run.json", "--reps", "1"],
        dir2.path(),
    );
    assert_code(&out, 0);
    assert!(stdout(&out).contains("100 traces written"));

    // Same seed via config or flag: identical artifacts.
    let manifest_a: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir2.path().join("sim/manifest.json")).unwrap())
            .unwrap();
    let dir3 = TempDir::new().unwrap();
    simulate_into(dir3.path(), 1, 19);
    let manifest_b: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir3.path().join("sim/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest_a, manifest_b);
}

#[test]
fn usage_errors_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    // Unknown flag (clap).
    let out = dropsense(&["simulate", "--bogus"], dir.path());
    assert_code(&out, 2);
    // Missing required flag, reported by the command itself.
    let out = dropsense(&["simulate", "--reps", "1"], dir.path());
    assert_code(&out, 2);
    assert!(stderr(&out).contains("--out"));
    // Invalid split name.
    let out = dropsense(
        &[
            "eval",
            "--model",
            "m.json",
            "--features",
            "f.csv",
            "--split",
            "future",
        ],
        dir.path(),
    );
    assert_code(&out, 2);
    // Bad config file.
    fs::write(dir.path().join("bad.json"), "[1,2,3]").unwrap();
    let out = dropsense(
        &[
            "simulate", "--config", "bad.json", "--reps", "1", "--out", "sim",
        ],
        dir.path(),
    );
    assert_code(&out, 2);
}

#[test]
fn pipeline_is_deterministic_end_to_end() {
    let run = |dir: &Path| {
        simulate_into(dir, 1, 77);
        assert_code(
            &dropsense(
                &[
                    "features",
                    "--manifest",
                    "sim/manifest.json",
                    "--out",
                    "features.csv",
                ],
                dir,
            ),
            0,
        );
        assert_code(
            &dropsense(
                &[
                    "train",
                    "--features",
                    "features.csv",
                    "--out",
                    "model.json",
                    "--curves",
                    "curves.csv",
                    "--epochs",
                    "20",
                    "--seed",
                    "77",
                ],
                dir,
            ),
            0,
        );
        assert_code(
            &dropsense(
                &[
                    "eval",
                    "--model",
                    "model.json",
                    "--features",
                    "features.csv",
                    "--seed",
                    "77",
                    "--out",
                    "confusion.csv",
                ],
                dir,
            ),
            0,
        );
    };
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    run(a.path());
    run(b.path());
    for artifact in ["features.csv", "model.json", "curves.csv", "confusion.csv"] {
        assert_eq!(
            fs::read(a.path().join(artifact)).unwrap(),
            fs::read(b.path().join(artifact)).unwrap(),
            "{artifact} differs between identical runs"
        );
    }
}
