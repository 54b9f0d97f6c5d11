//! The `valence` binary end to end on a small synthetic dataset.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;
use tempfile::TempDir;

fn valence(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valence")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().expect("an error line on stderr");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

/// Three subjects of the small preset, shared by every test in this file.
fn data() -> &'static Path {
    static DIR: OnceLock<(TempDir, PathBuf)> = OnceLock::new();
    let (_, path) = DIR.get_or_init(|| {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("data");
        let o = valence(&["synth", "--preset", "small", "--seed", "3", "--subjects", "3", "--out", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (tmp, path)
    });
    path
}

fn d() -> &'static str {
    data().to_str().unwrap()
}

#[test]
fn synthetic_dataset_validates_without_warnings() {
    let o = valence(&["ingest-validate", "--data", d(), "--strict"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["warnings"].as_array().unwrap().len(), 0);
    assert_eq!(r["subjects"].as_array().unwrap().len(), 3);
}

#[test]
fn hrv_row_has_nineteen_variables() {
    let o = valence(&["hrv", "--data", d(), "--subject", "S01", "--trial", "t01"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), 3 + 19);
    assert_eq!(lines[1].split(',').count(), 3 + 19);
    assert!(lines[1].starts_with("S01,t01,"));
}

#[test]
fn temperature_and_eeg_tables() {
    let o = valence(&["temp-features", "--data", d()]);
    assert!(o.status.success());
    // 3 subjects, each with a baseline and 2 x 7 trials
    assert_eq!(stdout(&o).lines().count(), 1 + 3 * 15);

    let o = valence(&["eeg-features", "--data", d(), "--subject", "S02"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 4 + 20);
}

#[test]
fn classify_writes_a_six_cell_bundle_and_charts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.cfg");
    std::fs::write(&cfg, "# reduced grid\nmodalities = EEG, T+ECG, ALL\nclassifiers = KNN\nscheme = SD, SI\nseed = 4\n").unwrap();
    let out = tmp.path().join("bundle");
    let o = valence(&["classify", "--data", d(), "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["cells"].as_array().unwrap().len(), 6);
    assert_eq!(report["seed"], 4);
    let f1 = std::fs::read_to_string(out.join("f1.csv")).unwrap();
    assert_eq!(f1.lines().count(), 1 + 6);
    for line in f1.lines().skip(1) {
        let mean: f64 = line.split(',').nth(6).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&mean));
    }

    let o = valence(&["report", "--bundle", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(out.join("f1_all.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(out.join("temperature_by_trial.svg").exists());
}

#[test]
fn config_errors_name_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "k = 3\nwindow_length = 4\n").unwrap();
    let o = valence(&["classify", "--data", d(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["error"], "schema");
    assert_eq!(e["line"], 2);
    assert_eq!(e["exit_code"], 2);
}

#[test]
fn invalid_input_exits_two() {
    let o = valence(&["hrv", "--data", d(), "--subject", "S99"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "invalid_input");

    let o = valence(&["hrv", "--data", d(), "--subject", "S01", "--trial", "t99"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_population_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("one");
    // a single subject is always female: the preset has two females
    let o = valence(&["synth", "--preset", "small", "--subjects", "1", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let o = valence(&["asymmetry", "--data", path.to_str().unwrap(), "--population", "male"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["error"], "infeasible");
}

#[test]
fn synth_refuses_a_nonempty_target() {
    let o = valence(&["synth", "--preset", "small", "--subjects", "1", "--out", d()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(data().join("S01").join("meta.json").exists());
}
