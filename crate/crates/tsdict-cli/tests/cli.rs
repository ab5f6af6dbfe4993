//! Command-level behaviour: exit codes, file handling and output contracts.

use std::path::Path;
use std::process::{Command, Output};

use tsdict::synthetic;

fn tsdict(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsdict"))
        .args(args)
        .output()
        .expect("spawn tsdict")
}

fn write_pair(dir: &Path, name: &str, seed: u64) {
    let pair = synthetic::frequency_split(seed, 14, 10, 36);
    std::fs::write(
        dir.join(format!("{name}_TRAIN.ts")),
        pair.train.to_ts_string(),
    )
    .unwrap();
    std::fs::write(dir.join(format!("{name}_TEST.ts")), pair.test.to_ts_string()).unwrap();
}

#[test]
fn fit_missing_file_exits_two_and_names_path() {
    let out = tsdict(&[
        "fit",
        "--variant",
        "tde",
        "--train",
        "/nonexistent/xyz_TRAIN.ts",
        "--out",
        "/tmp/never-written.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("/nonexistent/xyz_TRAIN.ts"), "{stderr}");
}

#[test]
fn fit_then_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write_pair(dir.path(), "Toy", 5);
    let model = dir.path().join("model.json");

    let out = tsdict(&[
        "fit",
        "--variant",
        "cboss",
        "--train",
        dir.path().join("Toy_TRAIN.ts").to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
        "--k",
        "8",
        "--ensemble-size",
        "4",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("seed=1"), "summary must print the seed: {stderr}");
    assert!(model.exists());

    let preds = dir.path().join("preds.csv");
    let out = tsdict(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--test",
        dir.path().join("Toy_TEST.ts").to_str().unwrap(),
        "--out",
        preds.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&preds).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "index,label,p_c0,p_c1");
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let p: f64 = fields[2].parse::<f64>().unwrap() + fields[3].parse::<f64>().unwrap();
        assert!((p - 1.0).abs() < 1e-12, "distribution must sum to 1: {line}");
        rows += 1;
    }
    assert_eq!(rows, 10);

    // Deterministic across invocations.
    let preds2 = dir.path().join("preds2.csv");
    let out = tsdict(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--test",
        dir.path().join("Toy_TEST.ts").to_str().unwrap(),
        "--out",
        preds2.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv, std::fs::read_to_string(&preds2).unwrap());
}

#[test]
fn predict_length_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    write_pair(dir.path(), "Toy", 6);
    let model = dir.path().join("model.json");
    let out = tsdict(&[
        "fit",
        "--variant",
        "cboss",
        "--train",
        dir.path().join("Toy_TRAIN.ts").to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
        "--k",
        "4",
        "--ensemble-size",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));

    // A test file with a different series length.
    let other = synthetic::frequency_split(7, 6, 4, 20);
    let short = dir.path().join("short_TEST.ts");
    std::fs::write(&short, other.test.to_ts_string()).unwrap();
    let out = tsdict(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--test",
        short.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("length mismatch"));
}

#[test]
fn benchmark_row_count_matches_grid() {
    let dir = tempfile::tempdir().unwrap();
    write_pair(dir.path(), "A", 8);
    write_pair(dir.path(), "B", 9);
    let out_dir = dir.path().join("results");
    let out = tsdict(&[
        "benchmark",
        "--data",
        dir.path().to_str().unwrap(),
        "--datasets",
        "A,B",
        "--variants",
        "cboss,ed1nn",
        "--resamples",
        "2",
        "--k",
        "6",
        "--ensemble-size",
        "3",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    // Header plus 2 datasets x 2 classifiers x 2 resamples.
    assert_eq!(csv.lines().count(), 1 + 8);
}

#[test]
fn compare_identical_columns_form_one_clique() {
    let dir = tempfile::tempdir().unwrap();
    let csv = "dataset,classifier,resample,seed,train_seconds,accuracy,balanced_accuracy,f1,auroc\n\
        d1,alpha,0,0,0,0.9,0.9,0.9,0.9\n\
        d1,beta,0,0,0,0.9,0.9,0.9,0.9\n\
        d2,alpha,0,0,0,0.7,0.7,0.7,0.7\n\
        d2,beta,0,0,0,0.7,0.7,0.7,0.7\n";
    let path = dir.path().join("results.csv");
    std::fs::write(&path, csv).unwrap();
    let out = tsdict(&["compare", "--results", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let clique_line = stdout
        .lines()
        .find(|l| l.starts_with("clique"))
        .expect("report has a clique line");
    assert!(clique_line.contains("alpha") && clique_line.contains("beta"), "{stdout}");
}

#[test]
fn compare_missing_cell_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let csv = "dataset,classifier,resample,seed,train_seconds,accuracy,balanced_accuracy,f1,auroc\n\
        d1,alpha,0,0,0,0.9,0.9,0.9,0.9\n\
        d2,beta,0,0,0,0.7,0.7,0.7,0.7\n";
    let path = dir.path().join("results.csv");
    std::fs::write(&path, csv).unwrap();
    let out = tsdict(&["compare", "--results", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("d1/beta") && stderr.contains("d2/alpha"), "{stderr}");
}

#[test]
fn unknown_variant_is_rejected() {
    let out = tsdict(&[
        "fit",
        "--variant",
        "weasel",
        "--train",
        "x.ts",
        "--out",
        "m.json",
    ]);
    assert_ne!(out.status.code(), Some(0));
}
