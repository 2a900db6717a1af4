use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ising(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ising"))
        .args(args)
        .env("ISING_CACHE_DIR", cache)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn stdout(args: &[&str], cache: &Path) -> String {
    let out = ising(args, cache);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
}

#[test]
fn basis_info_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let four = stdout(&["basis-info", "--spins", "4"], tmp.path());
    assert_eq!(column(&four, "dim"), ["6", "3", "4", "3"]);
    let seventeen = stdout(&["basis-info", "--spins", "17", "--momentum", "0"], tmp.path());
    assert_eq!(column(&seventeen, "dim"), ["7712"]);
    assert_eq!(column(&seventeen, "n_inv"), ["512"]);
    let delta: f64 = column(&seventeen, "delta")[0].parse().unwrap();
    assert!((delta - 0.0664).abs() < 1e-4);
    let approx: f64 = column(&seventeen, "approx_dim")[0].parse().unwrap();
    assert!((approx - 7710.1).abs() < 0.05);
    let json = stdout(
        &["basis-info", "--spins", "5", "--momentum", "0", "--format", "json"],
        tmp.path(),
    );
    let rows: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(rows[0]["nu_inv"], serde_json::json!([1, 1, 2, 2, 1, 1]));
}

#[test]
fn diag_fills_and_reuses_the_cache() {
    let tmp = tempfile::tempdir().unwrap();
    let first = stdout(&["diag", "--spins", "10", "--momentum", "all"], tmp.path());
    assert!(column(&first, "source").iter().all(|s| s == "computed"));
    assert_eq!(column(&first, "k").len(), 10);
    let entries = fs::read_dir(tmp.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "json")
        .count();
    assert_eq!(entries, 10);
    let second = stdout(&["diag", "--spins", "10"], tmp.path());
    assert!(column(&second, "source").iter().all(|s| s == "cache"));
    assert_eq!(column(&first, "e_min"), column(&second, "e_min"));
}

#[test]
fn argument_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        vec!["diag", "--spins", "10", "--momentum", "10"],
        vec!["diag", "--spins", "10", "--momentum", "x"],
        vec!["diag", "--spins", "1"],
        vec!["diag"],
        vec!["predict", "--spins", "8", "--bulk-fraction", "0"],
        vec!["diag", "--spinz", "8"],
    ] {
        assert_eq!(ising(&args, tmp.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn predict_labels_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "predict",
        "--spins",
        "12",
        "--momentum",
        "0",
        "--momentum",
        "2",
        "--corrections",
        "none",
        "--corrections",
        "gram-charlier",
        "--corrections",
        "gibbs",
        "--grid",
        "21",
    ];
    let a = stdout(&args, tmp.path());
    let b = stdout(&args, tmp.path());
    assert_eq!(a, b);
    let labels = column(&a, "corrections");
    assert_eq!(labels.len(), 2 * 3 * 21);
    for label in ["none", "gram-charlier", "gibbs"] {
        assert_eq!(labels.iter().filter(|l| *l == label).count(), 42);
    }
    assert_eq!(a.lines().filter(|l| l.starts_with("E,")).count(), 1);
}

#[test]
fn zero_field_participation_is_flat() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = stdout(
        &[
            "predict",
            "--spins",
            "10",
            "--lambda",
            "0",
            "--momentum",
            "0",
            "--corrections",
            "none",
        ],
        tmp.path(),
    );
    let pr: Vec<f64> = column(&csv, "Pr").iter().map(|v| v.parse().unwrap()).collect();
    let expected = 1024.0 / 10.0 / 3.0;
    assert!(pr.iter().all(|p| (p - expected).abs() < 1e-9 * expected), "{pr:?}");
}

#[test]
fn compare_diagonalizes_on_demand() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    stdout(
        &[
            "compare",
            "--spins",
            "11",
            "--momentum",
            "0",
            "--momentum",
            "3",
            "--out",
            out.to_str().unwrap(),
        ],
        &tmp.path().join("cache"),
    );
    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("compare.json")).unwrap()).unwrap();
    let labels: Vec<&str> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["label"].as_str().unwrap())
        .collect();
    assert!(labels.contains(&"k=0:none:Pr") && labels.contains(&"k=0:gram-charlier:Pr"));
    assert!(labels.contains(&"k=3:none:Pr") && labels.contains(&"k=3:gram-charlier:Pr"));
    let csv = fs::read_to_string(out.join("compare.csv")).unwrap();
    assert!(csv.starts_with("E,empirical,predicted,deviation,in_bulk,label\n"));
    assert!(out.join("compare.provenance.json").exists());
}

#[test]
fn provenance_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    stdout(
        &[
            "predict",
            "--spins",
            "9",
            "--alpha",
            "0.5",
            "--momentum",
            "1",
            "--grid",
            "11",
            "--orders",
            "2,3",
            "--out",
            first.to_str().unwrap(),
        ],
        tmp.path(),
    );
    let provenance = first.join("predict.provenance.json");
    stdout(
        &[
            "predict",
            "--config",
            provenance.to_str().unwrap(),
            "--out",
            second.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(
        fs::read(first.join("predict.csv")).unwrap(),
        fs::read(second.join("predict.csv")).unwrap()
    );
    let read = |p: &Path| -> serde_json::Value { serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap() };
    let (mut a, mut b) = (read(&provenance), read(&second.join("predict.provenance.json")));
    assert_eq!(a["config"]["N"], 9);
    assert_eq!(a["config"]["orders"], serde_json::json!([2.0, 3.0]));
    a["config"]["out"] = serde_json::Value::Null;
    b["config"]["out"] = serde_json::Value::Null;
    assert_eq!(a, b);
}

#[test]
fn spacing_and_histograms() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = stdout(
        &[
            "spacing",
            "--spins",
            "10",
            "--momentum",
            "0",
            "--momentum",
            "3",
            "--seed",
            "4",
        ],
        tmp.path(),
    );
    assert_eq!(
        column(&csv, "subset"),
        ["even", "odd", "pooled", "all", "goe-surrogate", "poisson-surrogate"]
    );
    let hist = stdout(
        &[
            "coeff-hist",
            "--spins",
            "10",
            "--momentum",
            "0",
            "--symbol",
            "0000000011",
        ],
        tmp.path(),
    );
    assert!(column(&hist, "symbol").iter().all(|s| s == "0000000011"));
    let missing = ising(
        &[
            "coeff-hist",
            "--spins",
            "10",
            "--momentum",
            "1",
            "--symbol",
            "0000000000",
        ],
        tmp.path(),
    );
    assert_eq!(missing.status.code(), Some(2));
}
