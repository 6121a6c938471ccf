use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspace")).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const CONSTANT: &str = r#"{"repr": "fourier", "data": {"degree": 0, "coeffs": [[1.5, 0.0]]}}"#;

#[test]
fn default_regime_grid_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = qspace(&["regime", "--grid", "default", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let mut rdr = csv::Reader::from_path(dir.path().join("regime.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5 * 5 * 9 * 9);
    let hit = rows
        .iter()
        .find(|r| &r[0] == "2" && &r[1] == "2" && &r[2] == "0.6" && &r[3] == "0.4")
        .expect("row present");
    assert_eq!(&hit[4], "Case3-Trivial");

    let report = read_json(&dir.path().join("regime.json"));
    assert_eq!(report["schema"], 1);
    let total: u64 = report["counts"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 2025);
}

#[test]
fn single_regime_to_stdout() {
    let o = qspace(&["regime", "--p1", "2", "--p2", "2", "--s", "0.4", "--r", "0.6"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "regime");
}

#[test]
fn constant_has_zero_seminorm() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "constant.json", CONSTANT);
    let out = dir.path().join("out");
    let o = qspace(&["seminorm", "--kind", "qps-boundary", "--f", &f, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out.join("seminorm.json"));
    assert_eq!(report["value"].as_f64().unwrap(), 0.0);
    assert!(out.join("seminorm_profile.csv").exists());
}

#[test]
fn kc_sequence_carleson_split() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("kc");
    let o = qspace(&[
        "construct", "--kind", "kc", "--s", "0.8", "--r", "0.4", "--t", "0.5", "--eps", "0.3", "--count", "100000",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out.join("construct.json"));
    let seq = write(dir.path(), "kc_points.json", &report["construction"].to_string());

    let out2 = dir.path().join("carleson");
    let o = qspace(&["carleson", "--measure", &seq, "--exponent-pair", "0.8", "0.4", "--out", out2.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out2.join("carleson.json"));
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    let bounded: Vec<bool> = results.iter().map(|r| r["bounded"].as_bool().unwrap()).collect();
    assert_eq!(bounded, vec![true, false]);
    assert!(out2.join("carleson_profile_0.8.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let g = |name: &str| {
        let out = dir.path().join(name);
        let o = qspace(&[
            "construct", "--kind", "lacunary-g", "--p1", "3", "--p2", "2", "--s", "0.4", "--r", "0.6", "--count", "30",
            "--seed", "7", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (std::fs::read(out.join("construct.json")).unwrap(), std::fs::read(out.join("construct.csv")).unwrap())
    };
    assert_eq!(g("a"), g("b"));

    let s = |_: ()| qspace(&["spectrum", "--f", &write(dir.path(), "c.json", CONSTANT)]).stdout;
    assert_eq!(s(()), s(()));
}

#[test]
fn bad_config_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"quadrature": {"angular": 100}}"#);
    let o = qspace(&["--config", &cfg, "regime", "--grid", "default"]);
    assert_eq!(o.status.code(), Some(2));

    let cfg = write(dir.path(), "unknown.json", r#"{"no_such_field": 1}"#);
    assert_eq!(qspace(&["--config", &cfg, "regime", "--grid", "default"]).status.code(), Some(2));

    assert_eq!(qspace(&["regime", "--grid", "huge"]).status.code(), Some(2));
    assert_eq!(qspace(&["seminorm", "--kind", "bmo", "--f", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(qspace(&["--resolution", "3", "regime", "--grid", "default"]).status.code(), Some(2));
}

#[test]
fn suite_subset_passes() {
    let o = qspace(&["suite", "--only", "1,9"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
}
