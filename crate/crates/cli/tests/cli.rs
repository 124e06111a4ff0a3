use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn dqlm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqlm")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_kind(out: &Output) -> String {
    assert!(!out.status.success());
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(v["error"]["message"].as_str().is_some_and(|m| !m.is_empty()));
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn write_config(dir: &Path, name: &str, config: Value) -> String {
    let path = dir.join(name);
    fs::write(&path, config.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn small_half() -> Value {
    json!({"name": "tiny", "model": "both", "spin": "1/2", "n_cells": 2, "m": 0.1, "t_end": 5.0, "points": 11})
}

#[test]
fn list_presets_is_versioned_json() {
    let v = stdout_json(&dqlm(&["list-presets"]));
    assert_eq!(v["schema_version"], 1);
    let names: Vec<&str> = v["presets"].as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"fig2a") && names.contains(&"fig4") && names.contains(&"fig3b-2uc"));
}

#[test]
fn params_reports_closed_forms() {
    let v = stdout_json(&dqlm(&["params", "--preset", "fig2a"]));
    assert_eq!(v["schema_version"], 1);
    assert!((v["w_v0"].as_f64().unwrap() - 1.0 / 120.0).abs() < 1e-14);
    let v = stdout_json(&dqlm(&["params", "--preset", "fig3a"]));
    assert!((v["geometry"]["beta"].as_f64().unwrap() - 0.723).abs() < 1e-3);
    assert_eq!(v["molecules"].as_array().unwrap().len(), 12);
}

#[test]
fn failures_exit_nonzero_with_error_json() {
    assert_eq!(error_kind(&dqlm(&["run", "--preset", "nope"])), "invalid_argument");
    assert_eq!(error_kind(&dqlm(&["frobnicate"])), "usage");
    assert_eq!(error_kind(&dqlm(&["params"])), "invalid_argument");
    assert_eq!(error_kind(&dqlm(&["params", "--config", "/nonexistent/config.json"])), "io");
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.json", json!({"name": "x"}));
    assert_eq!(error_kind(&dqlm(&["run", "--config", &bad])), "json");
    let zero = write_config(dir.path(), "zero.json", json!({"name": "x", "model": "qlm", "spin": "1/2", "n_cells": 0, "m": 0.1}));
    assert_eq!(error_kind(&dqlm(&["run", "--config", &zero])), "invalid_argument");
    let corrupted = write_config(
        dir.path(),
        "corrupt.json",
        json!({"name": "x", "model": "dmh", "spin": "1", "n_cells": 2, "m": 0.25, "g2": 1.0,
               "ladder": {"delta1_0": 12.5, "d1": 10.0, "d2": 70.0, "b_rot": 1000.0, "big_delta_shift": 3.0}}),
    );
    assert_eq!(error_kind(&dqlm(&["validate", "--config", &corrupted])), "infeasible_parameters");
    assert!(dqlm(&["--help"]).status.success());
}

#[test]
fn run_writes_records_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tiny.json", small_half());
    let mut csvs = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        let summary = stdout_json(&dqlm(&["run", "--config", &config, "--out", out.to_str().unwrap(), "--physical"]));
        assert_eq!(summary["schema_version"], 1);
        assert!(summary["min_fidelity"].as_f64().unwrap() > 0.9);
        for model in ["qlm", "dmh"] {
            let json: Value = serde_json::from_str(&fs::read_to_string(out.join(format!("tiny_{model}.json"))).unwrap()).unwrap();
            assert_eq!(json["schema_version"], 1);
            assert_eq!(json["model"], model);
        }
        let saved: Value = serde_json::from_str(&fs::read_to_string(out.join("tiny_summary.json")).unwrap()).unwrap();
        assert_eq!(saved["name"], "tiny");
        csvs.push((fs::read(out.join("tiny_qlm.csv")).unwrap(), fs::read(out.join("tiny_dmh.csv")).unwrap()));
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs[0].1.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,t_seconds,n1,n2,n3,n4,E1,E2,E3,E4,flux_sum,gauss_g,norm,fidelity");
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn validate_passes_on_a_small_chain() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tiny.json", small_half());
    let v = stdout_json(&dqlm(&["validate", "--config", &config]));
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "heff_residual"));
}

#[test]
fn sweep_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "s.json",
        json!({"base": {"name": "sw", "model": "both", "spin": "1", "n_cells": 1, "m": 0.25, "g2": 1.0, "t_end": 5.0, "points": 11},
               "gammas": [1.0, 2.0], "masses": [0.25]}),
    );
    let out = dir.path().join("o");
    let v = stdout_json(&dqlm(&["sweep-gamma", "--config", &config, "--gammas", "1.5,2.5", "--jobs", "2", "--out", out.to_str().unwrap()]));
    assert_eq!(v["schema_version"], 1);
    let gammas: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|r| r["gamma"].as_f64().unwrap()).collect();
    assert_eq!(gammas, vec![1.5, 2.5]);
    let flux = fs::read_to_string(out.join("sw_flux.csv")).unwrap();
    assert_eq!(flux.lines().next().unwrap(), "t,flux_sum_gamma1.5_m0.25,flux_sum_gamma2.5_m0.25");
    assert!(fs::read_to_string(out.join("sw_sweep.csv")).unwrap().starts_with("gamma,m,"));
    let table: Value = serde_json::from_str(&fs::read_to_string(out.join("sw_sweep.json")).unwrap()).unwrap();
    assert_eq!(table["schema_version"], 1);
    let half = write_config(dir.path(), "h.json", json!({"base": small_half(), "gammas": [1.0], "masses": [0.1]}));
    assert_eq!(error_kind(&dqlm(&["sweep-gamma", "--config", &half])), "invalid_argument");
}
