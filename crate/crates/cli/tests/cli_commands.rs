use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use copw_cli::io::{weights_json, MatrixJson, StateJson, WitnessJson};
use copw_cli::registry;
use copw_cli::scan::{from_csv, PointClass};
use copw_core::certify::{certify_state, Verdict};
use copw_core::cone::horn;
use copw_core::matrix::RealSymMatrix;
use copw_core::symmetric::d3_blocks;
use serde_json::{json, Value};
use tempfile::TempDir;

fn copw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_copw"))
        .args(args)
        .env_remove("COPW_TOL")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write_json(dir: &Path, name: &str, v: &impl serde::Serialize) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_vec_pretty(v).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn horn_round_trips_through_check_and_decompose() {
    let dir = TempDir::new().unwrap();
    let out = copw(&["cop", "horn", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let path = dir.path().join("horn5.json");
    std::fs::write(&path, &out.stdout).unwrap();

    let check = copw(&["cop", "check", s(&path)]);
    assert_eq!(stdout_json(&check)["verdict"], "copositive");

    let dec = copw(&["cop", "decompose", s(&path), "--max-iter", "2000"]);
    let v = stdout_json(&dec);
    assert_eq!(v["status"], "exceptional (numerical)");
    assert_eq!(v["iterations"], 2000);
}

#[test]
fn non_copositive_input_yields_a_checkable_certificate() {
    let dir = TempDir::new().unwrap();
    let h = RealSymMatrix::from_rows(&[vec![1.0, -2.0], vec![-2.0, 1.0]]).unwrap();
    let path = write_json(dir.path(), "h.json", &MatrixJson::from_real(&h));
    let v = stdout_json(&copw(&["cop", "check", s(&path)]));
    assert_eq!(v["verdict"], "not copositive");
    let x: Vec<f64> = serde_json::from_value(v["certificate"]["x"].clone()).unwrap();
    assert!(x.iter().all(|&t| t >= 0.0));
    assert!(h.quadratic_form(&x) < 0.0);
}

#[test]
fn decomposable_source_splits_and_classifies() {
    let dir = TempDir::new().unwrap();
    let h = RealSymMatrix::from_rows(&[vec![1.0, 1.0, 1.0], vec![1.0, 1.0, -1.0], vec![1.0, -1.0, 1.0]]).unwrap();
    let path = write_json(dir.path(), "h.json", &MatrixJson::from_real(&h));
    let v = stdout_json(&copw(&["cop", "decompose", s(&path)]));
    assert_eq!(v["status"], "split");
    assert_eq!(v["check"]["ok"], true);

    let w = stdout_json(&copw(&["witness", "build", s(&path), "--classify", "--project-sym"]));
    assert_eq!(w["classification"], "decomposable");
    assert_eq!(w["projected"], true);
}

#[test]
fn certify_exit_code_follows_expectation() {
    let dir = TempDir::new().unwrap();
    let state = StateJson {
        d: 5,
        rho: None,
        weights: weights_json(&registry::horn5_weights()),
        coherences: vec![],
        d3: None,
    };
    let sp = write_json(dir.path(), "state.json", &state);
    let w = copw_core::witness::witness(&horn(5).unwrap());
    let wp = write_json(dir.path(), "w.json", &WitnessJson::from_witness(&w));

    let ok = copw(&["certify", s(&sp), "--witness", s(&wp), "--expect", "PPT-entangled"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let v = stdout_json(&ok);
    assert_eq!(v["verdict"], "PPT-entangled");
    assert_eq!(v["witness_classification"], "non-decomposable");

    let miss = copw(&["certify", s(&sp), "--witness", s(&wp), "--expect", "separable"]);
    assert_eq!(miss.status.code(), Some(1));
}

#[test]
fn certify_ds_rejects_dimension_five() {
    let dir = TempDir::new().unwrap();
    let state = StateJson {
        d: 5,
        rho: None,
        weights: weights_json(&registry::horn5_weights()),
        coherences: vec![],
        d3: None,
    };
    let sp = write_json(dir.path(), "state.json", &state);
    assert_eq!(copw(&["certify", "ds", s(&sp)]).status.code(), Some(2));
}

#[test]
fn examples_report_reproduction_in_exit_code() {
    assert_eq!(copw(&["examples", "run", "horn5"]).status.code(), Some(0));
    assert_eq!(copw(&["examples", "run", "edge57"]).status.code(), Some(0));
    let list = copw(&["examples", "list"]);
    let text = String::from_utf8(list.stdout).unwrap();
    for name in registry::NAMES {
        assert!(text.contains(name));
    }
}

#[test]
fn unknown_example_lists_valid_names() {
    let out = copw(&["examples", "run", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("nope"));
    assert!(err.contains("rational_d3"));
}

#[test]
fn unreadable_inputs_exit_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(copw(&["cop", "check", "/nonexistent/h.json"]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, b"{\"dim\": 2, \"re\": [[1, 2], [3, 1]]}").unwrap();
    assert_eq!(copw(&["cop", "check", s(&bad)]).status.code(), Some(2));
    assert_eq!(copw(&["cop", "horn", "4"]).status.code(), Some(2));
    assert_eq!(copw(&["bogus"]).status.code(), Some(2));
}

#[test]
fn scan_is_deterministic_and_detections_replay() {
    let dir = TempDir::new().unwrap();
    let p = registry::rational_weights();
    let state = StateJson {
        d: 3,
        rho: None,
        weights: weights_json(&p),
        coherences: vec![],
        d3: None,
    };
    let sp = write_json(dir.path(), "p.json", &state);
    let w = registry::rational_witness();
    let wp = write_json(dir.path(), "w.json", &WitnessJson::from_witness(&w));
    let grid = json!({
        "alpha_re": {"min": -0.1, "max": 0.0, "steps": 11},
        "beta_re": {"min": 0.0, "max": 0.1, "steps": 11},
        "gamma_re": {"values": [-0.05, 0.0]},
    });
    let gp = write_json(dir.path(), "grid.json", &grid);

    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = copw(&["scan", "--p", s(&sp), "--witness", s(&wp), "--grid", s(&gp), "--out", s(&out_dir)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stdout_json(&out)["points"], 242);
        assert!(std::fs::read_to_string(out_dir.join("scan.svg")).unwrap().starts_with("<svg"));
        csvs.push(std::fs::read(out_dir.join("scan.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);

    let records = from_csv(&csvs[0]).unwrap();
    assert_eq!(records.len(), 242);
    let detected: Vec<_> = records.iter().filter(|r| r.class == PointClass::PptDetected).collect();
    assert!(!detected.is_empty());
    for r in detected {
        let (a, b, g) = r.coherences();
        let (st, _) = d3_blocks(&p, a, b, g).unwrap();
        let (rep, _) = certify_state(&st, &w, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::PptEntangled);
    }
}
