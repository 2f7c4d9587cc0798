use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qlock::channels::{make_free_observable_channel, ClassicalChannel, FreeBranch};
use qlock::io::{state_to_json, to_json_string, ChannelFile, ObservableFile};
use qlock::linalg::{ComplexMatrix, ProbabilityVector};
use qlock::passive::Observable;
use qlock::states::{basis_state, make_cq, product_state, random_density, singlet, werner, DensityOperator};
use serde_json::Value;
use tempfile::TempDir;

fn qlock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlock"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn write_state(dir: &TempDir, name: &str, rho: &DensityOperator) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, state_to_json(rho)).unwrap();
    p
}

fn write_text(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn classical_mixture() -> DensityOperator {
    DensityOperator::new(ComplexMatrix::from_diag(&[0.5, 0.0, 0.0, 0.5]), (2, 2)).unwrap()
}

#[test]
fn locking_on_werner_half() {
    let dir = TempDir::new().unwrap();
    let st = write_state(&dir, "w.json", &werner(0.5).unwrap());
    let levels = write_text(&dir, "levels.json", r#"{"levels": [0, 1, 2, 3]}"#);
    let doc = stdout_json(&qlock(&["locking", "--state", s(&st), "--observable", s(&levels)]));
    assert!((doc["report"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-8);
    assert_eq!(doc["classical"], false);
    assert_eq!(doc["manifest"]["command"], "locking");
    assert_eq!(doc["report"]["method"], "theorem3-grid");

    for method in ["corollary1", "bruteforce"] {
        let doc = stdout_json(&qlock(&["locking", "--state", s(&st), "--method", method]));
        assert!((doc["report"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-8, "{method}");
    }
}

#[test]
fn locking_on_cq_state_is_classical() {
    let dir = TempDir::new().unwrap();
    let st = write_state(&dir, "cq.json", &classical_mixture());
    let doc = stdout_json(&qlock(&["locking", "--state", s(&st), "--eps1", "1", "--eps2", "2"]));
    assert!(doc["report"]["value"].as_f64().unwrap() <= 1e-8);
    assert_eq!(doc["classical"], true);
}

#[test]
fn locking_writes_out_file() {
    let dir = TempDir::new().unwrap();
    let st = write_state(&dir, "w.json", &werner(0.3).unwrap());
    let out = dir.path().join("report.json");
    let run = qlock(&["locking", "--state", s(&st), "--out", s(&out), "--seed", "4", "--grid-points", "1024"]);
    assert!(run.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["manifest"]["seed"], 4);
    assert_eq!(doc["manifest"]["config"]["optimizer"]["grid_points"], 1024);
}

#[test]
fn degenerate_levels_with_theorem3_exit_3() {
    let dir = TempDir::new().unwrap();
    let st = write_state(&dir, "w.json", &werner(0.5).unwrap());
    let levels = write_text(&dir, "levels.json", r#"{"levels": [0, 2, 2, 4]}"#);
    let out = qlock(&["locking", "--state", s(&st), "--observable", s(&levels), "--method", "theorem3"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"]["kind"], "degenerate-spectrum");

    let doc = stdout_json(&qlock(&["locking", "--state", s(&st), "--observable", s(&levels), "--method", "corollary1"]));
    assert!((doc["report"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write_text(&dir, "bad.json", r#"{"dims": [2, 2], "matrix": [1, 2]}"#);
    let out = qlock(&["locking", "--state", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["error"]["message"].is_string());

    let missing = dir.path().join("nope.json");
    assert_eq!(qlock(&["certify-cq", "--state", s(&missing)]).status.code(), Some(2));

    let st = write_state(&dir, "w.json", &werner(0.5).unwrap());
    assert_eq!(qlock(&["locking", "--state", s(&st), "--method", "simplex"]).status.code(), Some(2));

    let qutrit = write_state(&dir, "q.json", &random_density(2, 3, 1));
    assert_eq!(qlock(&["locking", "--state", s(&qutrit)]).status.code(), Some(3));
}

#[test]
fn werner_sweep_line_and_manifest() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = qlock(&["werner-sweep", "--alphas", "0:1:0.01", "--eps1", "2", "--eps2", "2", "--out", s(&csv)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,discord_bits,locking_energy"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 101);
    for r in &rows {
        assert!((r[2] - r[0]).abs() <= 1e-9);
        assert!((r[1] - qlock::locking::werner_discord_closed_form(r[0])).abs() <= 1e-4);
    }
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["manifest"]["command"], "werner-sweep");
    assert_eq!(manifest["rows"].as_array().unwrap().len(), 101);
}

#[test]
fn werner_sweep_single_point_and_bad_range() {
    let out = qlock(&["werner-sweep", "--alphas", "0"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "alpha,discord_bits,locking_energy\n0,0,0\n");
    for bad in ["0:2:0.1", "1:0:0.1", "x"] {
        assert_eq!(qlock(&["werner-sweep", "--alphas", bad]).status.code(), Some(2), "{bad}");
    }
}

#[test]
fn certify_cq_examples() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("mix.json", classical_mixture(), true),
        ("singlet.json", singlet(), false),
        ("w03.json", werner(0.3).unwrap(), false),
    ];
    for (name, rho, expected) in cases {
        let st = write_state(&dir, name, &rho);
        let doc = stdout_json(&qlock(&["certify-cq", "--state", s(&st)]));
        assert_eq!(doc["certificate"]["is_cq"], expected, "{name}");
        let value = doc["locking"]["value"].as_f64().unwrap();
        if expected {
            assert!(value <= 1e-8);
        } else {
            assert!(value > 1e-6, "{name}: {value}");
        }
    }
    let qutrit = write_state(&dir, "q.json", &random_density(3, 2, 5));
    let doc = stdout_json(&qlock(&["certify-cq", "--state", s(&qutrit)]));
    assert_eq!(doc["certificate"]["is_cq"], false);
    assert!(doc["locking"].is_null());
}

#[test]
fn purity_examples() {
    let dir = TempDir::new().unwrap();
    let mixed = DensityOperator::new(ComplexMatrix::identity(2).scale_real(0.5), (2, 1)).unwrap();
    let prod = product_state(&mixed, &DensityOperator::single(ComplexMatrix::from_diag(&[1.0, 0.0])).unwrap()).unwrap();
    let st = write_state(&dir, "prod.json", &prod);
    let doc = stdout_json(&qlock(&["purity", "--state", s(&st)]));
    for key in ["f_gl", "f_gn", "mutual_information"] {
        assert!(doc["report"][key].as_f64().unwrap().abs() < 1e-9, "{key}");
    }

    let st = write_state(&dir, "singlet.json", &singlet());
    let doc = stdout_json(&qlock(&["purity", "--state", s(&st), "--require-locking"]));
    assert!((doc["report"]["f_gl"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    assert!((doc["report"]["f_gn"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let probs = ProbabilityVector::new(vec![0.7, 0.3]).unwrap();
    let conds = [random_density(2, 1, 1), random_density(2, 1, 2)];
    let cq = make_cq(&probs, &conds, &[basis_state(2, 0), basis_state(2, 1)]).unwrap();
    let st = write_state(&dir, "cq.json", &cq);
    let doc = stdout_json(&qlock(&["purity", "--state", s(&st)]));
    assert!(doc["report"]["f_gn"].is_null());
    assert!(doc["report"]["skipped_reason"].is_string());
    let out = qlock(&["purity", "--state", s(&st), "--require-locking"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"]["kind"], "marginal-not-mixed");
}

#[test]
fn oracle_compare_contract() {
    let doc = stdout_json(&qlock(&["oracle-compare", "--samples", "0"]));
    assert_eq!(doc["summary"]["samples"], 0);
    assert!(doc["summary"]["worst_sample"].is_null());

    let a = stdout_json(&qlock(&["oracle-compare", "--samples", "3", "--seed", "11"]));
    let b = stdout_json(&qlock(&["oracle-compare", "--samples", "3", "--seed", "11"]));
    assert_eq!(a["summary"], b["summary"]);
    assert!(a["summary"]["max_deviation"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn check_channel_examples() {
    let dir = TempDir::new().unwrap();
    let obs = Observable::qubit_gap(1.0).unwrap();
    let obs_path = write_text(&dir, "obs.json", &to_json_string(&ObservableFile::from_observable(&obs)));
    let deph = make_free_observable_channel(&obs, FreeBranch::Dephasing);
    let deph_path = write_text(&dir, "deph.json", &to_json_string(&ChannelFile::from_channel(&deph)));
    let doc = stdout_json(&qlock(&["check-channel", "--channel", s(&deph_path), "--observable", s(&obs_path)]));
    assert_eq!(doc["free"], true);

    let excited = ClassicalChannel::prepare(basis_state(2, 1)).unwrap();
    let excited_path = write_text(&dir, "excited.json", &to_json_string(&ChannelFile::from_channel(&excited)));
    let doc = stdout_json(&qlock(&["check-channel", "--channel", s(&excited_path), "--observable", s(&obs_path)]));
    assert_eq!(doc["free"], false);
    assert!(doc["report"]["first_violation"]["energy_increase"].as_f64().unwrap() > 0.0);
}

#[test]
fn werner_state_round_trips() {
    let doc = qlock(&["werner-state", "--alpha", "0.5"]);
    let text = String::from_utf8(doc.stdout).unwrap();
    let rho = qlock::io::state_from_json(&text).unwrap();
    assert_eq!(rho, werner(0.5).unwrap());
    assert_eq!(qlock(&["werner-state", "--alpha", "1.5"]).status.code(), Some(2));
}
