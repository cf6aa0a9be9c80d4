use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use yamabe_ancients::evolution::{evolve_exact, CylinderSolution, EvolveConfig};
use yamabe_ancients::io::write_json;
use yamabe_ancients::ModelParams;

fn run(args: &[&str]) -> (i32, Value, Output) {
    let out = Command::new(env!("CARGO_BIN_EXE_yamabe-ancients"))
        .args(args)
        .env("YAMABE_ANCIENTS_THREADS", "2")
        .output()
        .unwrap();
    let code = out.status.code().unwrap();
    let manifest: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    assert_eq!(manifest["exit_code"].as_i64(), Some(code as i64));
    (code, manifest, out)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2_with_a_manifest() {
    let (code, m, _) = run(&["wave", "--n", "4"]);
    assert_eq!(code, 2);
    assert!(m["error"].is_string());
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn wave_rejects_slow_speeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w");
    let (code, m, _) = run(&["wave", "--n", "4", "--lambda", "0.5", "--out", s(&out)]);
    assert_eq!(code, 2);
    assert!(m["error"].as_str().unwrap().contains("lambda must be"));
}

#[test]
fn wave_at_unit_speed_is_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w");
    let (code, m, _) = run(&["wave", "--n", "4", "--lambda", "1.0", "--out", s(&out)]);
    assert_eq!(code, 0);
    let side: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(side["closed_form"], Value::Bool(true));
    assert!(m["outputs"].as_array().unwrap().len() >= 2);
}

#[test]
fn thread_cap_must_be_positive() {
    let out = Command::new(env!("CARGO_BIN_EXE_yamabe-ancients"))
        .args([
            "king", "--n", "4", "--xi0", "1.001", "--zeta0", "1e-6", "--tau0", "-5", "--tau1", "0",
        ])
        .env("YAMABE_ANCIENTS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn king_reports_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("king.csv");
    let (code, m, _) = run(&[
        "king",
        "--n",
        "4",
        "--xi0",
        "1.001",
        "--zeta0",
        "1e-6",
        "--tau0",
        "-5",
        "--tau1",
        "0",
        "--out",
        s(&csv),
    ]);
    assert_eq!(code, 0, "{m}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("tau,xi,zeta"));
    assert_eq!(m["verdicts"]["exponents"], Value::String("pass".into()));
}

#[test]
fn barrier_check_and_evolve() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let base = [
        "barrier-check",
        "--n",
        "4",
        "--lambda",
        "2",
        "--lambda2",
        "2",
        "--h",
        "0",
        "--h2",
        "0",
        "--k",
        "1",
    ];

    let bad = dir.path().join("bad.json");
    let mut args = base.to_vec();
    args.extend(["--q", "0", "--out", s(&bad)]);
    let (code, _, _) = run(&args);
    assert_eq!(code, 1);

    let mut args = base.to_vec();
    args.extend(["--out", s(&cert)]);
    let (code, m, _) = run(&args);
    assert_eq!(code, 0, "{m}");
    assert_eq!(m["results"]["binding_region"], Value::String("case2_left".into()));

    let rundir = dir.path().join("run");
    let evolve = |manifest: &Path| {
        run(&[
            "evolve",
            "--manifest",
            s(manifest),
            "--m",
            "12",
            "--X",
            "40",
            "--dx",
            "0.1",
            "--dtau",
            "0.02",
            "--snapshots",
            "4",
            "--out",
            s(&rundir),
        ])
    };
    let (code, _, _) = evolve(&bad);
    assert_eq!(code, 2, "a failed certificate is refused");
    let (code, _, _) = evolve(&dir.path().join("missing.json"));
    assert_eq!(code, 2);

    let (code, m, _) = evolve(&cert);
    assert_eq!(code, 0, "{m}");
    assert!(m["results"]["sandwich"]["pass"].as_bool().unwrap());
    let snap = std::fs::read_to_string(rundir.join("snapshot_000.csv")).unwrap();
    assert_eq!(snap.lines().next(), Some("x,u,phi"));
    assert_eq!(snap.lines().count(), 802);

    let (code, m, _) = run(&["curvature", "--run", s(&rundir), "--verdict"]);
    assert_eq!(code, 0, "{m}");
    assert!(rundir.join("curvature").join("report.json").is_file());
}

#[test]
fn curvature_needs_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&["curvature", "--run", s(&dir.path().join("nothing"))]);
    assert_eq!(code, 2);
}

#[test]
fn cylinder_run_passes_the_type_one_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let m = ModelParams::new(4).unwrap();
    let config = EvolveConfig {
        m: 12.0,
        x_half: 10.0,
        snapshot_interval: 0.5,
        ..EvolveConfig::default()
    };
    let run_data = evolve_exact(&config, &m, &CylinderSolution { k: 0.0, model: m }).unwrap();
    write_json(&dir.path().join("run.json"), &run_data).unwrap();
    let (code, manifest, _) = run(&["curvature", "--run", s(dir.path()), "--verdict"]);
    assert_eq!(code, 0, "{manifest}");
}
