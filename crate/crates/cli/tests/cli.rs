use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn isingfem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isingfem")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn solve_poisson_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let res = isingfem(&["solve", "--problem", "poisson1d", "--nodes", "11", "--sampler", "exhaustive", "--out", path(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["converged"], true);
    assert!(manifest["normalized_residual"].as_f64().unwrap() <= 1e-5);
    let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("iter,alpha,functional,residual,success,phase"));
    let solution = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    assert_eq!(solution.lines().count(), 12);
}

#[test]
fn same_seed_same_trace() {
    let dir = tempfile::tempdir().unwrap();
    let traces: Vec<String> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let res = isingfem(&[
                "solve", "--problem", "poisson1d", "--nodes", "9", "--sweeps", "200", "--reads", "4", "--seed", "7",
                "--out", path(&out),
            ]);
            assert!(res.status.success());
            std::fs::read_to_string(out.join("trace.csv")).unwrap()
        })
        .collect();
    assert_eq!(traces[0], traces[1]);
}

#[test]
fn wave_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wave");
    let res = isingfem(&[
        "solve", "--problem", "wave1d", "--nodes", "11", "--steps", "3", "--sampler", "exhaustive", "--out", path(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let solution = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    // header, initial state, three steps
    assert_eq!(solution.lines().count(), 5);
    for k in 1..=3 {
        assert!(out.join(format!("trace_step{k}.csv")).exists());
    }
}

#[test]
fn iteration_cap_exits_four_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("capped");
    let res = isingfem(&[
        "solve", "--problem", "poisson1d", "--nodes", "11", "--sampler", "exhaustive", "--max-iterations", "2", "--out",
        path(&out),
    ]);
    assert_eq!(res.status.code(), Some(4));
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["converged"], false);
    assert!(manifest["failure"].is_string());
}

#[test]
fn malformed_config_exits_two_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    let out = dir.path().join("never");
    std::fs::write(&cfg, r#"{"problem": {"kind": "poisson1d", "nodez": 5}}"#).unwrap();
    let res = isingfem(&["solve", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unreadable_input_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let res = isingfem(&["ttt", "--input", path(&dir.path().join("absent.json")), "--out", path(dir.path())]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn cosine_d2_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let res = isingfem(&["cosine", "--kind", "d2", "--n", "3", "--restarts", "50", "--out", path(dir.path())]);
    assert!(res.status.success());
    let report = read_json(&dir.path().join("cosine_d2_3.json"));
    let est = report["estimate"].as_f64().unwrap();
    assert!((est - 1.0 / 3f64.sqrt()).abs() <= 1e-3, "{est}");
    assert!(String::from_utf8_lossy(&res.stdout).contains("spanning    true"));
}

#[test]
fn oversized_set_exits_two() {
    let res = isingfem(&["cosine", "--kind", "d4", "--n", "12"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn ttt_on_hamiltonian_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    std::fs::write(&h, r#"{"linear": {"0": 0.5, "1": -0.25}, "quadratic": {"0,1": -1.0}, "offset": 0.0}"#).unwrap();
    let out = dir.path().join("single");
    let res = isingfem(&[
        "ttt", "--input", path(&h), "--grid", "10,20", "--reads", "100", "--reference", "exhaustive",
        "--sweep-time-us", "1", "--reference-time-us", "5", "--out", path(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(out.join("ttt_report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    let run = dir.path().join("run");
    let res = isingfem(&[
        "solve", "--problem", "poisson1d", "--nodes", "7", "--sampler", "exhaustive", "--record-snapshots",
        "--max-iterations", "3", "--out", path(&run),
    ]);
    assert_eq!(res.status.code(), Some(4));
    let batch = dir.path().join("batch");
    let res = isingfem(&[
        "ttt", "--input", path(&run.join("replay.json")), "--grid", "10", "--reads", "50", "--sweep-time-us", "1",
        "--out", path(&batch),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(batch.join("ttt_batch.json").exists());
}

#[test]
fn empty_grid_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    std::fs::write(&h, r#"{"linear": {"0": 1.0}, "quadratic": {}, "offset": 0.0}"#).unwrap();
    let res = isingfem(&["ttt", "--input", path(&h), "--grid", "", "--out", path(dir.path())]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn generated_system_solves() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.json");
    let res = isingfem(&["gen-system", "--problem", "poisson2d", "--nodes", "4", "--out", path(&sys)]);
    assert!(res.status.success());
    let mtx = dir.path().join("a.mtx");
    assert!(isingfem(&["gen-system", "--problem", "poisson1d", "--nodes", "5", "--out", path(&mtx)]).status.success());
    assert!(std::fs::read_to_string(&mtx).unwrap().starts_with("%%MatrixMarket"));
    let out = dir.path().join("solved");
    let res = isingfem(&[
        "solve", "--problem", "system", "--system", path(&sys), "--sampler", "exhaustive", "--out", path(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
}
