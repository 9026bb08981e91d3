use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sepkit() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sepkit"));
    for var in ["SEPKIT_TOL", "SEPKIT_BUDGET", "SEPKIT_RESTARTS", "SEPKIT_SEED", "SEPKIT_KMAX", "SEPKIT_FORMAT", "SEPKIT_OUT"] {
        cmd.env_remove(var);
    }
    cmd
}

fn run(args: &[&str]) -> Output {
    sepkit().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn generate(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn structured(path: &Path, cmd: &str, extra: &[&str]) -> (i32, Value) {
    let mut args = vec![cmd, path.to_str().unwrap(), "--format", "structured"];
    args.extend_from_slice(extra);
    let out = run(&args);
    let code = out.status.code().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or_else(|_| {
        panic!("no report (exit {code}): {}", String::from_utf8_lossy(&out.stderr))
    });
    (code, report)
}

#[test]
fn werner_above_threshold_is_npt_entangled_and_distillable() {
    let dir = TempDir::new().unwrap();
    let file = generate(&dir, "w.yaml", &["werner_2x2", "--p", "0.9"]);
    let (code, r) = structured(&file, "analyze", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["ppt"]["ppt"], false);
    assert_eq!(r["separability"]["verdict"], "entangled");
    assert_eq!(r["distillability"]["verdict"], "distillable");
    assert_eq!(r["distillability"]["k"], 1);
    assert!(r["witness"]["value"].as_f64().unwrap() < 0.0);
    assert_eq!(r["input"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn maximally_mixed_qutrits_are_separable() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("dims: [3, 3]\nmatrix:\n");
    for i in 0..9 {
        let row: Vec<String> = (0..9).map(|j| format!("[{}, 0]", if i == j { 1.0 / 9.0 } else { 0.0 })).collect();
        text.push_str(&format!("- [{}]\n", row.join(", ")));
    }
    let file = write(&dir, "mm.yaml", &text);
    let (code, r) = structured(&file, "analyze", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["ppt"]["ppt"], true);
    assert_eq!(r["separability"]["verdict"], "separable");
    assert!((r["bsa"]["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(r["separability"]["reconstruction_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn non_hermitian_input_exits_with_invariant_violation() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "nh.yaml",
        "dims: [2, 2]\nmatrix:\n- [[0.25,0],[0.1,0],[0,0],[0,0]]\n- [[0,0],[0.25,0],[0,0],[0,0]]\n- [[0,0],[0,0],[0.25,0],[0,0]]\n- [[0,0],[0,0],[0,0],[0.25,0]]\n",
    );
    let out = run(&["analyze", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hermitian"));
}

#[test]
fn malformed_yaml_exits_with_parse_error_and_location() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "bad.yaml", "dims: [2, 2]\nmatrix: [[[1, 0]]\n");
    let out = run(&["analyze", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn fermion_reports_rank_and_concurrence() {
    let dir = TempDir::new().unwrap();
    let elementary = write(&dir, "e.yaml", "n_modes: 4\nw: [[0.5,0],[0,0],[0,0],[0,0],[0,0],[0,0]]\n");
    let (code, r) = structured(&elementary, "fermion", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["slater_rank"], 1);
    assert!(r["concurrence"].as_f64().unwrap().abs() < 1e-12);

    let h = 0.5 / 2f64.sqrt();
    let equal = write(&dir, "z.yaml", &format!("n_modes: 4\nw: [[{h},0],[0,0],[0,0],[0,0],[0,0],[{h},0]]\n"));
    let (_, r) = structured(&equal, "fermion", &[]);
    assert_eq!(r["slater_rank"], 2);
    assert!((r["concurrence"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn symmetric_matrix_is_rejected_by_fermion() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "s.yaml", "n_modes: 2\nmatrix:\n- [[0,0],[0.5,0]]\n- [[0.5,0],[0,0]]\n");
    let out = run(&["fermion", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("antisymmetric"));
}

#[test]
fn every_family_round_trips_through_analyze() {
    let dir = TempDir::new().unwrap();
    let cases: [(&str, &[&str]); 5] = [
        ("maximally_entangled", &["--d", "3"]),
        ("werner_2x2", &["--p", "0.2"]),
        ("sym_antisym", &["--d", "3", "--lambda", "0.3"]),
        ("random", &["--m", "2", "--n", "3", "--rank", "3", "--seed", "5"]),
        ("random_separable", &["--m", "2", "--n", "3", "--rank", "2", "--seed", "5"]),
    ];
    for (family, params) in cases {
        let mut args = vec![family];
        args.extend_from_slice(params);
        let file = generate(&dir, &format!("{family}.yaml"), &args);
        let (code, r) = structured(&file, "analyze", &["--kmax", "1"]);
        assert!(code == 0 || code == 4, "{family}: exit {code}");
        assert!(r["separability"]["verdict"].is_string(), "{family}");
    }
}

#[test]
fn random_rank_two_ppt_2x3_is_certified_separable() {
    let dir = TempDir::new().unwrap();
    let file = generate(&dir, "r.yaml", &["random_separable", "--m", "2", "--n", "3", "--rank", "2", "--seed", "11"]);
    let (code, r) = structured(&file, "analyze", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["separability"]["verdict"], "separable");
    assert!(r["separability"]["reconstruction_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn unknown_family_is_a_usage_error() {
    let out = run(&["generate", "ghz"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ghz"));
}

#[test]
fn inconclusive_search_exits_four_and_still_reports() {
    let dir = TempDir::new().unwrap();
    let file = generate(&dir, "s.yaml", &["sym_antisym", "--d", "3", "--lambda", "0.55"]);
    let (code, r) = structured(&file, "analyze", &["--kmax", "1"]);
    assert_eq!(code, 4);
    assert_eq!(r["distillability"]["verdict"], "inconclusive");
    let v = r["distillability"]["value"].as_f64().unwrap();
    assert!((v - (3.0 - 5.0 * 0.55) / 12.0).abs() < 1e-9, "{v}");
}

#[test]
fn reports_are_reproducible_from_seeds() {
    let dir = TempDir::new().unwrap();
    let file = generate(&dir, "r.yaml", &["random", "--m", "3", "--n", "3", "--rank", "5", "--seed", "3"]);
    let (_, mut a) = structured(&file, "analyze", &["--seed", "9", "--kmax", "1"]);
    let (_, mut b) = structured(&file, "analyze", &["--seed", "9", "--kmax", "1"]);
    a["run"]["wall_time_s"] = Value::Null;
    b["run"]["wall_time_s"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn environment_overrides_mirror_flags() {
    let dir = TempDir::new().unwrap();
    let file = generate(&dir, "w.yaml", &["werner_2x2", "--p", "0.5"]);
    let out = sepkit()
        .args(["analyze", file.to_str().unwrap()])
        .env("SEPKIT_SEED", "42")
        .env("SEPKIT_RESTARTS", "5")
        .env("SEPKIT_FORMAT", "structured")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["run"]["seed"], 42);
    assert_eq!(r["run"]["restarts"], 5);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = TempDir::new().unwrap();
    let file = generate(&dir, "w.yaml", &["werner_2x2", "--p", "0.9"]);
    let report = dir.path().join("report.json");
    let out = run(&["analyze", file.to_str().unwrap(), "--format", "structured", "--out", report.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["command"], "analyze");
}

#[test]
fn scan_prints_a_table() {
    let out = run(&["scan", "--d", "3", "--from", "0.6", "--to", "1.0", "--points", "3", "--restarts", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,ppt,min_expectation,restarts_used,seed"));
    assert_eq!(lines.count(), 3);
}
