use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cnls(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_cnls"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .env("CNLS_WORKERS", "2")
        .output()
        .unwrap()
}

fn params(dim: u32, alpha: f64, re: f64, im: f64) -> String {
    format!("[params]\nN = {dim}\nalpha = {alpha}\nlambda_re = {re}\nlambda_im = {im}\n")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL_STUDY: &str = "k = 6.0\n\n[grid]\nnum_points = 512\nradius = 16.0\n\n\
[study]\nn_list = [4, 8, 16]\ndt = 1e-3\ndelta = 0.1\n";

const CONSERVATIVE: &str = "\n[grid]\nnum_points = 256\nradius = 16.0\n\n\
[solve]\ndt = 1e-3\nt_start = 0.0\nt_end = 0.2\ndiag_every = 10\n\n\
[initial]\nkind = \"gaussian\"\namplitude = 0.5\nwidth = 1.0\n";

#[test]
fn admissible_parameters_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = cnls(dir.path(), &params(3, 2.0, 0.0, 1.0), &["check-params"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("theorem applies"));
}

#[test]
fn boundary_coefficient_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // (α+2) Im λ = α|λ| with α = 4, Im λ = 1: |λ| = 3/2.
    let re = (1.5f64 * 1.5 - 1.0).sqrt();
    let out = cnls(dir.path(), &params(3, 4.0, re, 1.0), &["check-params"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("strict inequality required"));
}

#[test]
fn missing_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = params(3, 2.0, 0.0, 1.0).replace("lambda_im = 1\n", "");
    let out = cnls(dir.path(), &text, &["check-params"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_config_exits_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_cnls"))
        .args(["check-params", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evolve_real_lambda_reports_conservation() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let text = params(1, 2.0, 1.0, 0.0) + CONSERVATIVE;
    let out = cnls(dir.path(), &text, &["evolve", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&out_dir.join("evolve_report.json"));
    assert!(report["l2_relative_drift"].as_f64().unwrap() < 1e-10);
    assert!(report["energy_relative_drift"].as_f64().unwrap() < 1e-6);
    let manifest = read_json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["status"], "complete");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,l2,h1_dot,h1,l_alpha_plus_2,sigma,weighted_l2,energy,charge_residual\n"));
    assert_eq!(csv.lines().count(), 1 + 21);
    let field = std::fs::read_to_string(out_dir.join("final_field.csv")).unwrap();
    assert!(field.starts_with("coordinate,re,im\n"));
    assert!(out_dir.join("schema.json").exists());
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = params(1, 2.0, 0.0, 1.0) + SMALL_STUDY;
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out_dir = dir.path().join(name);
            let out = cnls(dir.path(), &text, &["fit-rates", "--out", out_dir.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            out_dir
        })
        .collect();
    let mut names: Vec<_> = std::fs::read_dir(&runs[0])
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.iter().any(|n| n == "rate_fits.csv"));
    assert!(names.iter().any(|n| n == "eps_n16.csv"));
    for name in names {
        let a = std::fs::read(runs[0].join(&name)).unwrap();
        let b = std::fs::read(runs[1].join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs");
    }
}

#[test]
fn blowup_study_refuses_real_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let text = params(1, 2.0, 1.0, 0.0) + SMALL_STUDY;
    let out = cnls(dir.path(), &text, &["blowup-study", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("validation mode"));
    assert!(!out_dir.exists());
}

#[test]
fn blowup_study_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let text = params(1, 2.0, 0.0, 1.0) + SMALL_STUDY;
    let out = cnls(dir.path(), &text, &["blowup-study", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&out_dir.join("study_report.json"));
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "rate_l2" && c["passed"] == true));
    for n in [4, 8, 16] {
        assert!(out_dir.join(format!("eps_n{n}.csv")).exists());
    }
}

#[test]
fn dt_refine_halves_the_step() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let text = params(1, 2.0, 1.0, 0.0) + CONSERVATIVE;
    let out = cnls(dir.path(), &text, &["evolve", "--dt-refine", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let manifest = read_json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["dt"].as_f64().unwrap(), 5e-4);
    let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 21);
}

#[test]
fn profile_norms_emit_scaling_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let text = params(1, 2.0, 0.0, 1.0) + "k = 6.0\n";
    let out = cnls(dir.path(), &text, &["profile-norms", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("profile_lap_l2_p2.csv")).unwrap();
    assert!(csv.starts_with("t,norm,predicted,fitted\n"));
    assert!(out_dir.join("profile_lp_pinf.csv").exists());
}

#[test]
fn failed_run_removes_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    // Forward in time with Im λ > 0 the pointwise flow blows up almost at once.
    let text = params(1, 2.0, 0.0, 1.0) + &CONSERVATIVE.replace("amplitude = 0.5", "amplitude = 10.0");
    let out = cnls(dir.path(), &text, &["evolve", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let manifest = read_json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["status"], "failed");
    assert!(!out_dir.join("trajectory.csv").exists());
    assert!(!out_dir.join("schema.json").exists());
}
