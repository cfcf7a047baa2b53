use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ho-heat"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn eval_c_at_rho_is_one() {
    let (code, stdout) = run(&["eval", "c", "--lambda", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!((v["value"]["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn eval_phi_at_origin_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"root_system": "A2", "multiplicities": [2.0]}"#).unwrap();
    let (code, stdout) = run(&["--config", cfg.to_str().unwrap(), "eval", "phi", "--lambda", "0.7:0.2,-0.3", "--point", "0,0"]);
    assert_eq!(code, 0, "{stdout}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!((v["value"]["re"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["verify", "no_such_suite"]).0, 2);
    assert_eq!(run(&["eval", "c", "--lambda", "1,2"]).0, 2);
    assert_eq!(run(&["eval", "phi", "--lambda", "x", "--point", "1"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--tolerance", "gamma", "verify"]).0, 2);
}

#[test]
fn verify_exit_codes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _) = run(&["verify", "gamma", "c_function", "--out", out]);
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify_report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["suites"].as_array().unwrap().len(), 2);
    // an impossible tolerance turns the same suite into a verification failure
    let (code, _) = run(&["verify", "gamma", "--out", out, "--tolerance", "gamma=1e-300"]);
    assert_eq!(code, 1);
}

#[test]
fn forward_then_inverse_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["transform", "forward", "--out", out]).0, 0);
    let fwd = dir.path().join("forward.csv");
    assert!(dir.path().join("forward.json").exists());
    let (code, _) = run(&["transform", "inverse", "--out", out, "--input", fwd.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, _) = run(&["transform", "inverse", "--out", out, "--input", fwd.to_str().unwrap(), "--grid-n", "64"]);
    assert_eq!(code, 2, "a grid that does not match the configuration is a schema mismatch");
}

#[test]
fn describe_operator_requires_even_multiplicities() {
    let (code, stdout) = run(&["describe-operator", "psi-a"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("factors"));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"multiplicities": [1.0]}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "describe-operator", "d"]).0, 2);
}

#[test]
fn heat_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout) = run(&["heat", "--t", "0.3", "--out", out]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let ratio = v["times"][0]["norm_ratio"].as_f64().unwrap();
    assert!(ratio > 0.0 && ratio <= 1.0);
    assert!(dir.path().join("heat_t0.3.csv").exists());
}
