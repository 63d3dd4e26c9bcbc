//! End-to-end runs of the `slepf` binary.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn slepf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slepf"))
        .args(args)
        .env_remove("SLEPF_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slepf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn params_report_weights() {
    let v = json(&slepf(&["params", "--kappa", "3"]));
    assert_eq!(v["h"].as_f64(), Some(0.5));
    assert_eq!(v["c"].as_f64(), Some(0.5));
    assert_eq!(v["command"], "params");
    assert_eq!(v["config"]["kappa"].as_f64(), Some(3.0));
}

#[test]
fn pf_eval_matches_the_elementary_formula() {
    let v = json(&slepf(&["pf", "eval", "--kappa", "4", "--alpha", "1-2,3-4", "--points", "0,1,2,4"]));
    // (x21 x43)^(-1/2) (x32 x41 / (x31 x42))^(1/2) at (0, 1, 2, 4).
    let want = (0.5f64).sqrt() * (4.0f64 / 6.0).sqrt();
    assert!((v["value"].as_f64().unwrap() - want).abs() < 1e-13);
}

#[test]
fn negative_points_parse() {
    let v = json(&slepf(&["pf", "eval", "--kappa", "3", "--alpha", "1-2", "--points", "-1.5,0.5"]));
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-14);
}

#[test]
fn verification_suites_exit_zero() {
    for suite in ["cov", "bounds"] {
        let out = slepf(&["pf", "verify", "--suite", suite, "--kappa", "6"]);
        let v = json(&out);
        assert_eq!(v["pass"], true, "{suite}");
    }
}

#[test]
fn usage_and_domain_errors_exit_two() {
    let crossing = slepf(&["pf", "eval", "--kappa", "3", "--alpha", "1-3,2-4", "--points", "0,1,2,3"]);
    assert_eq!(crossing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&crossing.stderr).contains("cross"));
    assert_eq!(slepf(&["params", "--kappa", "-1"]).status.code(), Some(2));
    assert_eq!(slepf(&["pf", "eval", "--kappa", "3"]).status.code(), Some(2));
    assert_eq!(slepf(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(slepf(&["--help"]).status.code(), Some(0));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let args = ["mc", "estimate", "--kappa", "3", "--alpha", "1-4,2-3", "--points", "0,1,2,4", "--samples", "200", "--seed", "9"];
    let a = slepf(&args);
    let b = slepf(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = vec!["--threads", "3"];
    threaded.extend_from_slice(&args);
    assert_eq!(a.stdout, slepf(&threaded).stdout);
}

#[test]
fn config_file_and_environment_seed() {
    let cfg = scratch("defaults.toml");
    std::fs::write(&cfg, "kappa = 3.0\nalpha = \"1-2,3-4\"\npoints = [0.0, 1.0, 2.0, 4.0]\nsamples = 150\nseed = 4\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = json(&slepf(&["--config", cfg, "mc", "estimate"]));
    assert_eq!(from_file["config"]["seed"], 4);
    assert_eq!(from_file["M"], 150);

    let flag = json(&slepf(&["--config", cfg, "mc", "estimate", "--samples", "120"]));
    assert_eq!(flag["M"], 120);

    let env = Command::new(env!("CARGO_BIN_EXE_slepf"))
        .args(["mc", "estimate", "--kappa", "3", "--alpha", "1-2,3-4", "--points", "0,1,2,4", "--samples", "100"])
        .env("SLEPF_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(json(&env)["config"]["seed"], 17);

    let bad = scratch("bad.toml");
    std::fs::write(&bad, "kapa = 3.0\n").unwrap();
    assert_eq!(slepf(&["--config", bad.to_str().unwrap(), "params"]).status.code(), Some(2));
}

#[test]
fn sle_sample_writes_csv_with_metadata_sidecar() {
    let path = scratch("trace.csv");
    let out = slepf(&["-o", path.to_str().unwrap(), "sle", "sample", "--kappa", "2", "--steps", "50", "--seed", "3", "--trace"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,w,x,y"));
    assert_eq!(lines.count(), 51);
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(path.with_extension("csv.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["seed"], 3);
}
