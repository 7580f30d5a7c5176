use std::path::Path;
use std::process::{Command, Output};

use zollflow::cli::RunConfig;

fn zollflow(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zollflow"));
    cmd.args(args);
    if let Some(n) = threads {
        cmd.env("ZOLLFLOW_THREADS", n);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn usage_and_config_errors_exit_with_one() {
    assert_eq!(code(&zollflow(&["describe", "--bogus"], None)), 1);
    assert_eq!(code(&zollflow(&["frobnicate"], None)), 1);
    assert_eq!(code(&zollflow(&["describe", "--nodes", "10"], None)), 1);
    assert_eq!(code(&zollflow(&["describe", "--surface", "michel", "--coeffs=0.3"], None)), 1);
    assert_eq!(code(&zollflow(&["describe", "--surface", "round", "--coeffs=0.3,-0.3"], None)), 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"geodesics": {"tol": -1}}"#);
    let out = zollflow(&["describe", "--config", &bad], None);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("geodesics.tol"));
    assert_eq!(code(&zollflow(&["--help"], None)), 0);
}

#[test]
fn verify_zoll_exit_codes() {
    assert_eq!(code(&zollflow(&["verify-zoll", "--surface", "round", "--samples", "8"], None)), 0);
    let michel = zollflow(&["verify-zoll", "--surface", "michel", "--coeffs=0.3,-0.3", "--samples", "8"], None);
    assert_eq!(code(&michel), 0);
    let gong = zollflow(&["verify-zoll", "--surface", "gong_normalized", "--samples", "8"], None);
    assert_eq!(code(&gong), 2);
    assert!(String::from_utf8_lossy(&gong.stderr).contains("not Zoll"));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let short = write(dir.path(), "short.json", r#"{"geodesics": {"horizon": 0.5}}"#);
    assert_eq!(code(&zollflow(&["verify-zoll", "--config", &short, "--samples", "4"], None)), 3);
}

#[test]
fn lprime_on_the_round_sphere_is_clean() {
    let out = zollflow(&["lprime", "--surface", "round", "--nodes", "65", "--samples", "4"], None);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["flag"], "none");
}

#[test]
fn weinstein_verdicts() {
    let round = zollflow(&["weinstein", "--surface", "round", "--samples", "8"], None);
    assert_eq!(code(&round), 0);
    let v: serde_json::Value = serde_json::from_slice(&round.stdout).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["weinstein"]["nearest"], 1);
    let gong = zollflow(&["weinstein", "--surface", "gong_normalized", "--samples", "8"], None);
    assert_eq!(code(&gong), 2);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "flow".to_owned(),
            "--surface".into(),
            "gong_normalized".into(),
            "--nodes".into(),
            "65".into(),
            "--T".into(),
            "0.02".into(),
            "--sweeps".into(),
            "--samples".into(),
            "6".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let run = |p: &Path, threads| {
        let owned = args(p);
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        assert_eq!(code(&zollflow(&refs, threads)), 0);
    };
    run(&a, Some("1"));
    run(&b, Some("4"));
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("# zollflow flow"));
    assert!(text.lines().any(|l| l == "t,equator_length,max_abs_K_minus_1,area,K_bar,period_spread"));
    let no_tmp = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(no_tmp, 2);
}

#[test]
fn config_file_round_trips_and_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::default();
    c.surface = zollflow::cli::SurfaceSpec::GongRaw;
    c.grid.n_nodes = 128;
    let path = write(dir.path(), "run.json", &c.to_json());
    let from_file = zollflow(&["describe", "--config", &path], None);
    let from_flags = zollflow(&["describe", "--surface", "gong_raw", "--nodes", "128"], None);
    assert_eq!(code(&from_file), 0);
    assert_eq!(from_file.stdout, from_flags.stdout);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(RunConfig::from_json(&text).unwrap().to_json(), text);
}
