//! End-to-end runs of the `absep` binary.

use std::path::Path;
use std::process::{Command, Output};

fn absep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_absep")).args(args).output().expect("run absep")
}

fn absep_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_absep")).args(args).env("ABSEP_THREADS", threads).output().expect("run absep")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(format!("{name}.dm.json"));
    let p = path.to_str().unwrap().to_string();
    let mut all = vec!["gen-state"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", &p]);
    let out = absep(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn detect_first_example() {
    let dir = tempfile::tempdir().unwrap();
    let s = gen(dir.path(), "rho1", &["--kind", "rho1"]);
    let out = absep(&["detect", "--state", &s, "--unitary", "paper:U1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "NotAbsolutelySeparable");
    assert_eq!(v["state_id"], "rho1");
}

#[test]
fn detect_second_example() {
    let dir = tempfile::tempdir().unwrap();
    let s = gen(dir.path(), "rho2", &["--kind", "rho2"]);
    let out = absep(&["detect", "--state", &s, "--unitary", "example:U2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["thm1"]["margin"].as_f64().unwrap() - 0.09375).abs() < 1e-10);
}

#[test]
fn maximally_mixed_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let s = gen(dir.path(), "mm", &["--kind", "maxmix", "--dims", "2x2"]);
    let out = absep(&["detect", "--state", &s, "--budget", "300", "--restarts", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"], "Inconclusive");
}

#[test]
fn errors_exit_with_one() {
    assert_eq!(absep(&["detect", "--state", "/nonexistent.dm.json"]).status.code(), Some(1));
    assert_eq!(absep(&["no-such-command"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let s = gen(dir.path(), "rho1", &["--kind", "rho1"]);
    // U2 acts on dimension 8, the state on 4.
    assert_eq!(absep(&["detect", "--state", &s, "--unitary", "paper:U2"]).status.code(), Some(1));
}

#[test]
fn scan_csv_layout() {
    let out = absep(&["scan", "--family", "isotropic3", "--points", "11", "--tol", "1e-5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("p,thm1_margin,detH1,detH2,verdict"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 12);
    let line = text.lines().find(|l| l.starts_with("# threshold detH2")).unwrap();
    let p: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((0.198..=0.208).contains(&p));
}

#[test]
fn channel_threshold_dep2() {
    let out = absep(&["channel-threshold", "--family", "dep2", "--tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["p_star"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-4);
}

#[test]
fn channel_detect_single_point() {
    let out = absep(&["channel-detect", "--family", "dep2", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "NotAbsolutelySeparating");
    let out = absep(&["channel-detect", "--family", "dep2", "--p", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn discriminate_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let s = gen(dir.path(), "bell", &["--kind", "bell", "--d", "2"]);
    let out = absep(&["discriminate", "--state", &s]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let (dist, k) = (v["distance"].as_f64().unwrap(), v["k"].as_f64().unwrap());
    assert!((dist - 3.0 * k).abs() < 1e-10);
}

#[test]
fn gen_state_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let s = gen(dir.path(), "r", &["--kind", "random", "--dims", "2x3", "--seed", "5"]);
    let text = std::fs::read_to_string(&s).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!((v["dim_a"].as_u64(), v["dim_b"].as_u64()), (Some(2), Some(3)));
    let again = gen(dir.path(), "r2", &["--kind", "random", "--dims", "2x3", "--seed", "5"]);
    assert_eq!(text, std::fs::read_to_string(again).unwrap());
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let s = gen(dir.path(), "r", &["--kind", "random", "--dims", "2x2", "--seed", "3"]);
    let args = ["detect", "--state", &s, "--budget", "300", "--restarts", "6"];
    let a = absep_env(&args, "1");
    let b = absep_env(&args, "1");
    let c = absep_env(&args, "4");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let sweep = ["channel-detect", "--family", "dep3", "--p", "0.3"];
    assert_eq!(absep_env(&sweep, "1").stdout, absep_env(&sweep, "3").stdout);
}
