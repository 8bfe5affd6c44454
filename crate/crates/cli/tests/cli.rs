use std::process::{Command, Output};

fn rmf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmf-lab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn schedule_csv_header() {
    let o = rmf(&["schedule", "--K", "2", "--ell", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().next(), Some("ell,j,llog_y,j_star_flag"));
    assert!(out.lines().count() > 2);
}

#[test]
fn schedule_refuses_small_ell() {
    let o = rmf(&["schedule", "--K", "2", "--ell", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ell = 2 <= K = 2"));
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(code(&rmf(&["verify", "no-such-suite"])), 2);
    assert_eq!(code(&rmf(&["simulate", "--seeds", "0"])), 2);
    assert_eq!(code(&rmf(&["frobnicate"])), 2);
    assert_eq!(code(&rmf(&["simulate", "--bogus-flag", "1"])), 2);
}

#[test]
fn resource_error_exits_3() {
    assert_eq!(code(&rmf(&["simulate", "--x-max", "1e12"])), 3);
    assert_eq!(code(&rmf(&["lower-probe", "--ladder-k", "1..8", "--seeds", "1"])), 3);
}

#[test]
fn verify_suite_passes() {
    let o = rmf(&["verify", "parseval", "--scale", "quick"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("name,class,lhs,rhs,tolerance,pass,diagnostics"));
}

#[test]
fn failing_verdict_exits_1() {
    // the ladder minimum of the deterministic term sits below the asserted 0.5
    let o = rmf(&["verify", "deterministic"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("[FAIL] deterministic/deterministic-term-ladder"));
}

#[test]
fn interrupted_run_is_flagged_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = rmf(&[
        "simulate", "--seeds", "50", "--x-max", "1e3", "--abort-after", "3", "--format", "json", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["complete"], false);
}

#[test]
fn simulate_rows_per_seed_and_checkpoint() {
    let o = rmf(&["simulate", "--seeds", "4", "--x-max", "1e4", "--model", "rademacher"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    let cps = rmf_checkpoints(1e4);
    assert_eq!(out.lines().count(), 1 + 4 * cps);
}

fn rmf_checkpoints(x: f64) -> usize {
    let mut v: Vec<f64> = (1..)
        .map(|i: u32| (i as f64).sqrt().exp().floor())
        .take_while(|&c| c <= x)
        .filter(|&c| c >= 16.0)
        .collect();
    v.dedup();
    v.len()
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# toy run\nx-max = 1e3\nseeds = 2\nformat = json\n").unwrap();
    let o = rmf(&["simulate", "--config", cfg.to_str().unwrap(), "--x-max", "2e3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["x-max"], "2e3");
    assert_eq!(v["seeds"].as_array().unwrap().len(), 2);
}

fn numeric_payload(workers: &str) -> serde_json::Value {
    let o = rmf(&["simulate", "--seeds", "12", "--x-max", "2e4", "--format", "json", "--workers", workers]);
    assert_eq!(code(&o), 0);
    let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let m = v.as_object_mut().unwrap();
    m.remove("wall_time_ms");
    m.remove("workers");
    m["config"].as_object_mut().unwrap().remove("workers");
    v
}

#[test]
fn one_and_eight_workers_agree() {
    let a = numeric_payload("1");
    let b = numeric_payload("8");
    let rows = |v: &serde_json::Value| v["table"]["rows"].as_array().unwrap().clone();
    for (ra, rb) in rows(&a).iter().zip(rows(&b).iter()) {
        for (x, y) in ra.as_array().unwrap().iter().zip(rb.as_array().unwrap()) {
            let (x, y) = (x.as_str().unwrap(), y.as_str().unwrap());
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(p), Ok(q)) => assert!((p - q).abs() <= 1e-12 * (1.0 + p.abs()), "{x} vs {y}"),
                _ => assert_eq!(x, y),
            }
        }
    }
    assert_eq!(a, b);
}
