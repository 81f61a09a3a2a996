use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectral-cesaro"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn verify_pass_prints_summary() {
    let o = run(&["verify", "heat-two-path", "--t", "0.1", "--tol", "1e-10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["experiment"], "heat-two-path");
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["probes"].as_array().unwrap().len(), 50);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&run(&["verify", "no-such-experiment"])), 64);
    assert_eq!(code(&run(&["verify", "theta-sum", "--bogus", "1"])), 64);
    assert_eq!(code(&run(&["verify", "theta-sum", "--eps-grid", "1:0.1:3"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["kernel", "heat", "interval", "--t", "0.1", "--x", "4", "--y", "1"])), 1);
}

#[test]
fn io_errors_exit_74() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.cfg");
    assert_eq!(code(&run(&["verify", "theta-sum", "--config", missing.to_str().unwrap()])), 74);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    assert_eq!(code(&run(&["verify", "poisson-tail", "--out", out.to_str().unwrap()])), 74);
}

#[test]
fn failing_and_inconclusive_verdicts() {
    assert_eq!(code(&run(&["verify", "poisson-tail", "--min-slope", "50"])), 1);
    let o = run(&["verify", "offdiag-equivalence", "--x", "1", "--y", "1.01", "--lambda-grid", "1e2:1e4:12"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
}

fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn artifacts_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for exp in ["theta-sum", "cylinder-two-path", "wightman-closed-form", "cylinder-locality"] {
        let a = dir.path().join(format!("{exp}-a"));
        let b = dir.path().join(format!("{exp}-b"));
        for d in [&a, &b] {
            run(&["verify", exp, "--out", d.to_str().unwrap()]);
        }
        let (ca, cb) = (csvs(&a), csvs(&b));
        assert!(!ca.is_empty(), "{exp}");
        assert_eq!(ca, cb, "{exp}");
        assert!(a.join(format!("{exp}.json")).exists());
    }
    let header = fs::read_to_string(dir.path().join("cylinder-two-path-a/cylinder-two-path.csv")).unwrap();
    assert!(header.starts_with("t,x,y,re,im,method,truncation\n"));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("poisson.cfg");
    fs::write(&cfg, "# wider grid\nx_grid = 0.05:0.5:8\nmin-slope = 6\n").unwrap();
    let o = run(&["verify", "poisson-tail", "--config", cfg.to_str().unwrap(), "--width", "0.08"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let out = dir.path().join("late");
    let o = run(&["verify", "poisson-tail", "--width", "0.08", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("poisson-tail.json").exists());
    assert_eq!(code(&run(&["verify", "poisson-tail", "--out"])), 64);
}

#[test]
fn kernel_riesz_density_and_list() {
    let o = run(&["kernel", "cylinder", "line", "--t", "1", "--x", "0.5", "--y", "0.5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y,re,im,method,truncation"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[5], "closed_form");
    assert!((row[3].parse::<f64>().unwrap() - 1.0 / std::f64::consts::PI).abs() < 1e-16);

    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.csv");
    fs::write(&m, "lambda,weight_re,weight_im\n1,1,0\n4,2,0\n").unwrap();
    let o = run(&["riesz", "--measure", m.to_str().unwrap(), "--order", "1", "--lambda", "8"]);
    assert_eq!(code(&o), 0);
    // (1 − 1/8) + 2(1 − 4/8) = 1.875
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "lambda,value\n8,1.875\n");

    let o = run(&["density", "free-line", "--x", "1", "--y", "0", "--lambda", "1:100:3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 4);
    assert_eq!(code(&run(&["density", "nonsense", "--lambda", "1"])), 64);

    let o = run(&["list"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 11);
}
