use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fbo2d::spectral::read_snapshot;

fn run(kind: &str, config: &str, out: &Path) -> Output {
    let cfg = out.with_extension("json");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_fbo2d"))
        .args([kind, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", "2"])
        .output()
        .unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let j = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(j).unwrap().parse().unwrap()).collect()
}

#[test]
fn simulate_writes_monotone_time_and_flat_mean() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let o = run("simulate", r#"{"nx": 64, "ny": 64, "alpha": 1.0, "T": 1.0, "snapshots": true}"#, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("simulate.csv")).unwrap();
    let t = column(&csv, "t");
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*t.last().unwrap(), 1.0);
    let mean = column(&csv, "mean");
    assert!(mean.iter().all(|m| (m - mean[0]).abs() <= 1e-10));

    let last = read_snapshot(out.join(format!("snapshot_{:04}.fbo2", t.len() - 1))).unwrap();
    assert_eq!(last.t, 1.0);
    assert_eq!(last.alpha, 1.0);
    assert_eq!((last.field.grid.nx, last.field.grid.ny), (64, 64));

    let sidecar: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("simulate.json")).unwrap()).unwrap();
    assert_eq!(sidecar["all_pass"], true);
    assert_eq!(sidecar["seed"], fbo2d::cli::DEFAULT_SEED);
    assert!(sidecar["timestamp"].is_string());
}

#[test]
fn identical_configs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"seed": 11, "draws": 50}"#;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("kato-ponce", cfg, &a).status.code(), Some(0));
    assert_eq!(run("kato-ponce", cfg, &b).status.code(), Some(0));
    let (x, y) = (fs::read(a.join("kato-ponce.csv")).unwrap(), fs::read(b.join("kato-ponce.csv")).unwrap());
    assert_eq!(x, y);
    let c = dir.path().join("c");
    run("kato-ponce", r#"{"seed": 12}"#, &c);
    assert_ne!(x, fs::read(c.join("kato-ponce.csv")).unwrap());
}

#[test]
fn inadmissible_eps_names_key_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("illposed", r#"{"alpha": 0.5, "eps": 0.4}"#, &dir.path().join("x"));
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`eps`") && err.contains("8/15 - 7*alpha/15"), "{err}");
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, cfg, key) in [
        ("illposed", "{}", "config"),
        ("illposed", "", "EOF"),
        ("simulate", r#"{"alpha": 1.5}"#, "`alpha`"),
        ("simulate", r#"{"nx": 48}"#, "`nx`"),
        ("decay", r#"{"T": 1.0}"#, "`T`"),
        ("simulate", r#"{"bogus": 1}"#, "`bogus`"),
        ("strichartz", r#"{"draws": 10}"#, "`draws`"),
        ("leibniz", r#"{"experiment": "simulate"}"#, "`experiment`"),
        ("oscillatory", r#"{"alpha": 0.25, "lambda_max": 1000}"#, "`lambda_max`"),
    ] {
        let o = run(kind, cfg, &dir.path().join("x"));
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(1), "{kind} {cfg}: {err}");
        assert!(err.contains(key), "{kind} {cfg}: {err}");
    }
}

#[test]
fn failed_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    // Pre-asymptotic ladder: the fitted exponent is far from the prediction.
    let o = run("illposed", r#"{"n_ladder": [2, 3, 4, 5, 6]}"#, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL slope"));
    let plot = fs::read_to_string(out.join("plot_growth.csv")).unwrap();
    assert!(plot.starts_with("logN,logF3Norm\n"));
    assert!(out.join("plot_growth_fit.json").exists());
}
