use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn evcopula(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_evcopula"));
    cmd.args(args).env_remove("EVCOPULA_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("y.csv");
    ok(&evcopula(
        &["simulate", "--model", "asymlog", "--r", "6", "--theta", "0.6", "--phi", "0.3",
          "--n", "80", "--seed", "4", "--out", path(&sample)],
        &[],
    ));
    let text = fs::read_to_string(&sample).unwrap();
    assert_eq!(text.lines().next().unwrap(), "y1,y2,y3");
    assert_eq!(text.lines().count(), 81);

    let est = ok(&evcopula(
        &["estimate", "--input", path(&sample), "--step", "0.25", "--estimators", "cfg,ols,ht"],
        &[],
    ));
    let lines: Vec<&str> = est.lines().collect();
    assert_eq!(lines[0], "w1,w2,w3,estimator,value,variance");
    assert_eq!(lines.len(), 1 + 3);
    assert!(lines[3].contains(",hall-tajvidi,"));

    let full = ok(&evcopula(
        &["estimate", "--input", path(&sample), "--resolution", "4", "--estimators", "pickands",
          "--shape-correct"],
        &[],
    ));
    assert_eq!(full.lines().count(), 1 + 15);
}

#[test]
fn asymptotics_writes_weights_and_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let sigma = dir.path().join("sigma.csv");
    let out = ok(&evcopula(
        &["asymptotics", "--r", "3", "--step", "0.25", "--nodes", "512",
          "--sigma-out", path(&sigma)],
        &[],
    ));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "w1,w2,w3,lambda1,lambda2,lambda3,var_zeta,var_eta_opt");
    assert_eq!(lines.len(), 2);
    let s = fs::read_to_string(&sigma).unwrap();
    assert_eq!(s.lines().count(), 1 + 9);
    let diag: f64 = s.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((diag - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-3);
}

#[test]
fn bench_requires_seed() {
    let out = evcopula(&["bench", "--n", "20", "--reps", "2"], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn bench_reads_config_and_applies_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    fs::write(
        &config,
        r#"{"model":{"family":"symlog","r":2},"n_list":[40],"replications":3,
            "estimators":["cfg"],"step":0.1}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    ok(&evcopula(
        &["bench", "--config", path(&config), "--seed", "1", "--estimators", "cfg,d",
          "--n", "30,60", "--out", path(&out_dir)],
        &[],
    ));
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    // 2 sizes x 4 grid points x 2 estimators
    assert_eq!(summary.lines().count(), 1 + 16);
    assert!(summary.lines().nth(1).unwrap().starts_with("symlog:r=2;p=3,30,"));
    let script = fs::read_to_string(out_dir.join("plot.gp")).unwrap();
    assert!(script.contains("set multiplot layout 2,2"));
}

#[test]
fn bad_input_fails_cleanly() {
    let out = evcopula(&["estimate", "--input", "/nonexistent.csv"], &[]);
    assert!(!out.status.success());
    let out = evcopula(&["simulate", "--r", "0.5", "--n", "3", "--seed", "1"], &[]);
    assert!(!out.status.success());
}
