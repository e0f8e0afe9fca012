use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use rootgas::eigen::EigenfunctionEval;
use rootgas::{bethe, CartanKind, Multiplicity, RootSystem, WeylGroup};
use serde_json::Value;
use tempfile::TempDir;

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn rootgas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rootgas")).args(args).output().unwrap()
}

fn run_config(sub: &str, body: &str, extra: &[&str]) -> Output {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "job.json", body);
    let mut args = vec![sub, "--config", cfg.to_str().unwrap()];
    args.extend_from_slice(extra);
    rootgas(&args)
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Data rows of a CSV with `#` metadata lines and a header.
fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn a1_bisection(k: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 2.0 * PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid + 4.0 * (mid / k).atan() > 2.0 * PI {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

const A1: &str = r#"{"system":{"type":"A","rank":1},"multiplicity":{"long":2.0},"weight":[1]}"#;

#[test]
fn solve_a1_reports_certified_point() {
    let o = run_config("solve", A1, &[]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let p = v["mu_hat"]["pairings"][0].as_f64().unwrap();
    assert!((p - a1_bisection(2.0)).abs() < 1e-10);
    assert!((p - 2.6131).abs() < 1e-3);
    assert_eq!(v["regular"], Value::Bool(true));
    assert_eq!(v["pauli"]["excluded"], Value::Bool(false));
    assert!(v["gap_bounds"].as_array().unwrap().len() == 1);
}

#[test]
fn solve_wall_weight_exits_excluded() {
    let o = run_config("solve", r#"{"system":{"type":"A","rank":2},"multiplicity":{"long":1.0},"weight":[1,0]}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    let v = stdout_json(&o);
    assert_eq!(v["regular"], Value::Bool(false));
    assert!(v["pauli"]["min_eig_k"].as_f64().unwrap() > 0.0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Pauli principle"));
}

#[test]
fn solve_zero_weight_is_zero_and_excluded() {
    let o = run_config("solve", r#"{"system":{"type":"A","rank":1},"multiplicity":{"long":2.0},"weight":[0]}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout_json(&o)["mu_hat"]["coordinates"][0].as_f64(), Some(0.0));
}

#[test]
fn solve_is_deterministic() {
    let body = r#"{"system":{"type":"B","rank":3},"multiplicity":{"long":1.5,"short":0.4},"weight":[1,2,1]}"#;
    let a = run_config("solve", body, &[]);
    let b = run_config("solve", body, &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invalid_configs_exit_one() {
    for body in [
        r#"{"system":{"type":"A","rank":1},"multiplicity":{"long":-1.0},"weight":[1]}"#,
        r#"{"system":{"type":"Q","rank":1},"multiplicity":{"long":1.0},"weight":[1]}"#,
        r#"{"system":{"type":"A","rank":2},"multiplicity":{"long":1.0},"weight":[1]}"#,
        r#"{"system":{"type":"A","rank":1},"multiplicity":{"long":1.0},"weight":[1],"extra":1}"#,
        r#"{"system":{"type":"A","rank":1},"multiplicity":{"long":1.0},"weight":[1.5]}"#,
    ] {
        let o = run_config("solve", body, &[]);
        assert_eq!(o.status.code(), Some(1), "{body}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}

#[test]
fn eval_single_point_at_origin_is_one() {
    let o = run_config(
        "eval",
        r#"{"system":{"type":"A","rank":1},"multiplicity":{"long":2.0},"weight":[1],"grid":"0:0:1"}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("# lambda:") && text.contains("# energy:") && text.contains("x1,re_phi,im_phi"));
}

#[test]
fn eval_matches_library() {
    let o = run_config("eval", A1, &["--grid", "-1:1:11"]);
    assert_eq!(o.status.code(), Some(0));
    let rs = RootSystem::new(CartanKind::A, 1).unwrap();
    let wg = WeylGroup::new(&rs).unwrap();
    let k = Multiplicity::constant(2.0);
    let sol = bethe::solve(&rs, &wg, &k, &[1], &Default::default()).unwrap();
    let eig = EigenfunctionEval::from_solution(&rs, &wg, &k, &sol).unwrap();
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 11);
    for r in rows {
        let x: f64 = r[0].parse().unwrap();
        let z = eig.eval(&rs, &[x]).unwrap();
        assert_eq!(r[1].parse::<f64>().unwrap(), z.re);
        assert_eq!(r[2].parse::<f64>().unwrap(), z.im);
    }
}

#[test]
fn eval_is_periodic_under_coroot_translations() {
    let body = r#"{"system":{"type":"A","rank":2},"multiplicity":{"long":1.0},"weight":[1,1]}"#;
    let rs = RootSystem::new(CartanKind::A, 2).unwrap();
    let g: Vec<f64> = (0..2).map(|i| rs.coroots[0][i] + 2.0 * rs.coroots[1][i]).collect();
    let base = run_config("eval", body, &["--grid", "-0.5:0.5:4,-0.3:0.4:3"]);
    let shifted_grid = format!(
        "{}:{}:4,{}:{}:3",
        -0.5 + g[0],
        0.5 + g[0],
        -0.3 + g[1],
        0.4 + g[1]
    );
    let shifted = run_config("eval", body, &["--grid", &shifted_grid]);
    let (a, b) = (csv_rows(&base), csv_rows(&shifted));
    assert_eq!(a.len(), 12);
    for (ra, rb) in a.iter().zip(&b) {
        for c in 2..4 {
            let (x, y): (f64, f64) = (ra[c].parse().unwrap(), rb[c].parse().unwrap());
            assert!((x - y).abs() < 1e-12, "{x} {y}");
        }
    }
}

#[test]
fn eval_excluded_and_impenetrable_modes() {
    let o = run_config("eval", r#"{"system":{"type":"A","rank":2},"multiplicity":{"long":1.0},"weight":[1,0],"grid":"0:0:1,0:0:1"}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let o = run_config("eval", r#"{"system":{"type":"A","rank":1},"weight":[1],"mode":"impenetrable","grid":"0:0:1"}"#, &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&o)[0][1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn eval_writes_out_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "a1.json", A1);
    let out = dir.path().join("phi.csv");
    let o = rootgas(&["eval", "--config", cfg.to_str().unwrap(), "--grid", "0:0.5:3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn verify_free_and_default_suites_pass() {
    let o = run_config("verify", r#"{"system":{"type":"A","rank":2},"multiplicity":{"long":0.0},"weight":[1,2]}"#, &[]);
    let v = stdout_json(&o);
    assert_eq!(o.status.code(), Some(0), "{v:#}");
    assert_eq!(v["all_pass"], Value::Bool(true));

    let o = rootgas(&["verify", "--seed", "7"]);
    let v = stdout_json(&o);
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["system"].as_str().unwrap()).collect();
    assert_eq!(names, ["A2", "B2"]);
    for s in v["suites"].as_array().unwrap() {
        for c in s["checks"].as_array().unwrap() {
            assert_eq!(c["pass"], Value::Bool(true), "{c}");
        }
    }
}

#[test]
fn verify_perturbed_lambda_fails_detector() {
    let body = r#"{"system":{"type":"A","rank":2},"multiplicity":{"long":1.0},"weight":[1,1],
        "verify":{"perturb_lambda":0.1,"only":["bae_detector","bae_residual"]}}"#;
    let o = run_config("verify", body, &[]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    let checks = v["suites"][0]["checks"].as_array().unwrap();
    let det = checks.iter().find(|c| c["name"] == "bae_detector").unwrap();
    assert_eq!(det["pass"], Value::Bool(false));
    assert!(det["max_deviation"].as_f64().unwrap() > 1e-3);
    let res = checks.iter().find(|c| c["name"] == "bae_residual").unwrap();
    assert_eq!(res["pass"], Value::Bool(true));
}

#[test]
fn sweep_k_pairings_increase_to_two_pi() {
    let o = run_config(
        "sweep",
        r#"{"system":{"type":"A","rank":1},"weight":[1],"sweep":{"k":[1,10,100,10000]}}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let p: Vec<f64> = csv_rows(&o).iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(p.len(), 4);
    assert!(p.windows(2).all(|w| w[0] < w[1]));
    assert!(p[3] < 2.0 * PI && 2.0 * PI - p[3] < 1e-2);
    for (k, got) in [1.0, 10.0, 100.0, 1e4].iter().zip(&p) {
        assert!((got - a1_bisection(*k)).abs() < 1e-9);
    }
}

#[test]
fn sweep_weight_box_is_injective() {
    let o = run_config(
        "sweep",
        r#"{"system":{"type":"A","rank":2},"multiplicity":{"long":1.5},"sweep":{"box":{"lo":[0,0],"hi":[2,2]}}}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(text.contains("# injective: true"));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 9);
    let excluded = rows.iter().filter(|r| r.last().unwrap() == "excluded").count();
    assert_eq!(excluded, 5);
}

#[test]
fn empty_sweep_is_header_only() {
    let o = run_config("sweep", r#"{"system":{"type":"A","rank":1},"weight":[1],"sweep":{"k":[]}}"#, &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(csv_rows(&o).is_empty());
    assert!(String::from_utf8(o.stdout).unwrap().contains("k_long,k_short,m1,pairing1"));
}

#[test]
fn info_reports_weyl_order() {
    let o = run_config("info", r#"{"system":{"type":"F","rank":4}}"#, &[]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["weyl_order"].as_u64(), Some(1152));
    assert_eq!(v["num_positive"].as_u64(), Some(24));
    assert_eq!(v["highest_root"], serde_json::json!([2, 3, 4, 2]));
}
