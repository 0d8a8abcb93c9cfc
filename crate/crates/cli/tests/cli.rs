//! End-to-end runs of the `uplink-access` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uplink-access")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, overrides: &[(&str, f64)]) -> String {
    let mut doc: serde_json::Map<String, Value> =
        serde_json::from_str(uplink_access_cli::parse::REFERENCE_CONFIG).unwrap();
    for (k, v) in overrides {
        doc.insert(k.to_string(), serde_json::json!(v));
    }
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    path.display().to_string()
}

/// Data rows of a CSV document, split into cells.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["analyze", "--sweep", "mu="][..],
        &["analyze", "--sweep", "bogus=1"],
        &["analyze", "--level", "femto", "--x-b", "0"],
        &["simulate", "--trials", "many"],
        &["bounds", "--level", "femto-avg"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn an_invalid_configuration_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", &[("gamma", 1.5)]);
    let o = run(&["validate", "--config", &cfg, "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&["analyze", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn without_femtocells_the_access_modes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "no_femto.json", &[("mu_per_km2", 0.0)]);
    let o = run(&["analyze", "--config", &cfg]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("param,value,level,outage_open,outage_closed,quad_error\n"));
    let r = &rows(&text)[0];
    let (open, closed): (f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
    assert!((open - closed).abs() < 1e-9, "{open} vs {closed}");
}

#[test]
fn analyze_sweeps_in_order() {
    let o = run(&["analyze", "--sweep", "lambda_per_km2=2,4,8"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 3);
    let closed: Vec<f64> = r.iter().map(|c| c[4].parse().unwrap()).collect();
    assert_eq!(r[1][1].parse::<f64>().unwrap(), 4.0);
    assert!(closed[0] < closed[1] && closed[1] < closed[2], "{closed:?}");
}

#[test]
fn simulate_is_deterministic_for_a_seed() {
    let args = ["simulate", "--trials", "2000", "--seed", "7", "--sweep", "R=25,50"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.starts_with("param,value,mode,p_hat,ci95,trials,seed\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 4);
    for c in &r {
        let p: f64 = c[3].parse().unwrap();
        let ci: f64 = c[4].parse().unwrap();
        let n: f64 = c[5].parse().unwrap();
        assert_eq!(n, 2000.0);
        assert_eq!(c[6], "7");
        assert!((ci - 1.96 * (p * (1.0 - p) / n).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn simulate_reports_a_drawn_seed() {
    let o = run(&["simulate", "--trials", "200", "--mode", "closed"]);
    assert!(o.status.success());
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    let seed: u64 = err.trim().strip_prefix("seed: ").expect("seed echoed").parse().unwrap();
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][6], seed.to_string());
}

#[test]
fn femto_bounds_over_a_radius_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bounds.json");
    let o = run(&[
        "bounds",
        "--level",
        "femto",
        "--x-b",
        "0,100",
        "--sweep",
        "R=25,50,75",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["param"], "R");
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for (entry, r_value) in reports.iter().zip([25.0, 50.0, 75.0]) {
        assert_eq!(entry["value"].as_f64(), Some(r_value));
        let r = &entry["report"];
        let f = |k: &str| r[k].as_f64().unwrap_or_else(|| panic!("{k} in {r}"));
        assert!(f("v_min") <= f("v_max"));
        assert!(f("r_min") <= f("r_max"));
        assert!(r["rho_star2_min"]["value"].as_f64() <= r["rho_star2_max"]["value"].as_f64());
        assert!(r.get("rho_star2_exact").is_none());
    }
}

#[test]
fn macro_bounds_with_the_exact_break_even_point() {
    let o = run(&["bounds", "--exact", "--rel-tol", "1e-5"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &doc["reports"][0]["report"];
    let (lo, hi, exact) =
        (r["rho_star_min"].as_f64().unwrap(), r["rho_star_max"].as_f64().unwrap(), r["rho_star_exact"].as_f64().unwrap());
    assert!(lo <= exact && exact <= hi, "{lo} ≤ {exact} ≤ {hi}");
}
