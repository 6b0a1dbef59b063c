use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn jumpspec(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jumpspec"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("JUMPSPEC_THREADS")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn records(dir: &Path) -> Vec<Value> {
    json(&dir.join("eigenvalues.json"))["records"].as_array().unwrap().clone()
}

#[test]
fn spectrum_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("third");
    assert!(jumpspec(&d, &["spectrum", "--a", "1/3", "--lambda-max", "40"]).status.success());
    let recs = records(&d);
    assert_eq!(recs.len(), 5);
    assert_eq!(recs.iter().filter(|r| r["alg_mult"] == 3).count(), 1);

    let d = tmp.path().join("root2");
    assert!(jumpspec(&d, &["spectrum", "--a", "sqrt(2)-1", "--lambda-max", "10"]).status.success());
    let recs = records(&d);
    assert_eq!(recs.len(), 3);
    assert!(recs.iter().all(|r| r["alg_mult"] == 1 && r["geom_mult"] == 1));

    let d = tmp.path().join("curves");
    assert!(jumpspec(&d, &["spectrum", "--curves", "--a-grid", "-0.95:0.95:0.01", "--m-max", "4"]).status.success());
    let csv = fs::read_to_string(d.join("curves.csv")).unwrap();
    let classes: std::collections::BTreeSet<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(classes.into_iter().collect::<Vec<_>>(), ["-1", "0", "1"]);
    // 191 grid values, 4 + 4 + 5 rows each
    assert_eq!(csv.lines().count(), 1 + 191 * 13);
    let manifest = json(&d.join("manifest.json"));
    assert_eq!(manifest["files"][0]["name"], "curves.csv");
    assert_eq!(manifest["command"], "spectrum");
}

#[test]
fn verify_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("gram");
    assert!(jumpspec(&d, &["verify", "--a", "1/3", "--suite", "gram"]).status.success());
    let rep = json(&d.join("verify.json"));
    assert_eq!(rep["passed"], true);
    assert!(rep["checks"].as_array().unwrap().iter().any(|c| c["name"].as_str().unwrap().contains("I3")));

    let d = tmp.path().join("metric");
    assert!(jumpspec(&d, &["verify", "--a", "1/3", "--suite", "metric"]).status.success());
    let rep = json(&d.join("verify.json"));
    assert!(rep["checks"].as_array().unwrap().iter().all(|c| c["informational"] == true));

    let d = tmp.path().join("all");
    let out = jumpspec(&d, &["verify", "--a", "sqrt(2)-1", "--suite", "all"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json(&d.join("verify.json"));
    assert!(rep["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn resolvent_of_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("r");
    assert!(jumpspec(&d, &["resolvent", "--a", "1/3", "--lambda", "-1,0", "--f", "const"]).status.success());
    let csv = fs::read_to_string(d.join("resolvent.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - 1.0).abs() < 1e-10 && v[2].abs() < 1e-10, "{line}");
    }
    let rep = json(&d.join("resolvent.json"));
    assert!(rep["pde_residual"].as_f64().unwrap() < 1e-6);

    let d = tmp.path().join("bump");
    assert!(jumpspec(&d, &["resolvent", "--a", "-2/7", "--lambda", "2.5,1", "--f", "bump:0.3,0.4", "--svd", "128"]).status.success());
    let rep = json(&d.join("resolvent.json"));
    assert!(rep["boundary_deviation"].as_f64().unwrap() < 1e-8);
    assert!(d.join("singular_values.csv").exists());
}

#[test]
fn metric_and_basis() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("m");
    assert!(jumpspec(&d, &["metric-check", "--a", "sqrt(2)-1", "--psi", "random", "--probes", "20"]).status.success());
    let rep = json(&d.join("metric.json"));
    assert!(rep["relative_residual"].as_f64().unwrap() < 1e-8);
    assert!(rep["positivity_min"].as_f64().unwrap() >= -1e-12);
    let seq = rep["rayleigh_sequence"].as_array().unwrap();
    assert_eq!(seq.len(), 8);
    assert!(seq.last().unwrap()["rayleigh"].as_f64().unwrap() < 1e-2);

    let d = tmp.path().join("b");
    assert!(jumpspec(&d, &["basis", "--a", "sqrt(2)-1", "--blowup", "--convergents", "8"]).status.success());
    let csv = fs::read_to_string(d.join("blowup.csv")).unwrap();
    let max = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!(max > 10.0, "{max}");
    assert!(d.join("projections.csv").exists());

    let d = tmp.path().join("rational");
    assert!(jumpspec(&d, &["basis", "--a", "2/5", "--m-max", "200"]).status.success());
    assert_eq!(json(&d.join("basis.json"))["rational_bounds"]["holds"], true);
}

#[test]
fn simulate_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["simulate", "--a", "0", "--paths", "4", "--horizon", "20", "--dt", "1e-3", "--seed", "7"];
    let (d1, d2) = (tmp.path().join("s1"), tmp.path().join("s2"));
    assert!(jumpspec(&d1, &args).status.success());
    assert!(jumpspec(&d2, &args).status.success());
    for f in ["sim.json", "histogram.csv"] {
        assert_eq!(fs::read(d1.join(f)).unwrap(), fs::read(d2.join(f)).unwrap(), "{f}");
    }
    let rep = json(&d1.join("sim.json"));
    assert!(rep["report"]["moment2"].as_f64().unwrap() > 0.3);
    let manifest = json(&d1.join("manifest.json"));
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["files"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes_and_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("x");
    assert_eq!(jumpspec(&d, &["spectrum", "--a", "3/2"]).status.code(), Some(2));
    assert_eq!(jumpspec(&d, &["spectrum", "--a", "sqrt("]).status.code(), Some(2));
    assert_eq!(jumpspec(&d, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(jumpspec(&d, &["resolvent", "--a", "1/3", "--lambda", "36,0"]).status.code(), Some(2));
    assert_eq!(jumpspec(&d, &["simulate", "--a", "0", "--dt", "0.1"]).status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_jumpspec"))
        .args(["--out"])
        .arg(&d)
        .args(["spectrum", "--a", "0"])
        .env("JUMPSPEC_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&d.join("manifest.json"))["threads"], 2);
    assert!(jumpspec(&d, &["--threads", "1", "spectrum", "--a", "0"]).status.success());
    assert_eq!(json(&d.join("manifest.json"))["threads"], 1);
    let bad = Command::new(env!("CARGO_BIN_EXE_jumpspec"))
        .args(["spectrum", "--a", "0"])
        .env("JUMPSPEC_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
