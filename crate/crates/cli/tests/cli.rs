use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use tempfile::TempDir;

fn aot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aot")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn standard(dir: &TempDir, name: &str, eps: f64) -> PathBuf {
    write(
        dir,
        name,
        &format!(r#"{{"d":1,"T":2,"atoms":[{{"path":[[{eps}],[1]],"weight":0.5}},{{"path":[[{}],[-1]],"weight":0.5}}]}}"#, -eps),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn aw_on_standard_example() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (standard(&dir, "a.json", 0.0), standard(&dir, "b.json", 0.5));
    let v = stdout_json(&aot(&["dist", "aw", s(&a), s(&b), "--p", "1"]));
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    let v = stdout_json(&aot(&["dist", "aw", s(&a), s(&b), "--p", "2"]));
    assert!((v["value"].as_f64().unwrap() - 2.25f64.sqrt()).abs() < 1e-12);
    let v = stdout_json(&aot(&["dist", "w", s(&a), s(&b), "--p", "2"]));
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let v = stdout_json(&aot(&["dist", "av", s(&a), s(&b)]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn tv_of_identical_is_zero() {
    let dir = TempDir::new().unwrap();
    let a = standard(&dir, "a.json", 0.3);
    assert_eq!(stdout_json(&aot(&["dist", "tv", s(&a), s(&a)]))["value"].as_f64(), Some(0.0));
    let out = aot(&["dist", "tv", s(&a), s(&a), "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "distance,value\ntv,0.0000000000000000e0\n");
}

#[test]
fn exit_codes_and_prefixes() {
    let dir = TempDir::new().unwrap();
    let a = standard(&dir, "a.json", 0.0);
    let short = write(&dir, "short.json", r#"{"d":1,"T":2,"atoms":[{"path":[[0],[1]],"weight":0.4}]}"#);
    let broken = write(&dir, "broken.json", r#"{"d":1,"T":2,"atoms":[{"path":[[0],[1]]}]}"#);
    let flat = write(&dir, "flat.json", r#"{"d":1,"T":1,"atoms":[{"path":[[0]],"weight":1}]}"#);

    let out = aot(&["dist", "tv", s(&short), s(&a)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("weight error:"), "{}", stderr(&out));

    let out = aot(&["dist", "tv", s(&broken), s(&a)]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.starts_with("parse error:") && msg.contains("weight") && msg.contains("column"), "{msg}");

    let out = aot(&["dist", "aw", s(&flat), s(&a)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("dimension error:"), "{}", stderr(&out));

    let out = aot(&["dist", "aw", s(&a), s(&a), "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("parameter error:"));

    let out = aot(&["smooth-dist", "w", s(&a), s(&a), "--sigma", "1", "--grid-step", "1e-4", "--radius-mult", "50"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("size error:"), "{}", stderr(&out));

    assert_eq!(aot(&["dist", "nope", s(&a), s(&a)]).status.code(), Some(1));
    assert_eq!(aot(&["--help"]).status.code(), Some(0));
}

/// `AW^{(σ)}_1` for the standard example by midpoint sums: the first-step
/// `W_1` plus the integrated mismatch of the second-step kernels.
fn standard_smooth_aw1(eps: f64, sigma: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).unwrap();
    let (lo, hi, k) = (-14.0 * sigma - eps, 14.0 * sigma + eps, 400_000);
    let dx = (hi - lo) / k as f64;
    let mut first = 0.0;
    let mut second = 0.0;
    for i in 0..k {
        let x = lo + (i as f64 + 0.5) * dx;
        let mix = 0.5 * (n.cdf((x - eps) / sigma) + n.cdf((x + eps) / sigma));
        first += (n.cdf(x / sigma) - mix).abs() * dx;
        let dens = 0.5 * (n.pdf((x - eps) / sigma) + n.pdf((x + eps) / sigma)) / sigma;
        let a = 1.0 / (1.0 + (-2.0 * eps * x / (sigma * sigma)).exp());
        second += 2.0 * (a - 0.5).abs() * dens * dx;
    }
    first + second
}

#[test]
fn example_matches_quadrature_oracle() {
    let v = stdout_json(&aot(&["example", "standard", "--eps", "0.1", "--sigma", "1", "--p", "1"]));
    let got = v["value"].as_f64().unwrap();
    let want = standard_smooth_aw1(0.1, 1.0);
    assert!((got - want).abs() < 1e-7, "{got} vs {want}");
    assert!((v["aw"].as_f64().unwrap() - 1.1).abs() < 1e-12);
}

#[test]
fn measure_outputs_round_trip() {
    let dir = TempDir::new().unwrap();
    let a = write(
        &dir,
        "a.json",
        r#"{"d":1,"T":2,"atoms":[{"path":[[0.3],[2.5]],"weight":0.25},{"path":[[-1.2],[0.1]],"weight":0.75}]}"#,
    );
    let clipped = dir.path().join("c.json");
    assert!(aot(&["clip", s(&a), "--r", "1", "--out", s(&clipped)]).status.success());
    let sampled = dir.path().join("s.json");
    assert!(aot(&["sample", s(&clipped), "--n", "40", "--seed", "9", "--out", s(&sampled)]).status.success());
    let quant = dir.path().join("q.json");
    assert!(aot(&["quantize", s(&sampled), "--h", "0.5", "--out", s(&quant)]).status.success());
    let v = stdout_json(&aot(&["dist", "aw", s(&clipped), s(&quant)]));
    assert!(v["value"].as_f64().unwrap().is_finite());
    let c: Value = serde_json::from_str(&fs::read_to_string(&clipped).unwrap()).unwrap();
    assert_eq!(c["atoms"][0]["path"][1][0].as_f64(), Some(1.0));
    let q: Value = serde_json::from_str(&fs::read_to_string(&quant).unwrap()).unwrap();
    for atom in q["atoms"].as_array().unwrap() {
        for step in atom["path"].as_array().unwrap() {
            let x = step[0].as_f64().unwrap();
            assert_eq!((x * 2.0).round(), x * 2.0);
        }
    }
}

#[test]
fn modulus_and_h_iteration() {
    let dir = TempDir::new().unwrap();
    let b = standard(&dir, "b.json", 0.5);
    let v = stdout_json(&aot(&["modulus", s(&b), "--t", "1", "--delta", "0.1,0.5,3"]));
    let vals: Vec<f64> = v["samples"].as_array().unwrap().iter().map(|x| x["value"].as_f64().unwrap()).collect();
    for (got, want) in vals.iter().zip([0.2, 1.0, 2.0]) {
        assert!((got - want).abs() < 1e-9);
    }
    let v = stdout_json(&aot(&["h-iter", s(&b), "--sigma", "0.2"]));
    assert!((v["h"][1].as_f64().unwrap() - 0.4).abs() < 1e-9);
    assert_eq!(aot(&["modulus", s(&b), "--t", "5", "--delta", "1"]).status.code(), Some(1));
}

#[test]
fn smooth_distance_reports_budget() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (standard(&dir, "a.json", 0.0), standard(&dir, "b.json", 0.5));
    let v = stdout_json(&aot(&["smooth-dist", "w", s(&a), s(&b), "--sigma", "0.5", "--grid-fraction", "0.5", "--radius-mult", "3"]));
    let (val, budget) = (v["value"].as_f64().unwrap(), v["budget"].as_f64().unwrap());
    assert!(budget > 0.0);
    // convolution does not increase W_1
    assert!(val - budget <= 0.5 + 1e-9, "{val} - {budget}");
    let bump = stdout_json(&aot(&["smooth-dist", "aw", s(&a), s(&b), "--sigma", "0.5", "--noise", "bump", "--grid-fraction", "0.25"]));
    assert!(bump["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = aot(&["--threads", "2", "bounds", "run", "--suite", "core", "--seed", "3", "--out", s(&path)]);
        assert!(out.status.success(), "{}", stderr(&out));
        fs::read(&path).unwrap()
    };
    let first = run("r1.json");
    assert_eq!(first, run("r2.json"));
    let report: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(report["pass"], Value::Bool(true));
    assert!(report["summary"].as_array().unwrap().len() >= 4);

    let rates = |fmt: &str| aot(&["rates", "run", "--ns", "16,32,64", "--seeds", "2", "--seed", "1", "--format", fmt]).stdout;
    let csv = rates("csv");
    assert_eq!(csv, rates("csv"));
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("n,value\n16,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn unknown_suite_is_a_validation_error() {
    let out = aot(&["bounds", "run", "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("parameter error:"));
}
