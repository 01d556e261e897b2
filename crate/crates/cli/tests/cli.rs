use std::path::Path;
use std::process::{Command, Output};

use sadic::raster::Image;

fn sadic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sadic")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const TRI: &str = "periodic: a1 a2 a3";

#[test]
fn expand_brun_point() {
    let out = sadic(&["expand", "--point", "0.2,0.3", "--n", "5"]);
    assert_eq!(code(&out), 0);
    let digits = json(&out)["digits"].as_str().unwrap().to_string();
    assert_eq!(digits.len(), 5);
    assert!(digits.starts_with('1'));
    assert_eq!(digits, sadic::cf::brun_expand(sadic::cf::SimplexPoint::new(0.2, 0.3), 5).digit_string());
}

#[test]
fn expand_ar_vector() {
    let out = sadic(&["expand", "--ar", "0.7,0.2,0.1", "--n", "4"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["digits"], "11");
    assert!(r["stopped"].is_string());
}

#[test]
fn expand_rejects_points_outside_the_simplex() {
    assert_eq!(code(&sadic(&["expand", "--point", "0.5,0.3"])), 1);
}

#[test]
fn sampler_csv_is_reproducible() {
    let a = sadic(&["expand", "--samples", "50", "--seed", "9"]);
    let b = sadic(&["expand", "--samples", "50", "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 51);
    assert_eq!(code(&sadic(&["expand", "--samples", "50"])), 1);
}

#[test]
fn negative_strong_witness_roundtrips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let out = sadic(&["coincidence", "--seq", TRI, "--kind", "negative-strong", "--out", w.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let wit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(wit["index"], 1);
    assert_eq!(wit["kind"], "negative_strong");

    let v = sadic(&["verify", "--witness", w.to_str().unwrap()]);
    assert_eq!(code(&v), 0);
    assert_eq!(json(&v)["valid"], true);
}

#[test]
fn every_witness_kind_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["strong", "negative-strong", "geometric", "finiteness"] {
        let w = dir.path().join(format!("{kind}.json"));
        let out = sadic(&["coincidence", "--seq", TRI, "--kind", kind, "--out", w.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{kind}");
        let v = sadic(&["verify", "--witness", w.to_str().unwrap()]);
        assert_eq!(code(&v), 0, "{kind}");
    }
}

#[test]
fn tampered_witness_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    sadic(&["coincidence", "--seq", TRI, "--kind", "strong", "--out", w.to_str().unwrap()]);
    let mut wit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    wit["detail"]["pairs"][0]["w1"] = "3".into();
    std::fs::write(&w, wit.to_string()).unwrap();
    assert_eq!(code(&sadic(&["verify", "--witness", w.to_str().unwrap()])), 2);
}

#[test]
fn absent_coincidence_exits_2() {
    // A single Brun term never reaches a coincidence in one step.
    let out = sadic(&["coincidence", "--seq", "b1", "--kind", "strong", "--max-l", "1"]);
    assert_eq!(code(&out), 2);
    assert!(json(&out).is_null());
}

#[test]
fn lyapunov_zero_trials_is_a_usage_error() {
    let out = sadic(&["lyapunov", "--trials", "0", "--seed", "1"]);
    assert_eq!(code(&out), 1);
    assert!(!out.stderr.is_empty());
}

#[test]
fn lyapunov_requires_a_seed() {
    assert_eq!(code(&sadic(&["lyapunov", "--trials", "3"])), 1);
}

#[test]
fn lyapunov_reports_are_reproducible() {
    let args = ["lyapunov", "--sampler", "ar", "--steps", "2000", "--trials", "3", "--seed", "5", "--burn-in", "50"];
    let a = sadic(&args);
    let b = sadic(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert!(r["theta1"]["mean"].as_f64().unwrap() > 0.0);
    assert!(r["theta2"]["mean"].as_f64().unwrap() < 0.0);
}

#[test]
fn identity_cocycle_is_not_pisot() {
    let out = sadic(&["lyapunov", "--sampler", "identity", "--steps", "100", "--trials", "2", "--seed", "1"]);
    assert_eq!(code(&out), 2);
}

fn render(dir: &Path, name: &str, min_len: &str) -> Vec<u8> {
    let p = dir.join(name);
    let out = sadic(&["render", "--seq", TRI, "--min-len", min_len, "--out", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(p).unwrap()
}

#[test]
fn render_colours_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = render(dir.path(), "a.ppm", "100000");
    let b = render(dir.path(), "b.ppm", "100000");
    assert_eq!(a, b);
    let img = Image::from_ppm(&a).unwrap();
    assert_eq!((img.width, img.height), (800, 800));
    assert!(img.color_counts().len() >= 3);
}

#[test]
fn render_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let img = Image::from_ppm(&render(dir.path(), "one.ppm", "1")).unwrap();
    assert!(img.color_counts().values().sum::<usize>() <= 1);
}

#[test]
fn code_report_and_orbit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let orbit = dir.path().join("orbit.csv");
    let out = sadic(&[
        "code", "--seq", TRI, "--horizon", "200", "--cloud-len", "20000", "--orbit-out",
        orbit.to_str().unwrap(), "--orbit-steps", "50",
    ]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["N"], 200);
    assert_eq!(r["mismatched"], 0);
    let csv = std::fs::read_to_string(orbit).unwrap();
    assert_eq!(csv.lines().next(), Some("n,x1,x2,x3,letter"));
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn stats_report() {
    let out = sadic(&[
        "stats", "--seq", TRI, "--min-len", "5000", "--samples", "500", "--seed", "2", "--n-max", "4",
    ]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    let f: f64 = r["frequency"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((f - 1.0).abs() < 1e-12);
    assert!(r["discrepancy"].as_array().unwrap().iter().all(|x| x.as_f64().unwrap() < 2.0));
    assert_eq!(r["covering"]["samples"], 500);
    assert_eq!(r["price"]["primitivity_window"], 3);
    assert_eq!(code(&sadic(&["stats", "--seq", TRI, "--samples", "10"])), 1);
}

#[test]
fn bad_spec_and_unknown_subcommand_exit_1() {
    assert_eq!(code(&sadic(&["stats", "--seq", "q7"])), 1);
    assert_eq!(code(&sadic(&["frobnicate"])), 1);
    assert_eq!(code(&sadic(&["--help"])), 0);
}
