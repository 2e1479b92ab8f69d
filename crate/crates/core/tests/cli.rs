use std::path::PathBuf;
use std::process::{Command, Output};

fn finsler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    finsler(args).status.code().expect("exit code")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("finsler-cli-{}-{name}", std::process::id()))
}

/// `(a, u, v)` columns of a profile CSV.
fn profile_rows(text: &str) -> Vec<[f64; 3]> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z,a,u,v"));
    lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|v| v.parse().unwrap()).collect();
            [f[1], f[2], f[3]]
        })
        .collect()
}

#[test]
fn extract_scaled_funk() {
    let out = scratch("uv.csv");
    let args = ["extract", "--metric", "funk", "--scale", "0.5", "--k", "-1", "--z", "0.05:0.8:50"];
    let o = finsler(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = profile_rows(&std::fs::read_to_string(&out).unwrap());
    std::fs::remove_file(&out).ok();
    assert_eq!(rows.len(), 50);
    for [a, u, v] in rows {
        assert!((u - (1.0 + 4.0 * a * a).sqrt()).abs() <= 1e-6);
        // The forward metric carries v = +3a/(1+4a^2).
        assert!((v - 3.0 * a / (1.0 + 4.0 * a * a)).abs() <= 1e-6);
    }
}

#[test]
fn extract_reversed_funk_matches_closed_forms() {
    let o = finsler(&["extract", "--metric", "funk-reversed", "--scale", "0.5", "--k", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    for [a, u, v] in profile_rows(&String::from_utf8(o.stdout).unwrap()) {
        assert!((u - (1.0 + 4.0 * a * a).sqrt()).abs() <= 1e-6);
        assert!((v + 3.0 * a / (1.0 + 4.0 * a * a)).abs() <= 1e-6);
    }
}

#[test]
fn extract_euclid_has_unit_u() {
    let o = finsler(&["extract", "--metric", "euclid", "--k", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = profile_rows(&String::from_utf8(o.stdout).unwrap());
    assert!(rows.iter().all(|[_, u, v]| *u == 1.0 && v.abs() <= 1e-10));
}

#[test]
fn extract_expression_metric() {
    // The Klein sphere written out, with an unbounded domain.
    let o = finsler(&["extract", "--metric", "sqrt(1+2*t-s^2)/(1+2*t)", "--mu", "1e6", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = profile_rows(&String::from_utf8(o.stdout).unwrap());
    assert!(rows.iter().all(|[_, _, v]| v.abs() <= 1e-6));
}

#[test]
fn unscaled_funk_is_a_case_mismatch() {
    let o = finsler(&["extract", "--metric", "funk", "--scale", "1", "--k", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("case mismatch"));
}

#[test]
fn non_constant_curvature_exits_two() {
    let o = finsler(&["extract", "--metric", "1+s^2/5+t/3", "--k", "1", "--z", "0.05:0.5:10"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_normal_forms() {
    assert_eq!(code(&["verify", "--case", "k0", "--u", "1", "--v", "0"]), 0);
    let o = finsler(&["verify", "--case", "k1", "--u", "1+a^2/2", "--v", "a/(1+a^2)", "--points", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().count(), 51);
    let o = finsler(&["verify", "--case", "k-1", "--u", "-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("must be positive"));
}

#[test]
fn verify_reports_tolerance_failure() {
    assert_eq!(code(&["verify", "--case", "k1", "--u", "1+a^2/2", "--v", "a", "--tol", "1e-30"]), 2);
}

#[test]
fn verify_metric_residuals() {
    assert_eq!(code(&["verify", "--metric", "klein-sphere", "--points", "10"]), 0);
}

#[test]
fn funk_demo_exit_codes() {
    // The forward metric fails only the v bound.
    let o = finsler(&["funk-demo"]);
    assert_eq!(o.status.code(), Some(2));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.lines().any(|l| l.starts_with("max |u") && l.ends_with("ok")));
    assert!(table.lines().any(|l| l.starts_with("max |v") && l.ends_with("FAIL")));
    assert_eq!(code(&["funk-demo", "--reversed"]), 0);
    assert_eq!(code(&["funk-demo", "--reversed", "--mode", "fd"]), 0);
    assert_eq!(code(&["funk-demo", "--z", "0.9:0.99:5"]), 1);
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(code(&["extract", "--metric", "sqrt(t", "--k", "1"]), 1);
    assert_eq!(code(&["extract", "--metric", "x+t", "--k", "1"]), 1);
    assert_eq!(code(&["extract", "--metric", "euclid"]), 1);
    assert_eq!(code(&["extract", "--metric", "euclid", "--k", "0", "--z", "0.5:0.1:10"]), 1);
    assert_eq!(code(&["extract", "--metric", "euclid", "--k", "2"]), 1);
    assert_eq!(code(&["verify", "--case", "k7"]), 1);
    assert_eq!(code(&["residuals", "--metric", "funk", "--tol", "-1"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn residual_csv_is_reproducible() {
    let args = ["residuals", "--metric", "funk", "--scale", "0.5", "--points", "20", "--seed", "9"];
    let (a, b) = (finsler(&args), finsler(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("# seed=9\npoint_id,x1,x2,psi,R1,R2,R3,K\n"));
    assert_ne!(text, String::from_utf8(finsler(&[&args[..6], &["--seed", "10"]].concat()).stdout).unwrap());
}
