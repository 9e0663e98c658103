use std::path::Path;
use std::process::{Command, Output};

use dirac_hardy_core::discretization::io::{write_field, Precision};
use dirac_hardy_core::{CartesianGrid, Field, C64};
use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-hardy"))
        .current_dir(dir)
        .env("DIRAC_HARDY_GRID_PROFILE", "coarse")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn algebra_check_passes_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["algebra-check", "--json"], dir.path());
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["passed"], true);
    assert_eq!(r["command"], "algebra-check");
}

#[test]
fn verify_gaussian_packet_has_positive_slack() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["verify", "--id", "hardy-dirac-final", "--field", "gaussian-packet", "--eps", "1", "--m", "0", "--json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert!(r["result"]["slack"].as_f64().unwrap() > 0.0);
    assert_eq!(r["config"]["grids"]["profile"], "coarse");
}

#[test]
fn sharpness_csv_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["sharpness", "--eps", "1", "--m", "0", "--deltas", "0.4,0.2,0.1,0.05", "--csv", "sweep.csv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("delta,ratio,lhs,rhs,slack,quad_err"));
    let ratios: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 4);
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
    for (d, r) in [0.4, 0.2, 0.1, 0.05].iter().zip(&ratios) {
        assert!((r - 1.0 / (1.0 + d * d)).abs() < 1e-8);
    }
}

#[test]
fn malformed_value_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--potential", "kind=coulomb nu=abc"], dir.path());
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`nu`"), "{err}");
}

#[test]
fn unknown_keys_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--potential", "kind=coulomb nu=0.5 bogus=1"], dir.path());
    assert_eq!(code(&o), 2);
    let o = run(&["verify", "--id", "hardy-dirac-final", "--field", "kind=gaussian-packet colour=red"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn bound_at_one_is_an_assertion_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--potential", "kind=remark14 c=0 eps=1"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn non_finite_input_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let grid = CartesianGrid::new(8.0, 16).unwrap();
    let mut f = Field::zeros(grid, 4).unwrap();
    f.component_mut(2)[17] = C64::new(f64::NAN, 0.0);
    let mut buf = Vec::new();
    write_field(&mut buf, &f, Precision::Complex128).unwrap();
    std::fs::write(dir.path().join("bad.dhf"), buf).unwrap();
    let o = run(&["solve", "--potential", "kind=coulomb nu=0.5", "--field", "kind=from-file file=bad.dhf"], dir.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec!["solve", "--potential", "kind=coulomb nu=0.5", "--seed", "7", "--max-terms", "200", "--out", out]
    };
    assert_eq!(code(&run(&args("a.json"), dir.path())), 0);
    assert_eq!(code(&run(&args("b.json"), dir.path())), 0);
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn profile_flag_overrides_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--id", "lem3", "--field", "kind=extremizer-family family=exp-lambda", "--json", "--profile", "fine"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let grids = &report(&o)["config"]["grids"];
    assert_eq!(grids["profile"], "fine");
    assert_eq!(grids["radial"]["m"], 4096);
}

#[test]
fn merge_fails_when_any_input_failed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["algebra-check", "--out", "ok.json"], dir.path())), 0);
    let failed = run(&["symmetry", "--potential", "kind=coulomb nu=0.5", "--tol", "0", "--out", "bad.json"], dir.path());
    assert_eq!(code(&failed), 1);
    assert_eq!(code(&run(&["report-merge", "ok.json", "ok.json"], dir.path())), 0);
    let merged = run(&["report-merge", "ok.json", "bad.json", "--json"], dir.path());
    assert_eq!(code(&merged), 1);
    assert_eq!(report(&merged)["passed"], false);
    let missing = run(&["report-merge", "ok.json", "nope.json"], dir.path());
    assert_eq!(code(&missing), 2);
}
