//! Runs the built binary on small scenarios.

use std::fs;
use std::process::{Command, Output};

fn boseprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boseprop"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn run_writes_series_report_and_state() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("series.csv");
    let report = dir.path().join("report.txt");
    let state = dir.path().join("state.bin");
    let out = boseprop(&[
        "--particles", "2", "--orbitals", "4", "--case", "b", "--method", "al1", "--t-end", "0.5",
        "--max-dt", "0.1", "--out", series.to_str().unwrap(), "--report", report.to_str().unwrap(),
        "--state-out", state.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(&series).unwrap();
    assert_eq!(csv.lines().next(), Some("t,x_mean,norm,energy,dt,d_k,matvecs_cumulative"));
    assert!(csv.lines().count() > 5);

    let text = fs::read_to_string(&report).unwrap();
    for key in ["method=al1", "case=b", "dimension=10", "matvecs_total=", "state_sha256="] {
        assert!(text.contains(key), "report lacks {key}:\n{text}");
    }
    assert_eq!(fs::metadata(&state).unwrap().len(), 8 + 16 * 10);

    let cmp = boseprop(&["compare", state.to_str().unwrap(), state.to_str().unwrap()]);
    assert!(cmp.status.success());
    let distance: f64 = String::from_utf8(cmp.stdout).unwrap().trim().parse().unwrap();
    assert_eq!(distance, 0.0);
}

#[test]
fn report_goes_to_stdout_by_default() {
    let out = boseprop(&["--particles", "1", "--orbitals", "3", "--case", "a", "--method", "rk4", "--dt", "0.01", "--t-end", "0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("method=rk4"));
    assert!(text.contains("matvecs_total=40"));
}

#[test]
fn invalid_input_fails() {
    let alc_on_driven = boseprop(&["--particles", "2", "--orbitals", "3", "--case", "b", "--method", "alc"]);
    assert!(!alc_on_driven.status.success());
    assert!(String::from_utf8_lossy(&alc_on_driven.stderr).contains("alc"));

    let unknown_flag = boseprop(&["--particles", "2", "--orbitals", "3", "--case", "a", "--method", "al1", "--bogus"]);
    assert!(!unknown_flag.status.success());

    let missing = boseprop(&["--particles", "2"]);
    assert!(!missing.status.success());

    let bad_case = boseprop(&["--particles", "2", "--orbitals", "3", "--case", "e", "--method", "al1"]);
    assert!(!bad_case.status.success());
}
