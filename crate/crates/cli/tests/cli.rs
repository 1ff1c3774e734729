//! End-to-end runs of the `gsek` binary: output formats and exit codes.

use std::process::{Command, Output};

use serde_json::Value;

fn gsek(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsek")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn eval_pointwise_s_of_constant() {
    let out = gsek(&["eval", "--quantity", "S", "--potential", "const:1", "--t", "0.5", "--x", "0", "--y", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["dim"], 1);
}

#[test]
fn eval_kernel_accepts_negative_coordinates() {
    let out = gsek(&["--dim", "2", "eval", "--quantity", "g", "--t", "1", "--x", "-1,0.5", "--y", "0,0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let g = json(&out)["value"].as_f64().unwrap();
    let exact = (-(1.25f64) / 4.0).exp() / (4.0 * std::f64::consts::PI);
    assert!((g - exact).abs() < 1e-12 * exact);
}

#[test]
fn csv_output_has_header_and_row() {
    let out = gsek(&["--format", "csv", "eval", "--quantity", "S", "--potential", "const:1", "--t", "2", "--x", "0", "--y", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().next().unwrap().contains("value"));
}

#[test]
fn bad_potential_is_a_usage_error() {
    let out = gsek(&["eval", "--quantity", "S", "--potential", "ball:oops", "--t", "1"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(gsek(&["eval", "--bogus"]).status.code(), Some(64));
}

#[test]
fn counterexample_small_n_passes() {
    let out = gsek(&["counterexample-d3", "--n", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["meta"]["suite"], "counterexample_d3");
}

#[test]
fn report_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("gsek-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let out = gsek(&["verify", "--suite", "lemD", "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    std::fs::remove_dir_all(&dir).ok();
}
