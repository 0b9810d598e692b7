//! Black-box tests of the `lukmv` binary: exit codes, report formats,
//! atomic output files, and determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lukmv"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lukmv-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn decide_sat_exit_zero() {
    let out = run(&["decide", "x + x = -1", "--lang", "pab"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("SAT"), "unexpected report: {text}");
    assert!(text.contains("x = -1/2"), "unexpected report: {text}");
}

#[test]
fn decide_unsat_exit_one() {
    let out = run(&["decide", "(x (*) x = 1) & (x = ~x)", "--lang", "mv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("UNSAT"));
}

#[test]
fn malformed_file_exit_two_with_location() {
    let dir = tmpdir("parse");
    let path = dir.join("bad.luk");
    fs::write(&path, "#lang mv\nx <= ~x\nx (+) = y\n").unwrap();
    let out = run(&["decide", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("3:"), "no line:col location in: {err}");
}

#[test]
fn signature_violation_exit_two() {
    let out = run(&["decide", "x (+) y = 1", "--lang", "pab"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("(+)"), "unexpected: {err}");
}

#[test]
fn unknown_lemma_exit_two() {
    let out = run(&["check-lemma", "no-such-lemma"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn split_cap_exit_three() {
    let out = run(&[
        "decide",
        r"((x /\ y) = -1) & (x < -1)",
        "--lang",
        "pab",
        "--split-cap",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn m_override_requires_acknowledgment() {
    let out = run(&["translate", "x + x = -1", "--lang", "pab", "--M", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "translate",
        "x + x = -1",
        "--lang",
        "pab",
        "--M",
        "2",
        "--unsafe-M",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn translate_then_decide_pipeline() {
    let dir = tmpdir("pipeline");
    let s_path = dir.join("s.luk");
    let out = run(&[
        "translate",
        "x + x = -1",
        "--lang",
        "pab",
        "--M",
        "2",
        "--unsafe-M",
        "--out",
        s_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(s_path.exists());
    assert!(!dir.join("s.tmp").exists(), "temp file left behind");
    let out = run(&["decide", s_path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "translated SAT input must stay SAT"
    );
}

#[test]
fn no_partial_output_on_unwritable_path() {
    let dir = tmpdir("atomic");
    let path = dir.join("missing-subdir").join("out.luk");
    let out = run(&[
        "translate",
        "x + x = -1",
        "--lang",
        "pab",
        "--M",
        "2",
        "--unsafe-M",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn structured_reports_are_byte_identical() {
    let args = [
        "check-lemma",
        "tau",
        "--count",
        "10",
        "--seed",
        "7",
        "--format",
        "structured",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(
        text.ends_with("verdict=ok\n"),
        "missing verdict line: {text}"
    );
}

#[test]
fn structured_decide_has_verdict_line() {
    let out = run(&[
        "decide",
        "x <= ~x",
        "--lang",
        "mv",
        "--format",
        "structured",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status=sat"));
    assert!(text.ends_with("verdict=sat\n"));
}

#[test]
fn luk_threads_env_is_honored() {
    let out = bin()
        .args(["check-lemma", "delta", "--count", "10"])
        .env("LUK_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
