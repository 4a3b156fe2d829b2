// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const TIM: &str = r#"{"system": {"N": 1.5, "M": [0.3, 0.4], "mu": [0.2, 0.1]}, "bath": {"tim": {"kappa": 1}},
    "time": {"t_max": 3, "n_points": 50}}"#;

const RESONANT: &str = r#"{"system": {"N": 1}, "bath": {"discrete": {"omega": 1, "modes": [{"frequency": 1, "coupling": 1}]}},
    "time": {"t_max": 4, "n_points": 200}, "ancilla": {}}"#;

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wigner-dilation")).args(args).current_dir(dir).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "tim.json", TIM);
    let out = bin(&["run", "tim.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("t,re_g,im_g,abs_g2,Gamma,"));
    assert_eq!(lines.count(), 50);
    assert!(stderr(&out).contains("markovian=true"));
}

#[test]
fn run_to_file_with_witness_report() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "res.json", RESONANT);
    let out = bin(&["run", "res.json", "-o", "res.csv", "--witness", "w.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let csv = fs::read_to_string(dir.path().join("res.csv")).unwrap();
    assert_eq!(csv.lines().count(), 201);
    let w: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
    assert_eq!(w["markovian"], false);
    assert_eq!(w["gamma_negative_intervals"].as_array().unwrap().len(), 1);
}

#[test]
fn output_section_selects_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = TIM.replace(
        r#""time""#,
        r#""output": {"path": "sel.csv", "columns": ["t", "Pi", "env_rate", "dI_SE_dt"]}, "time""#,
    );
    write(dir.path(), "sel.json", &cfg);
    let out = bin(&["run", "sel.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("sel.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,Pi,env_rate,dI_SE_dt");
}

#[test]
fn fig1_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = bin(&["fig1", "--N", "1"], dir.path());
    let b = bin(&["fig1", "--N", "1"], dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 301);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("4.0000000000000000e0,"), "{last}");
}

#[test]
fn check_prints_report_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "res.json", RESONANT);
    let out = bin(&["check", "res.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.contains("PASS  decomposition"));
    assert!(text.contains("INFO  env_rate without 1/4 factor"));
    assert!(text.contains("ancilla relations"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("missing.json", None, 2),
        ("malformed.json", Some("{\"system\": "), 2),
        ("unknown.json", Some(r#"{"system": {"N": 1}, "bath": {"ohmic": {}}, "time": {"t_max": 1}}"#), 2),
        ("columns.json", Some(&*TIM.replace(r#""time""#, r#""output": {"columns": ["nope"]}, "time""#)), 2),
        (
            "unphysical.json",
            Some(r#"{"system": {"N": 1, "M": 5}, "bath": {"tim": {"kappa": 1}}, "time": {"t_max": 1}}"#),
            3,
        ),
        (
            "short.json",
            Some(r#"{"system": {"N": 1}, "bath": {"tim": {"kappa": 1}}, "time": {"t_max": 1, "n_points": 2}}"#),
            3,
        ),
    ];
    for (name, text, code) in cases {
        if let Some(t) = text {
            write(dir.path(), name, t);
        }
        let out = bin(&["run", name], dir.path());
        assert_eq!(out.status.code(), Some(code), "{name}: {}", stderr(&out));
        assert!(stderr(&out).starts_with("error: "), "{name}");
    }
    let unknown = bin(&["run", "unknown.json"], dir.path());
    assert!(stderr(&unknown).contains("unknown bath type `ohmic`"));
    assert_eq!(bin(&["fig1", "--N", "-1"], dir.path()).status.code(), Some(2));
    assert_eq!(bin(&["bogus"], dir.path()).status.code(), Some(2));
}
