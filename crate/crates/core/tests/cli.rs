use std::path::Path;
use std::process::Command;

use orthoqkd::scenario::{parse_config, render, ScenarioConfig};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orthoqkd"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(
        dir.path(),
        "ok.json",
        r#"{"command":"run","protocol":"PP_GV","n":8,"seed":42}"#,
    );
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"command":"run","protocol":"PP_GV","n":8,"seed":42,"attack":{"kind":"symmetric_ng","lambda":1.3}}"#,
    );
    let out = dir.path().join("out");

    let s = bin()
        .arg("--config")
        .arg(&ok)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(0));
    assert!(out.join("run_PP_GV.json").exists() && out.join("run_PP_GV.csv").exists());
    assert_eq!(
        String::from_utf8_lossy(&s.stdout).lines().next().unwrap(),
        "run PP_GV n=8 runs=1 aborted=0 bit_errors=0"
    );

    let s = bin().arg("--config").arg(&bad).output().unwrap();
    assert_eq!(s.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&s.stderr).contains("attack.lambda"));

    let s = bin()
        .arg("--config")
        .arg(dir.path().join("missing.json"))
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(1));

    // the output path is a regular file, so the directory cannot be created
    let blocker = write(dir.path(), "blocker", "");
    let s = bin()
        .arg("--config")
        .arg(&ok)
        .arg("--out")
        .arg(blocker.join("x"))
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(2));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"command":"run","protocol":"CL","n":8,"seed":1}"#,
    );
    let out = dir.path().join("o");
    let s = bin()
        .args(["--format", "json", "--seed", "77", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(s.status.success());
    assert!(!out.join("run_CL.csv").exists());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out.join("run_CL.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["seed"], 77);
    assert_eq!(v["meta"]["seed"], "77");
}

#[test]
fn aborted_run_is_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"command":"run","protocol":"PP_GV","n":16,"seed":2,"attack":{"kind":"intercept_resend"}}"#,
    );
    let s = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(0));
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run_PP_GV.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["aborted"], true);
}

#[test]
fn full_sweep_has_forty_thousand_rows() {
    let c = parse_config(r#"{"command":"sweep","protocol":"DLL_GV","formats":["csv"]}"#).unwrap();
    let o = render(&c).unwrap();
    let text = &o.artifacts[0].contents;
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "theta,lambda,e,I_B,chi,flag");
    assert_eq!(body.len(), 40_001);
    for key in ["# seed=", "# config_sha256=", "# interpretation=ib="] {
        assert!(text.contains(key), "{key}");
    }
}

#[test]
fn threshold_report() {
    let c = parse_config(r#"{"command":"threshold","protocol":"PP_GV","formats":["json"],"resolution":100}"#)
        .unwrap();
    let o = render(&c).unwrap();
    let v: Value = serde_json::from_str(&o.artifacts[0].contents).unwrap();
    let e0 = v["result"]["e0"].as_f64().unwrap();
    assert!((e0 - 0.267).abs() < 0.01, "{e0}");
    assert_eq!(v["meta"]["config_sha256"].as_str().unwrap(), c.config_hash());
    assert!(v["meta"]["interpretation"].as_str().unwrap().starts_with("ib="));
}

#[test]
fn every_variant_is_reported() {
    let c = parse_config(
        r#"{"command":"threshold","protocol":"CL_GV","all_variants":true,"resolution":50,"formats":["csv"]}"#,
    )
    .unwrap();
    let o = render(&c).unwrap();
    let rows = o.artifacts[0]
        .contents
        .lines()
        .filter(|l| l.starts_with("CL_GV,"))
        .count();
    assert_eq!(rows, 12);
}

#[test]
fn config_round_trip() {
    let texts = [
        r#"{"command":"suites","seed":3}"#,
        r#"{"command":"threshold","interpretation":{"ib":"full_confusion","eve":"flagged"}}"#,
        r#"{"command":"run","protocol":"GV","n":8,"seed":1,"gv":{"travel":2,"tau":3,"period":10,"jitter_slots":4},
            "attack":{"kind":"timing_delay","dummy":"scheduled"},"mode":"qsdc"}"#,
    ];
    for t in texts {
        let c: ScenarioConfig = parse_config(t).unwrap();
        assert_eq!(parse_config(&c.to_json()).unwrap(), c);
    }
}
