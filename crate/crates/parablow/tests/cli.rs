//! Black-box tests of the binary: output formats and the exit-code contract.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const FIXTURE_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn parablow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parablow"))
        .args(args)
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    format!("{FIXTURE_DIR}/{name}")
}

fn temp_config(body: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(body.as_bytes()).unwrap();
    file.flush().unwrap();
    file
}

#[test]
fn hj_prints_both_expansions() {
    let out = parablow(&["hj", "2/5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "e-: [3,2], e+: [2,3]\n"
    );

    let out = parablow(&["hj", "1/2"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "e-: [2], e+: [2]\n");
}

#[test]
fn hj_rejects_weights_outside_unit_interval() {
    for bad in ["5/3", "0/3", "3/3", "x", "1/0"] {
        let out = parablow(&["hj", bad]);
        assert_eq!(out.status.code(), Some(2), "hj {bad} must exit 2");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn verdict_exit_codes_follow_the_contract() {
    let out = parablow(&["verdict", "--config", &fixture("unstable_slope_third.toml")]);
    assert_eq!(out.status.code(), Some(10));

    let out = parablow(&["verdict", "--config", &fixture("polystable_pair.toml")]);
    assert_eq!(out.status.code(), Some(0));

    let bad = temp_config("deg_E = 0\n[[marked]]\nfiber = \"y\"\nweight = \"0/3\"\n");
    let out = parablow(&["verdict", "--config", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = parablow(&["verdict", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verdict_report_is_versioned_json() {
    let out = parablow(&["verdict", "--config", &fixture("polystable_pair.toml")]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["command"], "verdict");
    assert_eq!(report["verdict"]["kind"], "polystable_pair");
    assert_eq!(report["verdict"]["first"], "a");
    assert_eq!(report["verdict"]["second"], "b");
    assert_eq!(report["slopes"][0]["slope"], "0");
    assert!(report.get("timing").is_none());
    assert!(report.get("certificate").is_none());
}

#[test]
fn destabilizing_verdict_embeds_the_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = parablow(&[
        "verdict",
        "--config",
        &fixture("zero_slope_pair.toml"),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(10));
    assert!(out.stdout.is_empty(), "report must go to the file");

    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["verdict"]["kind"], "unstable_witness");
    let cert = &report["certificate"];
    assert_eq!(cert["section"], "s");
    assert_eq!(cert["slope"], "0");
    assert!(cert["futaki"].as_str().unwrap().starts_with('-'));
    assert!(cert["futaki_decimal"].as_str().unwrap().starts_with('-'));
    assert_eq!(cert["multi_fiber_additive"], true);
    assert_eq!(cert["positivity"]["pass"], true);
    assert_eq!(cert["cremona_steps"].as_array().unwrap().len(), 1);
    assert_eq!(cert["model"]["points"][0]["side"], "S+");
    // Every rational field is a p/q string, never a float.
    assert!(cert["donaldson_futaki"].is_string());
    assert!(cert["volume"].is_string());
}

#[test]
fn destabilize_command_handles_positive_slope() {
    let stable = temp_config(
        r#"
deg_E = 0
[[marked]]
fiber = "y1"
weight = "1/2"
[[section]]
id = "s"
self_int = 0
"#,
    );
    // Slope +1/2: the point sits off the section.
    let out = parablow(&["destabilize", "--config", stable.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("nothing to destabilize"));
}

#[test]
fn destabilize_command_produces_certificate() {
    let out = parablow(&[
        "destabilize",
        "--config",
        &fixture("unstable_slope_third.toml"),
        "--section",
        "s",
    ]);
    assert_eq!(out.status.code(), Some(10));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["command"], "destabilize");
    assert_eq!(report["certificate"]["slope"], "-1/3");
}

#[test]
fn multi_point_scan_requires_the_flag() {
    let gated = temp_config(
        r#"
deg_E = 0
[[marked]]
fiber = "y1"
weight = "1/2"
on_sections = ["s"]
[[marked]]
fiber = "y2"
weight = "1/2"
[[section]]
id = "s"
self_int = 0
"#,
    );
    let out = parablow(&["scan", "--config", gated.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("experimental multi-point flag"));

    // The same surface with the flag scans fine.
    let out = parablow(&[
        "scan",
        "--config",
        &fixture("zero_slope_pair.toml"),
        "--grid",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn scan_validates_flag_values() {
    let config = fixture("unstable_slope_third.toml");
    let out = parablow(&["scan", "--config", &config, "--tau-max", "3/2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = parablow(&["scan", "--config", &config, "--c-base=-5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = parablow(&["scan", "--config", &config, "--section", "ghost"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_csv_shape_and_env_thread_fallback() {
    let config = fixture("unstable_slope_third.toml");
    let out = parablow(&["scan", "--config", &config, "--grid", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "tau_minus,tau_plus,futaki,futaki_decimal,sign");
    assert_eq!(lines.len(), 1 + 9);
    // Row-major order with tau_minus outer; all values negative here.
    assert!(lines[1].starts_with("1/64,1/64,"));
    assert!(lines[2].starts_with("1/64,1/32,"));
    assert!(lines[4].starts_with("1/32,1/64,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",-1")));

    let env_run = Command::new(env!("CARGO_BIN_EXE_parablow"))
        .args(["scan", "--config", &config, "--grid", "3"])
        .env("PARABLOW_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(env_run.status.code(), Some(0));
    assert_eq!(env_run.stdout, csv.as_bytes());
}

#[test]
fn blowup_prints_chain_tables() {
    let config = temp_config(
        r#"
deg_E = 0
[[marked]]
fiber = "y1"
weight = "2/5"
"#,
    );
    let out = parablow(&["blowup", "--config", config.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("fiber y1: weight 2/5"));
    for needle in ["-3", "-2", "-1"] {
        assert!(text.contains(needle));
    }
    assert!(text.contains("left 2/5 vs alpha 2/5 [ok]"));
    assert!(text.contains("right 3/5 vs 1-alpha 3/5 [ok]"));

    let empty = temp_config("deg_E = 0\n[[section]]\nid = \"s\"\nself_int = 0\n");
    let out = parablow(&["blowup", "--config", empty.path().to_str().unwrap()]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "no blowups\n");
}

#[test]
fn slope_lists_every_section() {
    let out = parablow(&["slope", "--config", &fixture("polystable_pair.toml")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "a: 0 (0)\nb: 0 (0)\n");

    let out = parablow(&["slope", "--config", &fixture("unstable_slope_third.toml")]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "s: -1/3 (-0.333333333333)\n"
    );
}
