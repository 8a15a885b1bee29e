// SPDX-License-Identifier: Apache-2.0
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    p.to_str().unwrap().to_string()
}

fn netfuzz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netfuzz")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn external_config(dir: &Path, design: &str) -> String {
    let cmd = format!(
        "{} sim {design} --lib {} --stimulus {{stimulus}} --vcd {{vcd}}",
        env!("CARGO_BIN_EXE_netfuzz"),
        fixture("lib45.lib")
    );
    write(
        dir,
        "fuzz.toml",
        &format!(
            "[design]\nnetlist = \"{design}\"\ncommand = \"{cmd}\"\n[reference]\nnetlist = \"{}\"\n\
             [campaign]\nmax_iterations = 60\nseed = 3\ninitial_seeds = 4\n",
            fixture("or_tree.v")
        ),
    )
}

#[test]
fn external_simulator_agrees_with_the_reference() {
    let dir = tempfile::tempdir().unwrap();
    let mapped = dir.path().join("mapped.v");
    let o = netfuzz(&["map", &fixture("or_tree.v"), "--lib", &fixture("lib45.lib"), "--out", mapped.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cfg = external_config(dir.path(), mapped.to_str().unwrap());
    let out = dir.path().join("out");
    let o = netfuzz(&["fuzz", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&o);
    assert_eq!(summary["bugs"], 0);
    assert!(summary["executions"].as_u64().unwrap() >= 60);
}

#[test]
fn external_simulator_exposes_a_mutant() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("or_tree.v")).unwrap();
    let mutant = write(dir.path(), "mutant.v", &text.replacen("xor ", "xnor ", 1));
    let cfg = external_config(dir.path(), &mutant);
    let o = netfuzz(&["fuzz", "--config", &cfg, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&o)["bugs"].as_u64().unwrap() >= 1);
}

#[test]
fn stimulus_lines_drive_the_simulator() {
    let dir = tempfile::tempdir().unwrap();
    // seq_acc: rst, d[1], d[0] per line; first line is the reset cycle.
    let stim = write(dir.path(), "stim.txt", "100\n001\n001\n011\n");
    let o = netfuzz(&["sim", &fixture("seq_acc.v"), "--stimulus", &stim]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = json(&o);
    let frames: Vec<&str> = t["frames"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    // Outputs are sampled before each edge, so the register lags by a cycle.
    assert_eq!(frames, ["xx", "00", "01", "10"]);
}

#[test]
fn map_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o =
        netfuzz(&["map", &fixture("or_tree.v"), "--lib", &fixture("lib45.lib"), "--report", report.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("OR2X1"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["cells"]["OR2X1"]["count"], 8);
    assert_eq!(r["total_instances"], 11);
}

#[test]
fn exit_codes() {
    assert_eq!(netfuzz(&["lint", &fixture("listing1.v"), "--lib", &fixture("lib45.lib")]).status.code(), Some(0));
    assert_eq!(netfuzz(&["lint", &fixture("double_driver.v"), "--lib", &fixture("lib45.lib")]).status.code(), Some(1));
    assert_eq!(netfuzz(&["lint", "/nonexistent.v"]).status.code(), Some(2));
    let o = netfuzz(&["clima", "scan", "--lib", &fixture("lib45.lib")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["findings"], Value::Array(Vec::new()));
}

#[test]
fn inject_requires_distinct_function() {
    let o =
        netfuzz(&["clima", "inject", "--lib", &fixture("lib45.lib"), "--target", "AND2X1", "--donor-cell", "AND2X2"]);
    assert_eq!(o.status.code(), Some(2));
}
