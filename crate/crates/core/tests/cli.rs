use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_share-alloc")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const TRIANGLE: &str = r#"{
  "agents": 3,
  "resources": 2,
  "utilities": [[3, 1], [2, 2], [1, 3]],
  "allocation": [[0], [], [1]],
  "sharing_edges": [[0, 1], [1, 2]],
  "attention_arcs": "same_as_sharing_bidirected"
}"#;

#[test]
fn uwsa_yes_and_no() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "inst.json", TRIANGLE);
    let witness = dir.path().join("w.json");
    let yes =
        run(&["solve", "--problem", "uwsa", "--k", "6", "--instance", &inst, "--witness", witness.to_str().unwrap()]);
    assert_eq!(yes.status.code(), Some(0));
    let v = json(&yes);
    assert_eq!(v["answer"], "yes");
    assert!(Path::new(&witness).exists());

    let no = run(&["solve", "--problem", "uwsa", "--k", "100", "--instance", &inst]);
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(json(&no)["answer"], "no");
}

#[test]
fn witness_verifies() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "inst.json", TRIANGLE);
    let witness = dir.path().join("w.json");
    let w = witness.to_str().unwrap();
    let out = run(&["solve", "--problem", "ersa", "--k", "0", "--instance", &inst, "--witness", w]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], 0);
    let check = run(&["verify", "--instance", &inst, "--sharing", w]);
    assert_eq!(check.status.code(), Some(0));
    let v = json(&check);
    assert_eq!(v["valid"], true);
    assert_eq!(v["envious"], 0);
}

#[test]
fn invalid_sharing_is_reported() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "inst.json", TRIANGLE);
    let bad = write(&dir, "bad.json", r#"{"bound": 1, "assignments": [{"edge": [0, 2], "resource": 0}]}"#);
    let out = run(&["verify", "--instance", &inst, "--sharing", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["valid"], false);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "inst.json", TRIANGLE);
    assert_eq!(run(&["solve", "--problem", "ersa", "--k", "-1", "--instance", &inst]).status.code(), Some(2));
    let broken = write(&dir, "broken.json", "{\"agents\": 2,\n  \"resources\": }");
    let out = run(&["solve", "--problem", "ersa", "--k", "0", "--instance", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2:"));
    assert_eq!(run(&["solve", "--problem", "nope"]).status.code(), Some(2));
}

#[test]
fn gadget_round_trip() {
    let dir = TempDir::new().unwrap();
    let source = write(&dir, "src.json", r#"{"x": [1], "y": [1], "z": [1], "t": 3}"#);
    let inst = dir.path().join("gadget.json");
    let gen = run(&["gen", "--gadget", "n3dm", "--source", &source, "--out", inst.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0));
    let target = &json(&gen)["target"];
    assert_eq!(
        (target["problem"].as_str(), target["b"].as_u64(), target["k"].as_str()),
        (Some("ewsa"), Some(2), Some("39/1"))
    );
    let inst = inst.to_str().unwrap();
    let yes = run(&["solve", "--problem", "ewsa", "--b", "2", "--k", "39", "--instance", inst]);
    assert_eq!(yes.status.code(), Some(0));
    let no = run(&["solve", "--problem", "ewsa", "--b", "2", "--k", "40", "--instance", inst]);
    assert_eq!(no.status.code(), Some(1));
}

#[test]
fn random_generation_is_reproducible() {
    let args = ["gen", "--random", "--seed", "11", "--agents", "6", "--resources", "4", "--sharing", "erdos_renyi:0.5"];
    let one = run(&args);
    let two = run(&args);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn bench_writes_a_report() {
    let dir = TempDir::new().unwrap();
    write(&dir, "a.json", TRIANGLE);
    let report = dir.path().join("report.json");
    let out = run(&["bench", "--corpus", dir.path().to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 1);
}
