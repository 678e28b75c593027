mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::data_dir;

fn shiftdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftdc"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stream(name: &str) -> String {
    data_dir()
        .join(format!("streams/{name}.json"))
        .to_string_lossy()
        .into_owned()
}

#[test]
fn golden_traces_verify() {
    for name in ["dense-singletons", "geometric-start", "empty"] {
        let golden = data_dir().join(format!("golden/{name}.json"));
        let out = shiftdc(&["verify", "--stream", &stream(name), "--out", path(&golden)]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        for line in String::from_utf8(out.stdout).unwrap().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_ne!(v["verdict"], "fail", "{line}");
        }
    }
}

#[test]
fn corrupted_trace_names_the_condition() {
    let dir = tempfile::tempdir().unwrap();
    let golden = std::fs::read_to_string(data_dir().join("golden/dense-singletons.json")).unwrap();
    let mut trace: serde_json::Value = serde_json::from_str(&golden).unwrap();
    trace["steps"][4]["pi"] = serde_json::json!({
        "breakpoints": [["0", "1"]],
        "leftSlope": "1",
        "rightSlope": "1"
    });
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&trace).unwrap()).unwrap();
    let out = shiftdc(&[
        "verify",
        "--stream",
        &stream("dense-singletons"),
        "--out",
        path(&bad),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.contains("\"condition-1\"")
        && l.contains("\"index\":4")
        && l.contains("\"fail\"")));
}

#[test]
fn unreadable_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").unwrap();
    let out = shiftdc(&[
        "verify",
        "--stream",
        &stream("empty"),
        "--out",
        path(&empty),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let malformed = dir.path().join("malformed.json");
    std::fs::write(
        &malformed,
        "{\"increments\": [{\"points\": [\"2/4\"], \"tails\": []}]}",
    )
    .unwrap();
    let trace = dir.path().join("trace.json");
    let out = shiftdc(&[
        "construct",
        "--stream",
        path(&malformed),
        "--steps",
        "2",
        "--out",
        path(&trace),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = shiftdc(&["construct", "--steps", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_stream_construct_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let out = shiftdc(&[
        "construct",
        "--stream",
        &stream("empty"),
        "--steps",
        "3",
        "--out",
        path(&trace),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(v["header"]["N"], 3);
    for step in v["steps"].as_array().unwrap() {
        assert_eq!(step["pi"]["breakpoints"], serde_json::json!([["0", "0"]]));
    }
}

#[test]
fn theorem_instances() {
    for (name, code) in [("identity", 0), ("translation", 0), ("corrupted-tau", 1)] {
        let inst = data_dir().join(format!("instances/{name}.json"));
        let out = shiftdc(&["theorem", "--stream", path(&inst)]);
        assert_eq!(out.status.code(), Some(code), "{name}");
    }
    let out = shiftdc(&[
        "theorem",
        "--stream",
        path(&data_dir().join("instances/corrupted-tau.json")),
    ]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("index 3"));
}

#[test]
fn props_pass_across_seeds() {
    for seed in 0..5 {
        let out = shiftdc(&["props", "--seed", &seed.to_string(), "--cases", "20"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "seed {seed}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = shiftdc(&["props", "--cases", "0"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let golden = data_dir().join("golden/geometric-start.json");
    let args = [
        "verify",
        "--stream",
        &stream("geometric-start"),
        "--out",
        path(&golden),
    ];
    let one = shiftdc(&args).stdout;
    let mut four = vec!["--threads", "4"];
    four.extend_from_slice(&args);
    assert_eq!(one, shiftdc(&four).stdout);
    let a = shiftdc(&["props", "--seed", "11", "--cases", "10"]).stdout;
    let b = shiftdc(&["--threads", "2", "props", "--seed", "11", "--cases", "10"]).stdout;
    assert_eq!(a, b);
}
