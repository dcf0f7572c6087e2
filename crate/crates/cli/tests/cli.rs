use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_realhurwitz"))
        .args(args)
        .env_remove("REALHURWITZ_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn hurwitz_counts() {
    for (profiles, n, h) in [("2,1|2,1", 3, "1"), ("2,1,1|2,2", 2, "1/2"), ("4", 1, "1/4")] {
        let v = json(&["hurwitz", "--profiles", profiles]);
        assert_eq!(v["result"]["N"], n, "{profiles}");
        assert_eq!(v["result"]["H"], h, "{profiles}");
    }
}

#[test]
fn s_number_of_the_cubic() {
    let v = json(&["s-number", "--profiles", "2,1|2,1", "--values", "-2,2"]);
    assert_eq!(v["result"]["s"], -1);
    assert_eq!(v["result"]["real_count"], 1);
    assert_eq!(v["config"]["seed"], 20_240_601);
    assert_eq!(v["config"]["tolerances"]["residual"], 1e-10);
}

#[test]
fn real_hurwitz_parity_branch() {
    let v = json(&["real-hurwitz", "--profiles", "3,1|2,1,1"]);
    assert_eq!(v["result"]["value"], "0");
    assert_eq!(v["result"]["reason"], "parity-odd branch");
    let v = json(&["real-hurwitz", "--profiles", "2,1|2,1", "--check"]);
    assert_eq!(v["result"]["value"], "-1");
    assert_eq!(v["result"]["check"]["pass"], true);
}

#[test]
fn series_table() {
    let v = json(&["series", "--lambda", "1", "--mmax", "2", "--fit", "0"]);
    let values: Vec<i64> =
        v["result"]["entries"].as_array().unwrap().iter().map(|e| e["value"].as_i64().unwrap()).collect();
    assert_eq!(values, vec![1, 1, -1]);
    assert!(v["result"]["fits"]["odd"]["residual"].as_f64().unwrap() < 1e-12);
    assert!(v["result"]["fits"]["even"]["error"].is_string());

    let out = run(&["series", "--lambda", "1", "--mmax", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().next().unwrap().contains("value"));
}

#[test]
fn verify_sweep_and_negative_control() {
    let v = json(&["verify", "--dmax", "3", "--kmax", "2"]);
    assert_eq!(v["result"]["pass"], true);
    assert_eq!(v["result"]["summary"]["total"], 3);

    let out = run(&["verify", "--dmax", "3", "--kmax", "2", "--corrupt-sign"]);
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["result"]["summary"]["failed"].as_u64().unwrap() >= 1);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["hurwitz", "--profiles", "2,x"]).status.code(), Some(2));
    assert_eq!(run(&["s-number", "--profiles", "2,1|2,2"]).status.code(), Some(2));
    let out = run(&["solve", "--profiles", "2,1,1|2,1,1|2,1,1", "--budget", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["certificate"]["status"], "INCOMPLETE");
}

#[test]
fn config_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, r#"{"seed": 7, "tolerances": {"dedup": 1e-7}}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_realhurwitz"))
        .args(["hurwitz", "--profiles", "3"])
        .env("REALHURWITZ_CONFIG", &path)
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["config"]["tolerances"]["dedup"], 1e-7);
    assert_eq!(v["config"]["tolerances"]["residual"], 1e-10);
}

#[test]
fn output_independent_of_workers() {
    let args = ["solve", "--profiles", "2,1,1|2,1,1|2,1,1", "--seed", "11"];
    let one = run(&[&args[..], &["--workers", "1"]].concat());
    let four = run(&[&args[..], &["--workers", "4"]].concat());
    let again = run(&[&args[..], &["--workers", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(four.stdout, again.stdout);
}

#[test]
fn cache_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let cache_arg = cache.to_str().unwrap();
    json(&["solve", "--profiles", "3,1|2,1,1", "--values", "28,1", "--cache", cache_arg]);
    let text = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(text.lines().count(), 4);
    let v = json(&["solve", "--profiles", "3,1|2,1,1", "--values", "28,1", "--cache", cache_arg]);
    assert_eq!(v["result"]["stats"]["cached"], 4);
}
