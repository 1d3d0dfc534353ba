use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn localq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_localq")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().next().expect("one report line")).expect("valid json")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn learn_recovers_the_opposite_pair() {
    let dir = tempfile::tempdir().unwrap();
    let target = write(dir.path(), "f.dnf", "dnf 4\n1 2\n-1 -2\n");
    let log = dir.path().join("q.jsonl");
    let out = localq(&[
        "learn", "--target", &target, "--dist", "uniform:4", "--m1", "2000", "--m2", "10000", "--seed", "3",
        "--query-log", log.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = json(&out);
    assert_eq!(run["trial"]["loss_exact"], "0");
    assert_eq!(run["trial"]["non_unit_queries"], 0);
    let queries = run["trial"]["oracle"]["queries"].as_u64().unwrap();
    let lines: Vec<Value> = std::fs::read_to_string(&log)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len() as u64, queries);
    assert!(lines.iter().all(|l| l["query"].as_str().unwrap().len() == 4 && l["dist"].as_u64().unwrap() <= 1));
    assert!(run.get("wall_ms").is_none() && run["trial"].get("wall_ms").is_none());
}

#[test]
fn learn_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let target = write(dir.path(), "f.dnf", "dnf 5\n1 -3\n-1 3 5\n");
    let args = ["learn", "--target", &target, "--m1", "300", "--m2", "600", "--seed", "9"];
    assert_eq!(localq(&args).stdout, localq(&args).stdout);
}

#[test]
fn check_evident_reports_rates() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.dnf", "dnf 2\n1\n2\n");
    let out = localq(&["check-evident", "--formula", &f, "--dist", "uniform:2"]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["verdict"], false);
    assert_eq!(report["beta"], "1/2");

    let pair = write(dir.path(), "g.dnf", "dnf 3\n1 2\n-1 -2\n");
    let dist = write(dir.path(), "d.txt", "++- 1/2\n--+ 1/2\n");
    let out = localq(&["check-evident", "--formula", &pair, "--dist", &format!("file:{dist}"), "--beta", "1/3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["verdict"], true);
}

#[test]
fn verify_reduction_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write(dir.path(), "t.tree", "tree 3\n(1 (2 0 1) (3 1 0))\n");
    let out = localq(&["verify-reduction", "--construction", "tree", "--n", "3", "--q0", "2", "--concept", &tree]);
    assert!(out.status.success());
    assert_eq!(json(&out)["pass"], true);

    let out = localq(&[
        "verify-reduction", "--construction", "tree", "--n", "3", "--q0", "1", "--concept", &tree, "--fault",
        "first-copy-label",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["pass"], false);
    assert!(!report["counterexamples"].as_array().unwrap().is_empty());

    let out = localq(&["verify-reduction", "--construction", "dfa", "--n", "2", "--seed", "4"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["kind"], "type-a");
}

#[test]
fn bad_inputs_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.dnf", "dnf 2\n1 -1\n");
    let out = localq(&["learn", "--target", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = localq(&["verify-reduction", "--construction", "junta", "--n", "2", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "suite.cfg",
        "# small run\nfamily = doubled-tree\nn = 4\nmax_leaves = 6\nm1 = 400\nm2 = 2000\ntrials = 4\nseed = 5\n",
    );
    let out_path = dir.path().join("report.jsonl");
    let out = localq(&["suite", "--kind", "learning", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let report: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(report["trials"], 4);
    assert_eq!(report["required"], 3);
    assert_eq!(out.status.success(), report["pass"].as_bool().unwrap());
    let again = dir.path().join("again.jsonl");
    localq(&["suite", "--kind", "learning", "--config", &cfg, "--out", again.to_str().unwrap()]);
    assert_eq!(text, std::fs::read_to_string(&again).unwrap());

    let out = localq(&["suite", "--kind", "simulation", "--seed", "2"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["mismatches"], 0);
}
