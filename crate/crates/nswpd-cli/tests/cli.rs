use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn nswpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nswpd")).args(args).output().expect("binary runs")
}

fn record(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "one record per run: {text}");
    serde_json::from_str(text.trim()).unwrap()
}

fn without_millis(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("millis");
    v
}

#[test]
fn pd_map_unit_costs() {
    let fish = data("fish.enwk");
    let r = record(&nswpd(&["pd", "map", "--net", fish.to_str().unwrap(), "--unit-costs", "--budget", "6"]));
    assert_eq!(r["problem"], "b-map-pd");
    assert_eq!(r["value"], 55);
    assert_eq!(r["budget"], 6);
    for key in ["taxa", "nsw", "millis", "seed"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn solvers_agree_with_oracles_on_fish() {
    let fish = data("fish.enwk");
    let net = fish.to_str().unwrap();
    for (pd, oracle) in [("map", "map"), ("max", "max")] {
        for b in 0..=6 {
            let b = b.to_string();
            let x = record(&nswpd(&["pd", pd, "--net", net, "--unit-costs", "--budget", &b]));
            let y = record(&nswpd(&["oracle", oracle, "--net", net, "--unit-costs", "--budget", &b]));
            assert_eq!(x["value"], y["value"], "{pd} at budget {b}");
        }
    }
    let min = record(&nswpd(&["pd", "min", "--net", net, "--taxa", "A,B,D"]));
    assert_eq!(min["value"], 28);
    let min = record(&nswpd(&["oracle", "min", "--net", net, "--taxa", "A,B,D"]));
    assert_eq!(min["value"], 28);
    let max = record(&nswpd(&["oracle", "pdmax", "--net", net, "--taxa", "A,B,D"]));
    assert_eq!(max["value"], 30);
}

#[test]
fn budget_fraction_floors() {
    let fish = data("fish.enwk");
    let r = record(&nswpd(&["pd", "max", "--net", fish.to_str().unwrap(), "--unit-costs", "--budget-frac", "0.5"]));
    assert_eq!(r["budget"], 3);
    assert!(r["witness"].is_array());
}

#[test]
fn nsw_of_chain_and_extension_file() {
    let dir = tempfile::tempdir().unwrap();
    let ext = dir.path().join("chain.ext");
    let chain = data("chain.enwk");
    let net = chain.to_str().unwrap();
    let r = record(&nswpd(&["nsw", "--net", net, "--out-extension", ext.to_str().unwrap()]));
    assert_eq!(r["nsw"], 3);
    for flag in ["--exact", "--no-reduce"] {
        assert_eq!(record(&nswpd(&["nsw", "--net", net, flag]))["nsw"], 3);
    }
    assert_eq!(record(&nswpd(&["oracle", "nsw", "--net", net]))["nsw"], 3);
    let check = record(&nswpd(&["ilp", "check", "--net", net, "--extension", ext.to_str().unwrap()]));
    assert_eq!(check["feasible"], true);
    assert_eq!(check["objective"], 3);
    assert_eq!(check["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn pd_accepts_an_extension_file() {
    let dir = tempfile::tempdir().unwrap();
    let ext = dir.path().join("fish.ext");
    let fish = data("fish.enwk");
    let net = fish.to_str().unwrap();
    record(&nswpd(&["nsw", "--net", net, "--heuristic", "--out-extension", ext.to_str().unwrap()]));
    let r = record(&nswpd(&["pd", "min", "--net", net, "--taxa", "A,B,D", "--extension", ext.to_str().unwrap()]));
    assert_eq!(r["value"], 28);
}

#[test]
fn ilp_emit_writes_lp_text() {
    let out = nswpd(&["ilp", "emit", "--net", data("chain.enwk").to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Minimize") && text.contains("Subject To") && text.trim_end().ends_with("End"));
}

#[test]
fn exit_codes() {
    let fish = data("fish.enwk");
    let chain = data("chain.enwk");
    assert_eq!(nswpd(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nswpd(&["validate", "--net", chain.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(nswpd(&["pd", "map", "--net", fish.to_str().unwrap(), "--budget", "3"]).status.code(), Some(2));
    assert_eq!(nswpd(&["nsw", "--net", chain.to_str().unwrap(), "--upper-bound", "2"]).status.code(), Some(3));
    assert_eq!(nswpd(&["nsw", "--net", "/nonexistent/net.enwk"]).status.code(), Some(4));
    let bad = nswpd(&["pd", "min", "--net", fish.to_str().unwrap(), "--taxa", "A,Z"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty() && !bad.stderr.is_empty());
}

#[test]
fn validate_reports_structure() {
    let r = record(&nswpd(&["validate", "--net", data("fish.enwk").to_str().unwrap(), "--strict"]));
    assert_eq!(r["value"]["reticulations"], 3);
    assert_eq!(r["value"]["taxa"], 6);
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let prefix = dir.path().join(name);
        let args = ["gen", "--seed", "7", "--leaves", "25", "--reticulations", "4", "--contract-frac", "0.1", "--out"];
        let mut args: Vec<&str> = args.to_vec();
        let p = prefix.to_str().unwrap().to_string();
        args.push(&p);
        let r = record(&nswpd(&args));
        let net = std::fs::read_to_string(prefix.with_extension("enwk")).unwrap();
        let costs = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
        (without_millis(r), net, costs, prefix)
    };
    let (r1, n1, c1, p1) = run("a");
    let (r2, n2, c2, _) = run("b");
    assert_eq!((r1, n1, c1), (r2, n2, c2));
    let net = p1.with_extension("enwk");
    let costs = p1.with_extension("csv");
    let args = ["pd", "map", "--net", net.to_str().unwrap(), "--costs", costs.to_str().unwrap(), "--budget-frac", "0.5"];
    assert_eq!(without_millis(record(&nswpd(&args))), without_millis(record(&nswpd(&args))));
}

#[test]
fn bench_empty_and_small_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = nswpd(&["bench", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "instance,n_leaves,level,nsw,problem,budget_frac,millis,value\n");

    for seed in 0..10 {
        let prefix = dir.path().join(format!("inst{seed:02}"));
        let s = seed.to_string();
        let args = ["gen", "--seed", &s, "--leaves", "12", "--reticulations", "3", "--out", prefix.to_str().unwrap()];
        assert!(nswpd(&args).status.success());
    }
    let csv = dir.path().join("bench.csv");
    let summary = dir.path().join("summary.csv");
    let out = nswpd(&[
        "bench",
        dir.path().to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(csv).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    // One nsw row and 2 problems x 3 fractions per instance.
    assert_eq!(rows.len(), 10 * 7);
    assert_eq!(rows.iter().filter(|r| r.split(',').nth(4) == Some("nsw")).count(), 10);
    let summary = std::fs::read_to_string(summary).unwrap();
    assert!(summary.starts_with("n_leaves,level,problem,budget_frac,count,mean_millis,q1_millis,q3_millis\n"));
    assert!(summary.lines().count() > 1);
}
