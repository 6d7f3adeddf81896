#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn gedkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gedkit"))
        .args(args)
        .env_remove("GEDKIT_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = gedkit(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn manifest(p: &Path) -> Value {
    let mut name = p.file_name().unwrap().to_os_string();
    name.push(".manifest.json");
    serde_json::from_str(&read(&p.with_file_name(name))).unwrap()
}

/// Multi-GED rendering of the fixture corpus, labeled by the brute-force oracle.
fn oracle_golden() -> String {
    let orig = read(&fixture("parallel.orig.txt"));
    let corr = read(&fixture("parallel.corr.txt"));
    let mut out = String::new();
    for (o, c) in orig.lines().zip(corr.lines()) {
        let a: Vec<&str> = o.split_whitespace().collect();
        let b: Vec<&str> = c.split_whitespace().collect();
        let (_, ops) = common::search_best(&a, &b);
        for (tok, bad) in b.iter().zip(common::oracle_labels(&ops)) {
            out.push_str(&format!("{tok}\t{}\n", if bad { "i" } else { "c" }));
        }
        out.push('\n');
    }
    out
}

#[test]
fn golden_fixture_is_what_the_oracle_says() {
    assert_eq!(read(&fixture("parallel.golden.tsv")), oracle_golden());
}

#[test]
fn label_reproduces_golden_fixture() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("labels.tsv");
    let edits = dir.path().join("edits.jsonl");
    ok(&[
        "label",
        "--original",
        s(&fixture("parallel.orig.txt")),
        "--corrupted",
        s(&fixture("parallel.corr.txt")),
        "--out",
        s(&out),
        "--emit-edits",
        s(&edits),
    ]);
    assert_eq!(read(&out), read(&fixture("parallel.golden.tsv")));
    let m = manifest(&out);
    assert_eq!(m["counters"]["pairs_labeled"], 8);
    assert_eq!(m["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
    assert!(read(&edits).lines().count() >= 7);
    assert_eq!(manifest(&edits), m);
}

#[test]
fn label_from_tsv_matches_two_file_input() {
    let dir = TempDir::new().unwrap();
    let orig = read(&fixture("parallel.orig.txt"));
    let corr = read(&fixture("parallel.corr.txt"));
    let tsv: String = orig.lines().zip(corr.lines()).map(|(a, b)| format!("{a}\t{b}\n")).collect();
    let input = dir.path().join("pairs.tsv");
    std::fs::write(&input, tsv).unwrap();
    let out = dir.path().join("labels.tsv");
    ok(&["label", "--tsv", s(&input), "--out", s(&out)]);
    assert_eq!(read(&out), read(&fixture("parallel.golden.tsv")));
}

#[test]
fn convert_m2_fixture() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m2.tsv");
    ok(&["convert", "--in", s(&fixture("sample.m2")), "--out", s(&out)]);
    assert_eq!(read(&out), read(&fixture("sample.m2.tsv")));
    assert_eq!(manifest(&out)["counters"]["records"], 3);

    let missing = dir.path().join("a9.tsv");
    let res = gedkit(&["convert", "--in", s(&fixture("sample.m2")), "--annotator", "9", "--out", s(&missing)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(!missing.exists());
}

#[test]
fn evaluate_fixture_matches_hand_computation() {
    // Gold i at has, is; predicted >= 0.5 only at has. TP 1, FP 0, FN 1.
    let out = ok(&["evaluate", "--gold", s(&fixture("gold.tsv")), "--pred", s(&fixture("pred.tsv"))]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &v["report"];
    assert_eq!((r["true_positives"].as_u64(), r["false_positives"].as_u64(), r["false_negatives"].as_u64()), (Some(1), Some(0), Some(1)));
    assert!((r["f_half"].as_f64().unwrap() - 1.25 * 0.5 / 0.75).abs() < 1e-12);
    assert_eq!(v["metadata"]["positive_class"], "i");
    assert_eq!(v["metadata"]["punctuation"], "included");

    // Inclusive comparison: at 0.4 the token "is" counts as predicted.
    let out = ok(&["evaluate", "--gold", s(&fixture("gold.tsv")), "--pred", s(&fixture("pred.tsv")), "--threshold", "0.4"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["true_positives"], 2);
    assert_eq!(v["report"]["false_positives"], 1);
}

#[test]
fn pr_curve_writes_csv_and_svg() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("curve.csv");
    let svg = dir.path().join("curve.svg");
    let out = ok(&[
        "pr-curve", "--gold", s(&fixture("gold.tsv")), "--pred", s(&fixture("pred.tsv")), "--out", s(&csv), "--svg", s(&svg),
    ]);
    let text = read(&csv);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("threshold,precision,recall"));
    // Seven distinct probabilities plus the sentinels 0 and 1.
    assert_eq!(lines.count(), 9);
    assert!(read(&svg).starts_with("<svg"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["best_f_half"].as_f64().unwrap() > 0.8);
}

#[test]
fn usage_errors_exit_one_without_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.tsv");
    let res = gedkit(&["convert", "--in", s(&fixture("sample.m2")), "--out", s(&out), "--bogus"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());

    assert_eq!(gedkit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gedkit(&[]).status.code(), Some(1));
    let res = gedkit(&["evaluate", "--gold", s(&fixture("gold.tsv")), "--pred", s(&fixture("pred.tsv")), "--threshold", "1.5"]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn missing_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.tsv");
    let res = gedkit(&["convert", "--in", s(&dir.path().join("nope.m2")), "--out", s(&out)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn malformed_input_exits_one() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "a\tc\nb\tx\n").unwrap();
    let res = gedkit(&["evaluate", "--gold", s(&bad), "--pred", s(&fixture("pred.tsv"))]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 2"));
}

#[test]
fn refuses_to_overwrite_input() {
    let dir = TempDir::new().unwrap();
    let m2 = dir.path().join("in.m2");
    std::fs::copy(fixture("sample.m2"), &m2).unwrap();
    let res = gedkit(&["convert", "--in", s(&m2), "--out", s(&m2)]);
    assert_eq!(res.status.code(), Some(1));
    assert_eq!(read(&m2), read(&fixture("sample.m2")));
}

#[test]
fn version_names_format() {
    let out = ok(&["--version"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("gedkit") && text.contains("format 1"), "{text}");
}

fn write_corpus(dir: &Path) -> (PathBuf, PathBuf) {
    let dict = dir.join("words.dic");
    let words = ["the", "then", "they", "cat", "cut", "cart", "sat", "set", "on", "one", "mat", "map", "dog", "dig", "ran", "run", "a", "an"];
    std::fs::write(&dict, words.iter().enumerate().map(|(i, w)| format!("{w}\t{}\n", 10 + i)).collect::<String>()).unwrap();
    let text = dir.join("clean.txt");
    let lines: String = (0..200)
        .map(|i| {
            let n = 3 + i % 6;
            (0..n).map(|j| words[(i * 5 + j * 7) % words.len()]).collect::<Vec<_>>().join(" ") + "\n"
        })
        .collect();
    std::fs::write(&text, lines).unwrap();
    (dict, text)
}

#[test]
fn corrupt_is_reproducible_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let (dict, text) = write_corpus(dir.path());
    let mut outputs = Vec::new();
    for threads in ["1", "3", "1"] {
        let out = dir.path().join(format!("synth{}.jsonl", outputs.len()));
        ok(&["corrupt", "--threads", threads, "--in", s(&text), "--dict", s(&dict), "--seed", "7", "--out", s(&out)]);
        outputs.push((read(&out), manifest(&out)));
    }
    assert_eq!(outputs[0].0, outputs[1].0);
    assert_eq!(outputs[0].0, outputs[2].0);
    assert_eq!(outputs[0].1["config_hash"], outputs[1].1["config_hash"]);
    assert_eq!(outputs[0].1["counters"]["sentences"], 200);

    let other = dir.path().join("other.jsonl");
    ok(&["corrupt", "--in", s(&text), "--dict", s(&dict), "--seed", "8", "--out", s(&other)]);
    assert_ne!(read(&other), outputs[0].0);
    assert_ne!(manifest(&other)["config_hash"], outputs[0].1["config_hash"]);

    // The synthetic pairs feed straight into labeling.
    let labels = dir.path().join("labels.tsv");
    ok(&["label", "--jsonl", s(&dir.path().join("synth0.jsonl")), "--out", s(&labels)]);
    assert_eq!(manifest(&labels)["counters"]["pairs_read"], 200);
}

#[test]
fn corrupt_reads_config_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let (dict, text) = write_corpus(dir.path());
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 7, "corruption": {"p_word": 0.3}}"#).unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    ok(&["corrupt", "--config", s(&cfg), "--in", s(&text), "--dict", s(&dict), "--out", s(&a)]);
    ok(&["corrupt", "--seed", "7", "--p-word", "0.3", "--in", s(&text), "--dict", s(&dict), "--out", s(&b)]);
    assert_eq!(read(&a), read(&b));
    assert_eq!(manifest(&a)["config"]["corruption"]["p_word"], 0.3);

    let c = dir.path().join("c.jsonl");
    ok(&["corrupt", "--config", s(&cfg), "--p-word", "0.1", "--in", s(&text), "--dict", s(&dict), "--out", s(&c)]);
    assert_eq!(manifest(&c)["config"]["corruption"]["p_word"], 0.1);

    let bad = gedkit(&["corrupt", "--p-word", "1.5", "--in", s(&text), "--dict", s(&dict), "--out", s(&dir.path().join("d.jsonl"))]);
    assert_eq!(bad.status.code(), Some(1));
    let bad = gedkit(&["corrupt", "--weights", "replace=x", "--in", s(&text), "--dict", s(&dict), "--out", s(&dir.path().join("d.jsonl"))]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!dir.path().join("d.jsonl").exists());
}

#[test]
fn sample_filters_and_reports_shortfall() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("mono.txt");
    std::fs::write(&input, "one two three\nshort\none two three\nfour five six seven\neight nine ten\n").unwrap();
    let pred = dir.path().join("pred.tsv");
    let rows = [vec!["one", "two", "three"], vec!["short"], vec!["one", "two", "three"], vec!["four", "five", "six", "seven"], vec!["eight", "nine", "ten"]];
    let mut text = String::new();
    for (i, r) in rows.iter().enumerate() {
        for t in r {
            let p = if i == 3 && *t == "six" { 0.9 } else { 0.1 };
            text.push_str(&format!("{t}\t{p}\n"));
        }
        text.push('\n');
    }
    std::fs::write(&pred, text).unwrap();
    let out = dir.path().join("clean.txt");
    ok(&["sample", "--in", s(&input), "--n", "10", "--seed", "1", "--predictions", s(&pred), "--out", s(&out)]);
    assert_eq!(read(&out), "one two three\neight nine ten\n");
    let m = manifest(&out);
    assert_eq!(m["counters"]["dropped_length"], 1);
    assert_eq!(m["counters"]["dropped_duplicate"], 1);
    assert_eq!(m["counters"]["dropped_predicted_error"], 1);
    assert_eq!(m["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn analysis_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let labels = dir.path().join("labels.tsv");
    let edits = dir.path().join("edits.jsonl");
    ok(&[
        "label", "--original", s(&fixture("parallel.orig.txt")), "--corrupted", s(&fixture("parallel.corr.txt")),
        "--out", s(&labels), "--emit-edits", s(&edits),
    ]);
    let dist = dir.path().join("dist.json");
    ok(&["analyze", "edits", "--in", s(&edits), "--out", s(&dist)]);
    let d: Value = serde_json::from_str(&read(&dist)).unwrap();
    assert!(d["counts"]["MISSING"].as_u64().unwrap() >= 2);
    assert_eq!(d["total"], manifest(&dist)["counters"]["edits"]);

    let out = ok(&["analyze", "entropy", "--in", s(&dist), "--k", "8", "--k", "16"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    let h8 = entries[0]["normalized_entropy"].as_f64().unwrap();
    let h16 = entries[1]["normalized_entropy"].as_f64().unwrap();
    assert!(h8 > h16 && h16 > 0.0);
    assert!((v["mean_normalized_entropy"].as_f64().unwrap() - (h8 + h16) / 2.0).abs() < 1e-12);

    let clusters = dir.path().join("clusters.tsv");
    std::fs::write(&clusters, "a\t1\nb\t2\nc\t1\nd\t2\n").unwrap();
    let cdist = dir.path().join("cdist.json");
    ok(&["analyze", "edits", "--clusters", s(&clusters), "--out", s(&cdist)]);
    let out = ok(&["analyze", "entropy", "--in", s(&cdist), "--k", "2"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["mean_normalized_entropy"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let res = gedkit(&["analyze", "entropy", "--in", s(&dist), "--in", s(&cdist), "--k", "2", "--k", "3", "--k", "4"]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn discriminator_data_is_balanced_and_seeded() {
    let dir = TempDir::new().unwrap();
    let (dict, text) = write_corpus(dir.path());
    let synth = dir.path().join("synth.jsonl");
    ok(&["corrupt", "--in", s(&text), "--dict", s(&dict), "--seed", "1", "--out", s(&synth)]);
    let auth = dir.path().join("auth.jsonl");
    let orig = read(&fixture("parallel.orig.txt"));
    let corr = read(&fixture("parallel.corr.txt"));
    let jsonl: String = orig
        .lines()
        .zip(corr.lines())
        .map(|(a, b)| serde_json::json!({"original": a, "corrupted": b, "language": null, "provenance": "authentic", "seed": null}).to_string() + "\n")
        .collect();
    std::fs::write(&auth, jsonl).unwrap();

    let a = dir.path().join("a.tsv");
    let b = dir.path().join("b.tsv");
    ok(&["discriminator-data", "--authentic", s(&auth), "--synthetic", s(&synth), "--seed", "3", "--out", s(&a)]);
    ok(&["discriminator-data", "--threads", "2", "--authentic", s(&auth), "--synthetic", s(&synth), "--seed", "3", "--out", s(&b)]);
    assert_eq!(read(&a), read(&b));
    let text = read(&a);
    let auth_n = text.lines().filter(|l| l.ends_with("\tauthentic")).count();
    let synth_n = text.lines().filter(|l| l.ends_with("\tsynthetic")).count();
    assert_eq!((auth_n, synth_n), (8, 8));
}

#[test]
fn confusion_build_and_query() {
    let dir = TempDir::new().unwrap();
    let (dict, _) = write_corpus(dir.path());
    let stats = dir.path().join("index.json");
    ok(&["confusion", "build", "--dict", s(&dict), "--max-distance", "1", "--out", s(&stats)]);
    let v: Value = serde_json::from_str(&read(&stats)).unwrap();
    assert_eq!(v["words"], 18);

    let out = ok(&["confusion", "query", "--dict", s(&dict), "--max-distance", "1", "--word", "cat", "--word", "zzz"]);
    let lines: Vec<Value> = String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let cat: Vec<&str> = lines[0]["neighbors"].as_array().unwrap().iter().map(|n| n["word"].as_str().unwrap()).collect();
    // All at distance 1, so frequency decides: mat 20, sat 16, cart 15, cut 14.
    assert_eq!(cat, ["mat", "sat", "cart", "cut"]);
    assert!(lines[1]["neighbors"].as_array().unwrap().is_empty());

    let res = gedkit(&["confusion", "build", "--dict", s(&dict), "--max-distance", "3", "--out", s(&stats)]);
    assert_eq!(res.status.code(), Some(1));
}
