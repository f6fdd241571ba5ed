mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dedupe_kb::ingest::{read_links, save_kb, DEFAULT_CONFIG_JSON};
use dedupe_kb::{deduplicate, default_config, evaluate, load_links};

fn dedupe_kb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dedupe-kb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const TWO_IDENTICAL: &str = "id,title,description,price,coordinates,district\n\
r1,Casa en Gonnet,Amplia casa con jardin,150000,\"-34.88,-58.01\",Gonnet\n\
r2,Casa en Gonnet,Amplia casa con jardin,150000,\"-34.88,-58.01\",Gonnet\n";

#[test]
fn dedup_two_identical_records() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("kb.csv");
    let out = dir.path().join("links.tsv");
    fs::write(&kb, TWO_IDENTICAL).unwrap();

    let o = dedupe_kb(&["dedup", "--kb", s(&kb), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("r1\tr2\t"));
    let report = stdout(&o);
    assert!(report.contains("records: 2"));
    assert!(report.contains("candidate pairs: 1"));
    assert!(report.contains("links: 1"));
}

#[test]
fn dedup_header_only_kb() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("kb.csv");
    let out = dir.path().join("links.tsv");
    fs::write(&kb, "id,title\n").unwrap();
    let o = dedupe_kb(&["dedup", "--kb", s(&kb), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn dedup_bad_config_path() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("kb.csv");
    fs::write(&kb, TWO_IDENTICAL).unwrap();
    let missing = dir.path().join("nope.json");
    let o = dedupe_kb(&[
        "dedup",
        "--kb",
        s(&kb),
        "--config",
        s(&missing),
        "--out",
        s(&dir.path().join("l.tsv")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope.json"));
}

#[test]
fn dedup_threshold_override() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("kb.csv");
    let out = dir.path().join("links.tsv");
    // only the title agrees: 0.90 alone
    fs::write(&kb, "id,title\nr1,casa grande\nr2,casa grande\n").unwrap();

    let o = dedupe_kb(&[
        "dedup",
        "--kb",
        s(&kb),
        "--out",
        s(&out),
        "--threshold",
        "0.95",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "");

    let o = dedupe_kb(&[
        "dedup",
        "--kb",
        s(&kb),
        "--out",
        s(&out),
        "--threshold",
        "0.9",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "r1\tr2\t0.900000\n");

    let o = dedupe_kb(&[
        "dedup",
        "--kb",
        s(&kb),
        "--out",
        s(&out),
        "--threshold",
        "0.2",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dedup_rejects_unknown_column() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("kb.csv");
    fs::write(&kb, "id,colour\nr1,red\n").unwrap();
    let o = dedupe_kb(&["dedup", "--kb", s(&kb), "--out", s(&dir.path().join("l"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("colour"));
}

fn write_counts_files(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let mut found = String::new();
    let mut truth = String::new();
    for i in 0..3139 {
        found.push_str(&format!("t{i}a\tt{i}b\t0.900000\n"));
        truth.push_str(&format!("t{i}b\tt{i}a\n"));
    }
    for i in 0..1554 {
        found.push_str(&format!("f{i}a\tf{i}b\t0.800000\n"));
    }
    for i in 0..1316 {
        truth.push_str(&format!("m{i}a\tm{i}b\n"));
    }
    let f = dir.join("found.tsv");
    let t = dir.join("truth.tsv");
    fs::write(&f, found).unwrap();
    fs::write(&t, truth).unwrap();
    (f, t)
}

#[test]
fn evaluate_published_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (found, truth) = write_counts_files(dir.path());

    let o = dedupe_kb(&["evaluate", "--found", s(&found), "--truth", s(&truth)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("(66.8%)"), "{text}");
    assert!(text.contains("(70.4%)"));
    assert!(text.contains("(68.6%)"));
    assert!(text.contains("precision: 0.66887"));

    let o = dedupe_kb(&[
        "evaluate",
        "--found",
        s(&found),
        "--truth",
        s(&truth),
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["tp"], 3139);
    assert_eq!(v["fp"], 1554);
    assert_eq!(v["fn"], 1316);
    assert_eq!(v["precision"].as_f64().unwrap(), 3139.0 / 4693.0);
}

#[test]
fn evaluate_identical_and_missing() {
    let dir = tempfile::tempdir().unwrap();
    let links = dir.path().join("l.tsv");
    fs::write(&links, "a\tb\nc\td\n").unwrap();
    let o = dedupe_kb(&["evaluate", "--found", s(&links), "--truth", s(&links)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("(100.0%)").count(), 3);

    let missing = dir.path().join("missing.tsv");
    let o = dedupe_kb(&["evaluate", "--found", s(&links), "--truth", s(&missing)]);
    assert_eq!(o.status.code(), Some(1));

    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "a\ta\n").unwrap();
    let o = dedupe_kb(&["evaluate", "--found", s(&bad), "--truth", s(&links)]);
    assert_eq!(o.status.code(), Some(1));
}

fn make_truth_inputs(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let kb = dir.join("source.csv");
    let groups = dir.join("groups.tsv");
    let mut csv = String::from("id,title,price\n");
    for g in ["a", "b", "c", "d"] {
        for m in 1..=2 {
            csv.push_str(&format!("{g}{m},listing {g},{}\n", 1000 * m));
        }
    }
    csv.push_str("stray,unlabelled,5\n");
    fs::write(&kb, csv).unwrap();
    fs::write(&groups, "a1\ta2\nb1\tb2\nc1\tc2\nd1\td2\n").unwrap();
    (kb, groups)
}

#[test]
fn make_truth_counts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let (kb, groups) = make_truth_inputs(dir.path());
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out_kb = dir.path().join(format!("kb{run}.csv"));
        let out_links = dir.path().join(format!("links{run}.tsv"));
        let o = dedupe_kb(&[
            "make-truth",
            "--groups",
            s(&groups),
            "--kb",
            s(&kb),
            "--seed",
            "42",
            "--out-kb",
            s(&out_kb),
            "--out-links",
            s(&out_links),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("duplicates: 2, uniques: 2"));
        let kb_text = fs::read(&out_kb).unwrap();
        let links_text = fs::read(&out_links).unwrap();
        outputs.push((kb_text, links_text));
    }
    assert_eq!(outputs[0], outputs[1]);
    let kb_text = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert_eq!(kb_text.lines().count(), 1 + 6);
    assert!(!kb_text.contains("stray"));
    assert_eq!(read_links(outputs[0].1.as_slice()).unwrap().len(), 2);
}

#[test]
fn make_truth_requires_seed_and_known_ids() {
    let dir = tempfile::tempdir().unwrap();
    let (kb, groups) = make_truth_inputs(dir.path());
    let out_kb = dir.path().join("o.csv");
    let out_links = dir.path().join("o.tsv");
    let o = dedupe_kb(&[
        "make-truth",
        "--groups",
        s(&groups),
        "--kb",
        s(&kb),
        "--out-kb",
        s(&out_kb),
        "--out-links",
        s(&out_links),
    ]);
    assert_eq!(o.status.code(), Some(1));

    fs::write(&groups, "a1\ta2\nb1\tghost\n").unwrap();
    let o = dedupe_kb(&[
        "make-truth",
        "--groups",
        s(&groups),
        "--kb",
        s(&kb),
        "--seed",
        "1",
        "--out-kb",
        s(&out_kb),
        "--out-links",
        s(&out_links),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ghost"));
}

#[test]
fn explain_identical_missing_and_unknown() {
    let config = default_config();
    let corpus = common::exact_corpus(&config, 7);
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("kb.csv");
    save_kb(&corpus.kb, "id", &kb).unwrap();

    let o = dedupe_kb(&["explain", "--kb", s(&kb), "p00a", "p00b"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 16 + 2);
    for (line, spec) in lines.iter().zip(&config.attributes) {
        assert!(line.starts_with(&format!("{}\t", spec.name)));
        assert!(line.ends_with(&format!("{:.6}", spec.high)), "{line}");
    }
    let combined: f64 = lines[16].trim_start_matches("combined: ").parse().unwrap();
    assert!(combined >= 0.99);
    assert!(lines[17].starts_with("decision: MATCH"));

    let sparse = dir.path().join("sparse.csv");
    fs::write(&sparse, "id,title,price\nr1,casa,100\nr2,,\n").unwrap();
    let o = dedupe_kb(&["explain", "--kb", s(&sparse), "r1", "r2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text.lines().filter(|l| l.contains("\tMISSING\t")).count(),
        16
    );
    assert!(text.contains("combined: 0.500000"));
    assert!(text.contains("decision: NO MATCH"));

    let o = dedupe_kb(&["explain", "--kb", s(&sparse), "r1", "zz"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn file_round_trip_matches_in_process() {
    let config = default_config();
    let corpus = common::perturbed_corpus(&config, 11);
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("kb.csv");
    let cfg = dir.path().join("config.json");
    let out = dir.path().join("found.tsv");
    let truth = dir.path().join("truth.tsv");
    save_kb(&corpus.kb, "id", &kb).unwrap();
    fs::write(&cfg, DEFAULT_CONFIG_JSON).unwrap();
    dedupe_kb::write_links(&corpus.truth, &truth).unwrap();

    let o = dedupe_kb(&[
        "dedup",
        "--kb",
        s(&kb),
        "--config",
        s(&cfg),
        "--out",
        s(&out),
        "--jobs",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = dedupe_kb(&[
        "evaluate",
        "--found",
        s(&out),
        "--truth",
        s(&truth),
        "--json",
    ]);
    let from_cli: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();

    let in_process = evaluate(&deduplicate(&corpus.kb, &config).unwrap(), &corpus.truth);
    let expected: serde_json::Value = serde_json::from_str(&in_process.to_json()).unwrap();
    assert_eq!(from_cli, expected);
    assert_eq!(
        load_links(&out).unwrap().len(),
        deduplicate(&corpus.kb, &config).unwrap().len()
    );
}

#[test]
fn in_process_runner_reports_usage_errors() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dedupe_kb::cli::run(["dedupe-kb", "frobnicate"], &mut out, &mut err);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
    let code = dedupe_kb::cli::run(["dedupe-kb", "--help"], &mut out, &mut err);
    assert_eq!(code, 0);
}
