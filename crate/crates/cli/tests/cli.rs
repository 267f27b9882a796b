use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/rivers").join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_licensing-oracle"))
        .args(args)
        .env_remove("LICENSING_TEST_MISSING_KEY")
        .output()
        .unwrap()
}

fn with_fixture(sub: &str, extra: &[&str]) -> Output {
    let graph = fixture("graph.nt");
    let constraints = fixture("constraints.txt");
    let rules = fixture("rules.txt");
    let dataset = fixture("dataset.jsonl");
    let mut args = vec![
        sub,
        "--graph",
        graph.to_str().unwrap(),
        "--constraints",
        constraints.to_str().unwrap(),
        "--rules",
        rules.to_str().unwrap(),
    ];
    if sub == "eval" || sub == "score" {
        args.extend(["--dataset", dataset.to_str().unwrap()]);
    }
    args.extend(extra);
    cli(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn row<'a>(report: &'a str, name: &str) -> Vec<&'a str> {
    report
        .lines()
        .find(|l| l.starts_with(name))
        .unwrap_or_else(|| panic!("no {name} row in\n{report}"))
        .split_whitespace()
        .collect()
}

#[test]
fn stats_reports_graph_size() {
    let out = with_fixture("stats", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "triples=117 subjects=24 predicates=9");
}

#[test]
fn validate_exit_codes() {
    assert_eq!(with_fixture("validate", &[]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bad.nt");
    let mut text = std::fs::read_to_string(fixture("graph.nt")).unwrap();
    text.push_str("<River_Gila> <sourceElevation> \"10.0\" .\n");
    std::fs::write(&graph, text).unwrap();
    let bad = cli(&[
        "validate",
        "--graph",
        graph.to_str().unwrap(),
        "--constraints",
        fixture("constraints.txt").to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("C6"), "{}", stdout(&bad));

    let missing = cli(&["validate", "--graph", "/nonexistent.nt", "--constraints", "/nonexistent.txt"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn malformed_graph_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("broken.nt");
    std::fs::write(&graph, "<a> <b> .\n").unwrap();
    let out = cli(&["stats", "--graph", graph.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn ask_answers_from_context() {
    let out = with_fixture("ask", &["What is the discharge of the Colorado River?"]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    assert!(line.contains("\"verdict\":\"ANSWER\""), "{line}");
    assert!(line.contains("has a discharge of 637"), "{line}");
}

#[test]
fn ask_abstains_on_unsupported_claim() {
    let out = with_fixture("ask", &["--mock-mode", "fixed", "--answer", "Gila River is 9 km long", "How long is the Gila River?"]);
    assert_eq!(out.status.code(), Some(3));
    let line = stdout(&out);
    assert!(line.contains("\"abstain_reason\":\"NO_EVIDENCE\""), "{line}");
    assert!(line.contains("\"response_text\":\"I don't know\""), "{line}");
}

#[test]
fn ask_rejects_bad_settings() {
    assert_eq!(with_fixture("ask", &["--max-hops", "0", "q"]).status.code(), Some(2));
    assert_eq!(with_fixture("ask", &["--mock-mode", "fixed", "q"]).status.code(), Some(2));
    let invalid = with_fixture("ask", &["--mock-mode", "noisy", "--p-correct", "0.9", "--p-hallucinate", "0.5", "--answer", "x", "q"]);
    assert_eq!(invalid.status.code(), Some(2));
}

#[test]
fn ask_without_api_key_is_an_upstream_failure() {
    let out = with_fixture(
        "ask",
        &[
            "--generator",
            "http",
            "--endpoint",
            "http://127.0.0.1:9/v1/chat/completions",
            "--model",
            "m",
            "--api-key-env",
            "LICENSING_TEST_MISSING_KEY",
            "q",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn eval_oracle_row_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("oracle.jsonl");
    let out = with_fixture(
        "eval",
        &[
            "--condition",
            "oracle",
            "--mock-mode",
            "noisy",
            "--p-correct",
            "0.5",
            "--p-hallucinate",
            "0.5",
            "--seed",
            "3",
            "--jobs",
            "4",
            "--output",
            log.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout(&out);
    let cells = row(&report, "ORACLE");
    assert_eq!(cells[2], "1.000", "AP in {report}");
    assert_eq!(cells[4], "0.000", "FAR-NE in {report}");
    assert_eq!(cells[5], "1.000", "LA in {report}");
    assert_eq!(std::fs::read_to_string(&log).unwrap().lines().count(), 32);

    // the written log scores to the same row
    let scored = with_fixture("score", &["--log", log.to_str().unwrap(), "--name", "ORACLE"]);
    assert_eq!(scored.status.code(), Some(0));
    assert_eq!(row(&stdout(&scored), "ORACLE"), cells);
}

#[test]
fn eval_baseline_with_fixed_answers_is_fully_accurate() {
    let out = with_fixture("eval", &["--condition", "BASELINE", "--mock-mode", "fixed"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(row(&stdout(&out), "BASELINE")[1], "100.0%");
}

#[test]
fn eval_rejects_unknown_condition() {
    let out = with_fixture("eval", &["--condition", "oracle_plus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    let quote = |p: &Path| format!("{:?}", p.to_str().unwrap());
    std::fs::write(
        &config,
        format!(
            "graph = {}\nconstraints = {}\nrules = {}\ndataset = {}\ncondition = \"BASELINE\"\nmock_mode = \"fixed\"\n",
            quote(&fixture("graph.nt")),
            quote(&fixture("constraints.txt")),
            quote(&fixture("rules.txt")),
            quote(&fixture("dataset.jsonl")),
        ),
    )
    .unwrap();
    let config = config.to_str().unwrap();
    let from_file = cli(&["--config", config, "eval"]);
    assert_eq!(from_file.status.code(), Some(0), "{}", String::from_utf8_lossy(&from_file.stderr));
    assert!(stdout(&from_file).contains("BASELINE"));
    let overridden = cli(&["--config", config, "eval", "--condition", "context_only"]);
    assert!(stdout(&overridden).contains("CONTEXT_ONLY"));

    std::fs::write(dir.path().join("typo.toml"), "grpah = \"x\"\n").unwrap();
    let typo = cli(&["--config", dir.path().join("typo.toml").to_str().unwrap(), "stats"]);
    assert_eq!(typo.status.code(), Some(2));
}
