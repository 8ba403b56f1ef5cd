//! Exit codes, output purity and configuration precedence of the binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn geometer(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_geometer"));
    cmd.args(args).current_dir(root()).env_remove("GEOMETER_CONFIG");
    cmd
}

fn run(args: &[&str]) -> Output {
    geometer(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const SCORE: &[&str] = &["score", "-t", "fixtures/transcripts/worked_example.json", "--brands", "fixtures/brands.json"];

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run_owned(args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&refs)
}

#[test]
fn score_prints_pure_json_on_stdout() {
    let out = run_owned(&with(SCORE, &["--brand", "Bet365"]));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).is_empty());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["brand"], "Bet365");
    let text = stdout(&out);
    assert!(text.contains("\"imp_pos_adj\": 0.715102"), "{text}");
    assert!(text.contains("\"imp_pos_adj\": 0.260557"), "{text}");
}

#[test]
fn score_without_brand_filter_emits_one_report_per_registry() {
    let out = run(SCORE);
    assert_eq!(code(&out), 0);
    let reports: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 2);
}

#[test]
fn score_csv_has_fixed_columns() {
    let out = run_owned(&with(SCORE, &["-f", "csv", "--brand", "Bet365"]));
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("brand,marker_id,domain,class,imp_wc,imp_pos_adj"));
    assert_eq!(lines.next(), Some("Bet365,1,bet365.com,owned,0.818182,0.715102"));
}

#[test]
fn plain_text_with_sources_sidecar_matches_transcript_input() {
    let text = run(&[
        "score", "--text", "fixtures/transcripts/worked_example.txt", "--sources",
        "fixtures/transcripts/worked_example.sources.tsv", "--captured-at", "2026-03-01T12:00:00Z",
        "--brands", "fixtures/brands.json", "--brand", "Bet365", "-f", "csv",
    ]);
    let file = run_owned(&with(SCORE, &["-f", "csv", "--brand", "Bet365"]));
    assert_eq!(code(&text), 0, "{}", stderr(&text));
    assert_eq!(stdout(&text), stdout(&file));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["bench", "run", "--help"])), 0);
}

#[test]
fn invalid_input_exits_one() {
    assert_eq!(code(&run(&["score", "--bogus"])), 1);
    assert_eq!(code(&run(&["score", "-t", "fixtures/transcripts/missing.json", "--brands", "fixtures/brands.json"])), 1);
    let out = run(&["score", "-t", "fixtures/transcripts/worked_example.json"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("brand"));
    assert!(stdout(&out).is_empty());
    let out = run(&["bench", "report", "--store", "/nonexistent/store.jsonl", "--window-a", "2026-01-01T00:00:00Z..2026-02-01T00:00:00Z", "--brands", "fixtures/brands.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unwritable_store_is_a_runtime_failure() {
    let out = run(&[
        "bench", "run", "--library", "fixtures/bench/library.json", "--engine", "fixtures:fixtures/bench/engine_a",
        "--brands", "fixtures/brands.json", "--store", "/nonexistent/dir/store.jsonl",
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    let err = stderr(&out);
    assert_eq!(err.matches("os error").count(), 1, "{err}");
}

#[test]
fn partial_failures_exit_three_and_quiet_hides_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.jsonl");
    let args = [
        "bench", "run", "--library", "fixtures/bench/library.json", "--engine", "fixtures:fixtures/bench/engine_flaky",
        "--brands", "fixtures/brands.json", "--clock", "2026-03-01T12:00:00Z", "--store", store.to_str().unwrap(),
    ];
    let out = run(&args);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("live-casino-sites"));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["records"], 2);
    assert_eq!(summary["errors"], 1);

    let quiet = run_owned(&with(&args, &["-q"]));
    assert_eq!(code(&quiet), 3);
    assert!(stderr(&quiet).is_empty());
}

#[test]
fn entity_audit_exit_codes() {
    let out = run(&["entity", "fixtures/entity/full.html"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["composite"].as_f64(), Some(100.0));

    let out = run(&["entity", "fixtures/entity/broken.html"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("block 3"), "{}", stderr(&out));

    let out = run(&["entity", "fixtures/entity/licence_a.html", "fixtures/entity/licence_b.jsonld"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["findings"][0]["kind"], "licence_mismatch");
    // Findings are part of the report, not warnings.
    assert_eq!(code(&out), 0);

    assert_eq!(code(&run(&["entity", "fixtures/entity/nope.html"])), 1);
}

#[test]
fn analyze_matches_golden_profile() {
    let out = run(&["analyze", "-i", "fixtures/content/sample_article.md"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let golden = std::fs::read_to_string(root().join("fixtures/content/sample_article.golden.json")).unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let config = "fixtures/config/geometer.toml";
    let base = ["score", "-t", "fixtures/transcripts/three_sources.json", "--brand", "Bet365"];

    // Brands come from the config file; its format is json.
    let out = run_owned(&with(&base, &["--config", config]));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    serde_json::from_str::<serde_json::Value>(&stdout(&out)).unwrap();

    // The environment variable names the same file.
    let out = geometer(&base).env("GEOMETER_CONFIG", config).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    // A flag beats the file.
    let out = geometer(&with(&base, &["-f", "csv"]).iter().map(String::as_str).collect::<Vec<_>>())
        .env("GEOMETER_CONFIG", config)
        .output()
        .unwrap();
    assert!(stdout(&out).starts_with("brand,marker_id,"));

    // --config beats the environment.
    let dir = tempfile::tempdir().unwrap();
    let csv_config = dir.path().join("csv.toml");
    let brands = root().join("fixtures/brands.json");
    std::fs::write(&csv_config, format!("brands = [{:?}]\nformat = \"csv\"\n", brands.to_str().unwrap())).unwrap();
    let out = geometer(&with(&base, &["--config", csv_config.to_str().unwrap()]).iter().map(String::as_str).collect::<Vec<_>>())
        .env("GEOMETER_CONFIG", config)
        .output()
        .unwrap();
    assert!(stdout(&out).starts_with("brand,marker_id,"), "{}", stderr(&out));
}

#[test]
fn malformed_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("format = 7\n", "format"),
        ("colour = \"red\"\n", "colour"),
        ("[bench]\nparallelism = \"many\"\n", "bench.parallelism"),
        ("[entity]\nservice_taxonomy = []\n", "entity.service_taxonomy"),
    ];
    for (i, (body, key)) in cases.into_iter().enumerate() {
        let path = dir.path().join(format!("c{i}.toml"));
        std::fs::write(&path, body).unwrap();
        let out = run(&["--config", path.to_str().unwrap(), "entity", "fixtures/entity/full.html"]);
        assert_eq!(code(&out), 1, "{body}");
        assert!(stderr(&out).contains(key), "{body}: {}", stderr(&out));
    }
}

#[test]
fn bench_report_markdown_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.jsonl");
    let store = store.to_str().unwrap();
    for clock in ["2026-03-01T12:00:00Z", "2026-03-08T12:00:00Z"] {
        let out = run(&[
            "bench", "run", "--library", "fixtures/bench/library.json", "--engine", "fixtures:fixtures/bench/engine_a",
            "--engine", "fixtures:fixtures/bench/engine_b", "--brands", "fixtures/brands.json", "--clock", clock,
            "--store", store,
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let windows = [
        "--window-a", "2026-03-01T00:00:00Z..2026-03-02T00:00:00Z", "--window-b", "2026-03-08T00:00:00Z..2026-03-09T00:00:00Z",
    ];
    let base = ["bench", "report", "--brands", "fixtures/brands.json", "--store", store];
    let out = run_owned(&with(&with(&base, &windows).iter().map(String::as_str).collect::<Vec<_>>(), &["-f", "csv"]));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("brand,engine,window,runs,citing_runs,"));
    assert!(text.contains("Bet365,engine_a,delta,,,+0.000000,"), "{text}");
    let md = run_owned(&with(&with(&base, &windows).iter().map(String::as_str).collect::<Vec<_>>(), &["-f", "md", "--engine", "engine_b"]));
    assert_eq!(code(&md), 0);
    assert!(stdout(&md).contains("engine_b"));
    assert!(!stdout(&md).contains("engine_a"));
}
