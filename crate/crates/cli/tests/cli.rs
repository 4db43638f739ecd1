use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slow-ads"))
}

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn identical_files_score_one_hundred() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.txt");
    std::fs::write(&h, "the cat sat on the mat\nand then it left the room .\n").unwrap();
    for metric in ["bleu", "chrf"] {
        let o = run(&["score", "--hyp", p(&h), "--ref", p(&h), "--metric", metric]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o).trim(), "100.0");
    }
}

#[test]
fn invalid_pos_tag_is_a_usage_error() {
    let o = run(&["select", "--strategy", "pos:NOUN,XYZ", "--dicts", "d.jsonl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("XYZ"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = run(&["score", "--nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn missing_config_is_a_domain_error() {
    let o = run(&["run", "--config", "missing.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(
        err.contains("missing.toml") && err.contains("No such file"),
        "{err}"
    );
}

#[test]
fn live_config_needs_the_live_flag() {
    let cfg = repo().join("configs/live-smoke.toml");
    let o = run(&["run", "--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--live"));
}

fn demo_config(dir: &Path) -> PathBuf {
    let text = std::fs::read_to_string(repo().join("configs/mock-demo.toml")).unwrap();
    let data = repo().join("data/demo");
    let text = text
        .replace("../data/demo", p(&data))
        .replace("../target/demo-cache", p(&dir.join("cache")))
        .replace("../target/demo-out", p(&dir.join("out")));
    let path = dir.join("demo.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_then_stats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo_config(dir.path());
    let o = run(&["--config", p(&cfg), "run"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = std::fs::read_to_string(dir.path().join("out/report.tsv")).unwrap();
    assert_eq!(stdout(&o), report);
    assert_eq!(report.lines().count(), 1 + 3 * 8);

    let o = run(&[
        "stats",
        "--report",
        p(&dir.path().join("out/report.tsv")),
        "--baseline",
        "differ-rt",
        "--candidate",
        "slow",
        "--thresholds",
        "1,2,3,5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let written = std::fs::read_to_string(dir.path().join("out/stats.tsv")).unwrap();
    assert_eq!(stdout(&o), written);

    let o = run(&["--config", p(&cfg), "-v", "run"]);
    assert!(stderr(&o).contains("backend calls 0"), "{}", stderr(&o));
    let o = run(&["--config", p(&cfg), "llm", "stats"]);
    assert!(stdout(&o).starts_with("records\t"));
}

#[test]
fn seed_override_changes_the_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo_config(dir.path());
    let sample = |seed: &str| {
        let o = run(&[
            "--config",
            p(&cfg),
            "--seed",
            seed,
            "corpus",
            "validate",
            "--sample",
            "4",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o).lines().nth(1).unwrap().to_string()
    };
    assert_eq!(sample("1"), sample("1"));
    let distinct: std::collections::BTreeSet<String> =
        (0..6).map(|s| sample(&s.to_string())).collect();
    assert!(distinct.len() > 1);
}

#[test]
fn build_dict_select_and_preview() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo_config(dir.path());
    let dicts = dir.path().join("dicts.jsonl");
    let o = run(&[
        "--config",
        p(&cfg),
        "build-dict",
        "--pair",
        "spa_Latn:eng_Latn",
        "--out",
        p(&dicts),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("5 dictionaries\t0 failed"),
        "{}",
        stdout(&o)
    );

    let o = run(&[
        "--config",
        p(&cfg),
        "select",
        "--strategy",
        "slow",
        "--v",
        "2",
        "--dicts",
        p(&dicts),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 5);
    assert!(stdout(&o)
        .lines()
        .all(|l| l.split('\t').nth(2) == Some("2")));

    let o = run(&[
        "--config",
        p(&cfg),
        "select",
        "--strategy",
        "differ-rt",
        "--dicts",
        p(&dicts),
    ]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&[
        "--config",
        p(&cfg),
        "prompt",
        "preview",
        "--pair",
        "spa_Latn:eng_Latn",
        "--sentence",
        "El gato duerme.",
    ]);
    assert_eq!(
        stdout(&o).trim_end(),
        "Translate the following sentence from Spanish into English: El gato duerme."
    );
}

#[test]
fn freq_lookup_prints_rarest_token() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("f.tsv");
    std::fs::write(&table, "the\t7.7\nkitten\t3.5\n").unwrap();
    let o = run(&[
        "freq",
        "lookup",
        "--table",
        p(&table),
        "The",
        "the kitten",
        "unseen",
    ]);
    assert_eq!(stdout(&o), "The\t7.7\nthe kitten\t3.5\nunseen\t0\n");
}
