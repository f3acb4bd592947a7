//! End-to-end runs of the command-line binary on generated inputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sharesignal::synth_fixture::{write_fixture, FixtureOptions};
use sharesignal_core::NaiveDate;

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharesignal"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = bin(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn term<'a>(fit: &'a Value, name: &str) -> Option<&'a Value> {
    fit["terms"].as_array().unwrap().iter().find(|t| t["term"] == name)
}

#[test]
fn report_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["synth", "--dir", "fx", "--seed", "3"]);
    ok(tmp.path(), &["report", "--config", "fx/config.toml", "--out", "run1"]);
    ok(tmp.path(), &["report", "--config", "fx/config.toml", "--out", "run2"]);
    let a = read_dir(&tmp.path().join("run1"));
    let b = read_dir(&tmp.path().join("run2"));
    assert!(a.len() >= 20);
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    for (name, bytes) in &a {
        assert_eq!(bytes, &b[name], "{name}");
    }
    ok(tmp.path(), &["report", "--config", "fx/config.toml", "--out", "run1"]);
    ok(tmp.path(), &["report", "--config", "fx/config.toml", "--out", "run2"]);
    let a = read_dir(&tmp.path().join("run1"));
    let b = read_dir(&tmp.path().join("run2"));
    assert!(a.len() >= 20);
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    for (name, bytes) in &a {
        let other = &b[name];
        if name.ends_with(".json") || name.ends_with(".txt") {
            // Only the config hash differs, since the output directory is part of it.
            let strip = |v: &[u8]| {
                String::from_utf8_lossy(v)
                    .lines()
                    .filter(|l| !l.contains("sha256") && !l.contains("config_hash"))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            assert_eq!(strip(bytes), strip(other), "{name}");
        } else {
            assert_eq!(bytes, other, "{name}");
        }
    }
    ok(tmp.path(), &["report", "--config", "fx/config.toml", "--out", "run1"]);
    assert_eq!(read_dir(&tmp.path().join("run1")), a);
}

#[test]
fn synthetic_fit_recovers_truth() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = write_fixture(tmp.path(), &FixtureOptions::new(11)).unwrap();
    let config = fixture.config.to_str().unwrap();
    let stdout = ok(tmp.path(), &["fit", "--config", config]);
    assert!(stdout.contains("Observations"));
    let table = json(&tmp.path().join("out/table2.json"));
    let fits = table["indices"].as_array().unwrap();
    assert_eq!(fits.len(), 3);
    for (truth, fit) in fixture.truth.indices.iter().zip(fits) {
        assert_eq!(fit["index"], truth.index.as_str());
        let mut expect = vec![("const".to_string(), truth.intercept)];
        expect.extend(truth.lags.iter().map(|(l, c)| (format!("ar{l}"), *c)));
        expect.push(("share".into(), truth.share));
        expect.push(("regime".into(), truth.regime));
        for (name, want) in expect {
            let t = term(fit, &name).unwrap_or_else(|| panic!("{} lacks {name}", truth.index));
            let got = t["coefficient"].as_f64().unwrap();
            let se = t["std_error"].as_f64().unwrap();
            assert!((got - want).abs() < 3.0 * se, "{} {name}: {got} vs {want} (se {se})", truth.index);
        }
    }
    ok(tmp.path(), &["build", "--config", config]);
    let sidecar = json(&tmp.path().join("out/sample_djia.json"));
    assert_eq!(sidecar["rows"], 2516);
    assert_eq!(sidecar["observed_rows"], 62);
    assert_eq!(sidecar["dropped_days"][0], "2020-03-18");
    assert_eq!(sidecar["first_regime_row"], "2020-01-21");
}

#[test]
fn robustness_tables_have_expected_terms() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["synth", "--dir", "."]);
    ok(tmp.path(), &["robustness", "--config", "config.toml"]);
    let out = tmp.path().join("out");
    let base_terms = |index: usize| if index == 2 { 4 } else { 5 };
    let weekday = json(&out.join("tableA1.json"));
    for (i, fit) in weekday["indices"].as_array().unwrap().iter().enumerate() {
        assert_eq!(fit["terms"].as_array().unwrap().len(), base_terms(i) + 4);
        for d in ["mon", "tue", "wed", "thu"] {
            assert!(term(fit, d).is_some());
        }
    }
    let five = json(&out.join("tableA2.json"));
    let one = json(&out.join("tableA3.json"));
    for (f5, f1) in five["indices"].as_array().unwrap().iter().zip(one["indices"].as_array().unwrap()) {
        let rows5 = f5["sample_rows"].as_u64().unwrap();
        let rows1 = f1["sample_rows"].as_u64().unwrap();
        assert!((1257..=1261).contains(&rows5), "{rows5}");
        assert!((251..=256).contains(&rows1), "{rows1}");
    }
    let sub = json(&out.join("subsample.json"));
    for fit in sub["indices"].as_array().unwrap() {
        assert_eq!(fit["sample_rows"], 62);
        assert!(term(fit, "regime").is_none());
        assert!(term(fit, "share").is_some());
    }
    let text = fs::read_to_string(out.join("subsample.txt")).unwrap();
    assert!(text.contains("omitted: regime"));
}

fn tweet(ts: &str, text: &str) -> String {
    serde_json::json!({"created_at": ts, "text": text, "is_retweet": false, "user_id": "u1"}).to_string()
}

#[test]
fn sharded_ingestion_matches_single_file() {
    let tmp = tempfile::tempdir().unwrap();
    let lines: Vec<String> = (0..400)
        .map(|i| {
            let text = if i % 3 == 0 { "the stock fell" } else { "markets today" };
            tweet(&format!("2020-02-{:02}T{:02}:15:00Z", 1 + i % 20, i % 24), text)
        })
        .collect();
    fs::write(tmp.path().join("a.jsonl"), lines[..150].join("\n")).unwrap();
    fs::write(tmp.path().join("b.jsonl"), lines[150..].join("\n") + "\nnot json\n").unwrap();
    fs::write(tmp.path().join("all.jsonl"), lines.join("\n") + "\nnot json\n").unwrap();

    ok(tmp.path(), &["ingest-tweets", "a.jsonl", "b.jsonl", "--out", "two", "--workers", "2"]);
    let stdout = ok(tmp.path(), &["ingest-tweets", "all.jsonl", "--out", "one"]);
    assert!(stdout.contains("1 malformed"), "{stdout}");
    let two = fs::read(tmp.path().join("two/daily_signal.csv")).unwrap();
    let one = fs::read(tmp.path().join("one/daily_signal.csv")).unwrap();
    assert_eq!(two, one);
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert!(text.starts_with("date,mention_count,tweet_count,share\n"));

    ok(tmp.path(), &["ingest-tweets", "all.jsonl", "--out", "other", "--keyword", "markets"]);
    assert_ne!(fs::read(tmp.path().join("other/daily_signal.csv")).unwrap(), two);

    let strict = tmp.path().join("strict.toml");
    fs::write(&strict, "parse_mode = \"strict\"\ntweet_globs = [\"all.jsonl\"]\n").unwrap();
    let out = bin(tmp.path(), &["ingest-tweets", "--config", "strict.toml"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("[ingest-tweets]"));
}

#[test]
fn missing_price_file_fails_with_stage_tag() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("config.toml"),
        "daily_signal = \"signal.csv\"\n[price_files]\nDJIA = \"nope.csv\"\n",
    )
    .unwrap();
    let out = bin(tmp.path(), &["build", "--config", "config.toml"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[build]") && err.contains("nope.csv"), "{err}");

    let out = bin(tmp.path(), &["fit", "--match-mode", "fuzzy"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("[config]"));

    fs::write(tmp.path().join("bad.toml"), "no_such_key = 1\n").unwrap();
    let out = bin(tmp.path(), &["build", "--config", "bad.toml"]);
    assert!(!out.status.success());
}

#[test]
fn short_history_rejects_five_year_window() {
    let tmp = tempfile::tempdir().unwrap();
    let options = FixtureOptions {
        first_date: NaiveDate::from_ymd_opt(2017, 1, 3).unwrap(),
        ..FixtureOptions::new(1)
    };
    let fixture = write_fixture(tmp.path(), &options).unwrap();
    let config = fixture.config.to_str().unwrap();
    ok(tmp.path(), &["fit", "--config", config]);
    let out = bin(tmp.path(), &["robustness", "--config", config]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[robustness]") && err.contains("5-year window"), "{err}");
}

#[test]
fn flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["synth", "--dir", "."]);
    ok(
        tmp.path(),
        &["fit", "--config", "config.toml", "--lags", "DJIA=1", "--regime-date", "2020-02-24", "--keyword", "virus"],
    );
    let table = json(&tmp.path().join("out/table2.json"));
    let djia = &table["indices"][0];
    assert!(term(djia, "ar7").is_none() && term(djia, "ar1").is_some());
    let text = fs::read_to_string(tmp.path().join("out/table2.txt")).unwrap();
    assert!(text.contains("Date on or after 2020-02-24"));
    assert!(text.contains("Share of \"virus\" mentions"));
}

#[test]
fn ingest_prices_writes_returns() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["synth", "--dir", "."]);
    let stdout = ok(tmp.path(), &["ingest-prices", "--config", "config.toml"]);
    assert!(stdout.contains("DJIA: 2517 returns"), "{stdout}");
    let returns = fs::read_to_string(tmp.path().join("out/returns_sp500.csv")).unwrap();
    assert_eq!(returns.lines().count(), 2518);
    assert!(returns.starts_with("date,log_return\n2010-05-04,"));
}
