//! Round trips through the on-disk formats.

use std::path::Path;

use chrono::{Duration, TimeZone, Utc};
use proptest::prelude::*;
use sharesignal::dataset_io::{read_sample_csv, write_sample_csv};
use sharesignal::fmt::fmt_sig;
use sharesignal::prices::{parse_price_csv, write_price_csv};
use sharesignal::tweets::{parse_tweet_stream, read_daily_csv, write_daily_csv, ParseMode};
use sharesignal_core::corpus::DailySignal;
use sharesignal_core::dataset::{CollectionWindow, Column, RegressionSample, REGIME, SHARE};
use sharesignal_core::marketdata::PriceBar;
use sharesignal_core::NaiveDate;

fn day(i: usize) -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + Duration::days(i as i64)
}

proptest! {
    #[test]
    fn sig_digits_are_plain_and_close(m in -1.0f64..1.0, e in -12i32..8, digits in 6usize..=17) {
        let v = m * 10f64.powi(e);
        let s = fmt_sig(v, digits);
        prop_assert!(!s.contains('e') && !s.contains('E'), "{s}");
        let back: f64 = s.parse().unwrap();
        let tol = 0.5 * 10f64.powi(1 - digits as i32) * v.abs() * (1.0 + 1e-12) + f64::MIN_POSITIVE;
        prop_assert!((back - v).abs() <= tol, "{v} -> {s}");
    }

    #[test]
    fn daily_csv_round_trip(counts in prop::collection::vec((0u64..1000, 1u64..1000), 0..40)) {
        let signals: Vec<DailySignal> = counts
            .iter()
            .enumerate()
            .map(|(i, (m, t))| DailySignal::from_counts(day(i), (*m).min(*t), *t))
            .collect();
        let mut buf = Vec::new();
        write_daily_csv(&mut buf, &signals).unwrap();
        let back = read_daily_csv(buf.as_slice(), Path::new("d.csv")).unwrap();
        prop_assert_eq!(back, signals);
    }

    #[test]
    fn price_csv_round_trip(steps in prop::collection::vec((0.9f64..1.1, 0u64..10_000_000), 1..40)) {
        let mut p = 100.0;
        let bars: Vec<PriceBar> = steps
            .iter()
            .enumerate()
            .map(|(i, (g, vol))| {
                let open = p;
                p *= g;
                PriceBar {
                    date: day(i),
                    open,
                    high: open.max(p) * 1.01,
                    low: open.min(p) * 0.99,
                    close: p,
                    adj_close: p * 0.97,
                    volume: *vol,
                }
            })
            .collect();
        let mut buf = Vec::new();
        write_price_csv(&mut buf, &bars).unwrap();
        let back = parse_price_csv(buf.as_slice(), Path::new("p.csv")).unwrap();
        prop_assert_eq!(back.bars, bars);
        prop_assert!(back.skipped.is_empty());
    }

    #[test]
    fn sample_csv_round_trip(y in prop::collection::vec(-0.1f64..0.1, 2..60), spike in 0.0f64..0.02) {
        let n = y.len();
        let window = CollectionWindow::new(day(n / 2), day(n + 5)).unwrap();
        let dates: Vec<NaiveDate> = (0..n).map(day).collect();
        let share: Vec<f64> = (0..n).map(|i| if i >= n / 2 && i % 3 == 0 { spike / (i + 1) as f64 } else { 0.0 }).collect();
        let regime: Vec<f64> = (0..n).map(|i| (i >= n / 3) as u8 as f64).collect();
        let observed = dates.iter().map(|d| window.contains(*d)).collect();
        let sample = RegressionSample::new(
            "log_return",
            dates,
            y,
            vec![Column::new(SHARE, share), Column::new(REGIME, regime)],
            observed,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_sample_csv(&mut buf, &sample).unwrap();
        let back = read_sample_csv(buf.as_slice(), Path::new("s.csv"), "log_return", Some(window)).unwrap();
        prop_assert_eq!(back, sample);
    }

    #[test]
    fn tweet_lines_parse_back(
        tweets in prop::collection::vec((0i64..10_000_000, "[ -~]{0,40}", any::<bool>(), 0u32..100), 0..30),
        junk in 0usize..3,
    ) {
        let mut text = String::new();
        for (secs, body, rt, user) in &tweets {
            let ts = Utc.timestamp_opt(1_580_000_000 + secs, 0).unwrap();
            let line = serde_json::json!({
                "created_at": ts.to_rfc3339(),
                "text": body,
                "is_retweet": rt,
                "user_id": user.to_string(),
            });
            text.push_str(&line.to_string());
            text.push('\n');
        }
        for _ in 0..junk {
            text.push_str("{\"created_at\": 5}\n\n");
        }
        let (records, stats) = parse_tweet_stream(text.as_bytes(), ParseMode::Lenient).unwrap();
        prop_assert_eq!(records.len(), tweets.len());
        prop_assert_eq!(stats.malformed, junk as u64);
        for (r, (secs, body, rt, user)) in records.iter().zip(&tweets) {
            prop_assert_eq!(r.timestamp.timestamp(), 1_580_000_000 + secs);
            prop_assert_eq!(&r.text, body);
            prop_assert_eq!(r.is_retweet, *rt);
            prop_assert_eq!(&r.user_id, &user.to_string());
        }
        let strict = parse_tweet_stream(text.as_bytes(), ParseMode::Strict);
        prop_assert_eq!(strict.is_err(), junk > 0);
    }
}
