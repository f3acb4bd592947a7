//! A self-contained synthetic input set with known coefficients.
//!
//! The fixture covers the trading calendar from 2010-05-03 to 2020-05-01,
//! writes one price file per index, a daily signal for the collection
//! window and a `config.toml` that points at them.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sharesignal_core::calendar::us_trading_days;
use sharesignal_core::corpus::DailySignal;
use sharesignal_core::dataset::{CollectionWindow, REGIME, SHARE};
use sharesignal_core::marketdata::PriceBar;
use sharesignal_core::synth::{generate_with_signal, spike_signal, GeneratorSpec, SignalShape};
use sharesignal_core::NaiveDate;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::pipeline::{slug, write_file, write_json, write_text};
use crate::prices::write_price_csv;
use crate::tweets::write_daily_csv;

/// Mention counts per day are expressed out of this many tweets.
pub const TWEETS_PER_DAY: u64 = 1_000_000_000;

/// Generating values for one index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexTruth {
    pub index: String,
    pub intercept: f64,
    pub lags: Vec<(usize, f64)>,
    pub share: f64,
    pub regime: f64,
    pub noise_sd: f64,
    pub start_price: f64,
    pub seed: u64,
}

impl IndexTruth {
    pub fn lag_orders(&self) -> Vec<usize> {
        self.lags.iter().map(|l| l.0).collect()
    }
}

/// The three default indices and their generating coefficients.
pub fn default_truth(seed: u64) -> Vec<IndexTruth> {
    let truth = |i: u64, index: &str, intercept, lags: &[(usize, f64)], share, regime, noise_sd, start_price| {
        IndexTruth {
            index: index.into(),
            intercept,
            lags: lags.to_vec(),
            share,
            regime,
            noise_sd,
            start_price,
            seed: seed.wrapping_mul(1_000).wrapping_add(i),
        }
    };
    vec![
        truth(1, "DJIA", 4e-4, &[(1, -0.148), (7, 0.121)], -1.268, 0.000, 0.0108, 11_000.0),
        truth(2, "S&P500", 4e-4, &[(1, -0.151), (7, 0.104)], -1.310, 0.001, 0.0109, 1_200.0),
        truth(3, "NASDAQ", 6e-4, &[(1, -0.127)], -1.264, 0.002, 0.0121, 2_400.0),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureOptions {
    pub seed: u64,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    pub window: CollectionWindow,
    pub regime_date: NaiveDate,
    /// In-window trading days left out of the daily signal.
    pub missing_days: Vec<NaiveDate>,
    pub truth: Vec<IndexTruth>,
}

impl FixtureOptions {
    pub fn new(seed: u64) -> Self {
        let base = RunConfig::default();
        FixtureOptions {
            seed,
            first_date: NaiveDate::from_ymd_opt(2010, 5, 3).expect("valid date"),
            last_date: NaiveDate::from_ymd_opt(2020, 5, 1).expect("valid date"),
            window: CollectionWindow::new(base.window_start, base.window_end).expect("default window"),
            regime_date: base.regime_date,
            missing_days: vec![NaiveDate::from_ymd_opt(2020, 3, 18).expect("valid date")],
            truth: default_truth(seed),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureTruth {
    pub seed: u64,
    pub price_days: usize,
    pub window_days: usize,
    pub missing_days: Vec<NaiveDate>,
    pub indices: Vec<IndexTruth>,
}

/// Files written by [`write_fixture`].
#[derive(Debug, Clone)]
pub struct Fixture {
    pub config: PathBuf,
    pub truth: FixtureTruth,
}

/// Prices that compound the generated log returns, with a flat first bar.
fn price_path(dates: &[NaiveDate], returns: &[f64], start: f64) -> Vec<PriceBar> {
    let mut bars = vec![PriceBar::flat(dates[0], start)];
    let mut prev = start;
    for (d, r) in dates[1..].iter().zip(returns) {
        let close = prev * r.exp();
        bars.push(PriceBar {
            date: *d,
            open: prev,
            high: prev.max(close),
            low: prev.min(close),
            close,
            adj_close: close,
            volume: 1_000_000,
        });
        prev = close;
    }
    bars
}

/// Generates the fixture under `dir`.
pub fn write_fixture(dir: &Path, options: &FixtureOptions) -> Result<Fixture> {
    let dates = us_trading_days(options.first_date, options.last_date);
    if dates.len() < 2 {
        return Err(Error::Config("fixture calendar has fewer than two days".into()));
    }
    let return_dates = &dates[1..];
    let in_window: Vec<usize> = (0..return_dates.len())
        .filter(|&i| options.window.contains(return_dates[i]))
        .collect();
    let (Some(&first), Some(&last)) = (in_window.first(), in_window.last()) else {
        return Err(Error::Config("collection window has no trading days".into()));
    };
    let shape = SignalShape {
        window_start: first,
        window_length: last - first + 1,
        ..SignalShape::sparse_tail(return_dates.len())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut share = spike_signal(return_dates.len(), &shape, &mut rng);
    let mut signals = Vec::new();
    for &i in &in_window {
        let date = return_dates[i];
        let mentions = (share[i] * TWEETS_PER_DAY as f64).round() as u64;
        if options.missing_days.contains(&date) {
            share[i] = 0.0;
            continue;
        }
        let s = DailySignal::from_counts(date, mentions, TWEETS_PER_DAY);
        share[i] = s.share;
        signals.push(s);
    }

    let signal_path = dir.join("daily_signal.csv");
    write_file(&signal_path, |w| write_daily_csv(w, &signals).map_err(|e| Error::csv(&signal_path, e)))?;

    let mut cfg = RunConfig {
        daily_signal: Some("daily_signal.csv".into()),
        window_start: options.window.start(),
        window_end: options.window.end(),
        regime_date: options.regime_date,
        seed: options.seed,
        ..RunConfig::default()
    };
    for t in &options.truth {
        let mut spec = GeneratorSpec::new(return_dates.len(), t.seed)
            .with_lags(&t.lags)
            .with_beta(SHARE, t.share)
            .with_beta(REGIME, t.regime);
        spec.intercept = t.intercept;
        spec.noise_sd = t.noise_sd;
        spec.regime_date = options.regime_date;
        spec.signal = shape;
        let generated = generate_with_signal(&spec, return_dates.to_vec(), share.clone())?;
        let bars = price_path(&dates, generated.sample.y(), t.start_price);
        let rel = PathBuf::from("prices").join(format!("{}.csv", slug(&t.index)));
        let path = dir.join(&rel);
        write_file(&path, |w| write_price_csv(w, &bars).map_err(|e| Error::csv(&path, e)))?;
        cfg.price_files.insert(t.index.clone(), rel);
        cfg.lag_sets.insert(t.index.clone(), t.lag_orders());
    }

    let truth = FixtureTruth {
        seed: options.seed,
        price_days: dates.len(),
        window_days: in_window.len(),
        missing_days: options.missing_days.clone(),
        indices: options.truth.clone(),
    };
    write_json(&dir.join("truth.json"), &truth)?;
    let config = dir.join("config.toml");
    write_text(&config, &cfg.to_toml())?;
    Ok(Fixture { config, truth })
}
