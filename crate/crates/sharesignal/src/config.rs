//! Run configuration: a TOML file, overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::FixedOffset;
use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};
use sharesignal_core::corpus::{CountConfig, MatchMode, TermFilter};
use sharesignal_core::dataset::{default_regime_date, CollectionWindow, SampleOptions};
use sharesignal_core::econometrics::ModelSpec;
use sharesignal_core::NaiveDate;

use crate::error::{Error, Result};
use crate::tweets::{IngestOptions, ParseMode};

/// Indices reported in this order; any others follow alphabetically.
pub const CANONICAL_INDICES: [&str; 3] = ["DJIA", "S&P500", "NASDAQ"];

/// Lag set used when the configuration names none for a canonical index.
pub fn default_lags(index: &str) -> Option<Vec<usize>> {
    match index {
        "DJIA" | "S&P500" => Some(vec![1, 7]),
        "NASDAQ" => Some(vec![1]),
        _ => None,
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DateRepr {
    Text(String),
    Toml(toml::value::Datetime),
}

fn parse_date<E: serde::de::Error>(repr: DateRepr) -> std::result::Result<NaiveDate, E> {
    let text = match repr {
        DateRepr::Text(s) => s,
        DateRepr::Toml(t) => t.to_string(),
    };
    text.parse()
        .map_err(|_| E::custom(format!("invalid date `{text}`, expected YYYY-MM-DD")))
}

fn de_date<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<NaiveDate, D::Error> {
    parse_date(DateRepr::deserialize(d)?)
}

fn de_opt_date<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<NaiveDate>, D::Error> {
    Option::<DateRepr>::deserialize(d)?.map(parse_date).transpose()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Glob patterns for newline-delimited JSON tweet files.
    pub tweet_globs: Vec<String>,
    pub keyword: String,
    /// `exact`, `prefix` or `substring`.
    pub match_mode: String,
    /// Search terms a tweet must contain; empty keeps every tweet.
    pub terms: Vec<String>,
    pub originals_only: bool,
    /// UTC offset such as `+00:00` or `-05:00` at which days begin.
    pub day_boundary: String,
    pub parse_mode: ParseMode,
    /// Ingestion threads; 0 uses every core.
    pub workers: usize,
    /// Daily signal CSV read by `build`, `fit` and `robustness`; defaults to
    /// `daily_signal.csv` in the output directory.
    pub daily_signal: Option<PathBuf>,
    pub price_files: BTreeMap<String, PathBuf>,
    #[serde(deserialize_with = "de_date")]
    pub window_start: NaiveDate,
    #[serde(deserialize_with = "de_date")]
    pub window_end: NaiveDate,
    #[serde(deserialize_with = "de_date")]
    pub regime_date: NaiveDate,
    /// Returns before this date only fill leading lags.
    #[serde(deserialize_with = "de_opt_date")]
    pub sample_start: Option<NaiveDate>,
    pub lag_sets: BTreeMap<String, Vec<usize>>,
    pub pacf_maxlag: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Directory relative paths are resolved against (the config file's).
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let window = CollectionWindow::default();
        RunConfig {
            tweet_globs: Vec::new(),
            keyword: "stock".into(),
            match_mode: MatchMode::Exact.as_str().into(),
            terms: Vec::new(),
            originals_only: false,
            day_boundary: "+00:00".into(),
            parse_mode: ParseMode::Lenient,
            workers: 0,
            daily_signal: None,
            price_files: BTreeMap::new(),
            window_start: window.start(),
            window_end: window.end(),
            regime_date: default_regime_date(),
            sample_start: None,
            lag_sets: BTreeMap::new(),
            pacf_maxlag: 10,
            seed: 0,
            output_dir: PathBuf::from("out"),
            base_dir: PathBuf::new(),
        }
    }
}

/// Command-line values that replace configuration entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub keyword: Option<String>,
    pub match_mode: Option<String>,
    pub window: Option<(NaiveDate, NaiveDate)>,
    pub regime_date: Option<NaiveDate>,
    pub lags: Vec<(String, Vec<usize>)>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

/// One index to process.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexEntry {
    pub name: String,
    pub prices: PathBuf,
    pub lags: Vec<usize>,
}

/// `2020-02-01..2020-05-02` or `2020-02-01,2020-05-02`.
pub fn parse_window(s: &str) -> Result<(NaiveDate, NaiveDate)> {
    let (a, b) = s
        .split_once("..")
        .or_else(|| s.split_once(','))
        .ok_or_else(|| Error::Config(format!("window `{s}` must look like START..END")))?;
    let date = |t: &str| {
        t.trim()
            .parse::<NaiveDate>()
            .map_err(|_| Error::Config(format!("invalid date `{t}` in window")))
    };
    Ok((date(a)?, date(b)?))
}

/// `DJIA=1,7`.
pub fn parse_lags(s: &str) -> Result<(String, Vec<usize>)> {
    let (name, list) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("lags `{s}` must look like INDEX=1,7")))?;
    let lags = list
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid lag `{t}` for {name}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name.trim().to_string(), lags))
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(k) = &o.keyword {
            self.keyword = k.clone();
        }
        if let Some(m) = &o.match_mode {
            self.match_mode = m.clone();
        }
        if let Some((a, b)) = o.window {
            self.window_start = a;
            self.window_end = b;
        }
        if let Some(d) = o.regime_date {
            self.regime_date = d;
        }
        for (name, lags) in &o.lags {
            self.lag_sets.insert(name.clone(), lags.clone());
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(out) = &o.output_dir {
            // Flags are relative to the working directory, not the config.
            self.output_dir = std::path::absolute(out).unwrap_or_else(|_| out.clone());
        }
    }

    /// Checks everything that does not touch the filesystem.
    pub fn validate(&self) -> Result<()> {
        self.match_mode()?;
        self.day_offset()?;
        self.window()?;
        if self.keyword.trim().is_empty() {
            return Err(Error::Config("keyword is empty".into()));
        }
        for (name, lags) in &self.lag_sets {
            ModelSpec::new(lags.clone(), Vec::new(), true)
                .map_err(|e| Error::Config(format!("lag set for {name}: {e}")))?;
        }
        if self.pacf_maxlag == 0 {
            return Err(Error::Config("pacf_maxlag must be at least 1".into()));
        }
        Ok(())
    }

    pub fn match_mode(&self) -> Result<MatchMode> {
        self.match_mode
            .parse()
            .map_err(|_| Error::Config(format!("unknown match mode `{}`", self.match_mode)))
    }

    pub fn day_offset(&self) -> Result<FixedOffset> {
        self.day_boundary
            .parse()
            .map_err(|_| Error::Config(format!("invalid day boundary `{}`", self.day_boundary)))
    }

    pub fn window(&self) -> Result<CollectionWindow> {
        CollectionWindow::new(self.window_start, self.window_end)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    pub fn daily_signal_path(&self) -> PathBuf {
        match &self.daily_signal {
            Some(p) => self.resolve(p),
            None => self.output_dir().join("daily_signal.csv"),
        }
    }

    pub fn tweet_patterns(&self) -> Vec<String> {
        self.tweet_globs
            .iter()
            .map(|g| self.resolve(Path::new(g)).to_string_lossy().into_owned())
            .collect()
    }

    pub fn ingest_options(&self) -> Result<IngestOptions> {
        let count = CountConfig::new(&self.keyword, self.match_mode()?)
            .with_day_boundary(self.day_offset()?)
            .originals_only(self.originals_only);
        Ok(IngestOptions {
            count,
            terms: TermFilter::new(self.terms.iter()),
            mode: self.parse_mode,
            workers: self.workers,
        })
    }

    pub fn sample_options(&self, weekdays: bool) -> Result<SampleOptions> {
        Ok(SampleOptions {
            window: self.window()?,
            regime_date: self.regime_date,
            weekdays,
            sample_start: self.sample_start,
        })
    }

    /// Configured indices in report order, each with its lag set.
    pub fn indices(&self) -> Result<Vec<IndexEntry>> {
        let mut names: Vec<&String> = self.price_files.keys().collect();
        let rank = |n: &str| CANONICAL_INDICES.iter().position(|c| *c == n).unwrap_or(usize::MAX);
        names.sort_by(|a, b| rank(a).cmp(&rank(b)).then(a.cmp(b)));
        if names.is_empty() {
            return Err(Error::Config("no price_files configured".into()));
        }
        names
            .into_iter()
            .map(|name| {
                let lags = match self.lag_sets.get(name) {
                    Some(l) => l.clone(),
                    None => default_lags(name).ok_or_else(|| {
                        Error::Config(format!("no lag set for index {name}"))
                    })?,
                };
                Ok(IndexEntry {
                    name: name.clone(),
                    prices: self.resolve(&self.price_files[name]),
                    lags,
                })
            })
            .collect()
    }

    /// SHA-256 of the effective configuration, leaving out where output goes
    /// and how many threads ingest.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output_dir");
            map.remove("workers");
        }
        let bytes = serde_json::to_vec(&value).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Fails unless every price file (and the daily signal, when
    /// `need_signal`) exists.
    pub fn check_inputs(&self, need_signal: bool) -> Result<()> {
        for entry in self.indices()? {
            if !entry.prices.is_file() {
                return Err(Error::Config(format!(
                    "price file for {} not found: {}",
                    entry.name,
                    entry.prices.display()
                )));
            }
        }
        if need_signal {
            let p = self.daily_signal_path();
            if !p.is_file() {
                return Err(Error::Config(format!("daily signal not found: {}", p.display())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_order() {
        let cfg = RunConfig::from_toml(
            r#"
            regime_date = 2020-01-20
            window_start = "2020-02-01"
            [price_files]
            NASDAQ = "n.csv"
            "S&P500" = "s.csv"
            DJIA = "d.csv"
            FTSE = "f.csv"
            [lag_sets]
            FTSE = [2]
            "#,
            Path::new("/data"),
        )
        .unwrap();
        cfg.validate().unwrap();
        let idx = cfg.indices().unwrap();
        let names: Vec<_> = idx.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["DJIA", "S&P500", "NASDAQ", "FTSE"]);
        assert_eq!(idx[0].lags, [1, 7]);
        assert_eq!(idx[2].lags, [1]);
        assert_eq!(idx[3].lags, [2]);
        assert_eq!(idx[0].prices, Path::new("/data/d.csv"));
        assert_eq!(cfg.regime_date, NaiveDate::from_ymd_opt(2020, 1, 20).unwrap());
    }

    #[test]
    fn flags_win() {
        let mut cfg = RunConfig::from_toml("keyword = \"finance\"\nseed = 3\n", Path::new(".")).unwrap();
        let h0 = cfg.hash();
        cfg.apply(&Overrides {
            keyword: Some("stock".into()),
            lags: vec![parse_lags("DJIA=1,2,7").unwrap()],
            window: Some(parse_window("2020-03-01..2020-04-01").unwrap()),
            ..Default::default()
        });
        assert_eq!(cfg.keyword, "stock");
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.lag_sets["DJIA"], [1, 2, 7]);
        assert_eq!(cfg.window_start, NaiveDate::from_ymd_opt(2020, 3, 1).unwrap());
        assert_ne!(cfg.hash(), h0);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_toml("colour = 1", Path::new(".")).is_err());
        let cfg = RunConfig::from_toml("[lag_sets]\nDJIA = [7, 1]", Path::new(".")).unwrap();
        assert!(cfg.validate().is_err());
        let cfg = RunConfig::from_toml("match_mode = \"fuzzy\"", Path::new(".")).unwrap();
        assert!(cfg.validate().is_err());
        assert!(parse_window("2020-01-01").is_err());
        assert!(parse_lags("DJIA:1").is_err());
    }

    #[test]
    fn unknown_index_needs_lags() {
        let cfg = RunConfig::from_toml("[price_files]\nFTSE = \"f.csv\"", Path::new(".")).unwrap();
        assert!(cfg.indices().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.price_files.insert("DJIA".into(), "d.csv".into());
        let back = RunConfig::from_toml(&cfg.to_toml(), Path::new("")).unwrap();
        assert_eq!(back, cfg);
    }
}
