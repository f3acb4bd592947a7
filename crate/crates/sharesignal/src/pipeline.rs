//! End-to-end stages behind the command-line subcommands.
//!
//! Every stage reads the effective [`RunConfig`], writes its artifacts under
//! the output directory and tags failures with its own name.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sharesignal_core::corpus::DailySignal;
use sharesignal_core::dataset::{build_sample, describe, RegressionSample, SampleMeta, REGIME, SHARE};
use sharesignal_core::econometrics::{
    aic_by_order, pacf, select_lags_pacf, standardized_effect, FitOptions, ModelSpec,
};
use sharesignal_core::marketdata::{log_returns, ReturnSeries};
use sharesignal_core::robustness::{
    constant_regressors, observed_subsample, run_baseline, run_nonzero_subsample,
    run_weekday_spec, run_window_spec, IndexSample, RobustnessReport,
};
use sharesignal_core::NaiveDate;

use crate::config::{IndexEntry, RunConfig};
use crate::dataset_io::{write_figure_csv, write_sample_csv, SampleSidecar};
use crate::error::{Error, Result};
use crate::prices::{parse_price_csv, write_returns_csv};
use crate::report::{effect_lines, render_descriptive, render_table, Labels, TableReport};
use crate::tweets::{expand_globs, ingest_files, read_daily_csv, write_daily_csv, FileStats, StreamStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    IngestTweets,
    IngestPrices,
    Build,
    Fit,
    Robustness,
    Synth,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::IngestTweets => "ingest-tweets",
            Stage::IngestPrices => "ingest-prices",
            Stage::Build => "build",
            Stage::Fit => "fit",
            Stage::Robustness => "robustness",
            Stage::Synth => "synth",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

pub type StageResult<T> = std::result::Result<T, StageError>;

trait AtStage<T> {
    fn at(self, stage: Stage) -> StageResult<T>;
}

impl<T, E: Into<Error>> AtStage<T> for std::result::Result<T, E> {
    fn at(self, stage: Stage) -> StageResult<T> {
        self.map_err(|e| StageError {
            stage,
            source: e.into(),
        })
    }
}

/// File-name form of an index name: `S&P500` becomes `sp500`.
pub fn slug(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Writes `path` through a buffered writer, creating parent directories.
pub(crate) fn write_file<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    write_file(path, |w| w.write_all(text.as_bytes()).map_err(|e| Error::io(path, e)))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestLog {
    pub config_hash: String,
    pub keyword: String,
    pub match_mode: String,
    pub terms: Vec<String>,
    pub files: Vec<FileStats>,
    pub totals: StreamStats,
    pub counted: u64,
    pub days: usize,
}

/// Reads the tweet files and writes the daily signal and an ingestion log.
pub fn ingest_tweets(cfg: &RunConfig) -> StageResult<IngestLog> {
    let stage = Stage::IngestTweets;
    let options = cfg.ingest_options().at(stage)?;
    let paths = expand_globs(&cfg.tweet_patterns()).at(stage)?;
    let report = ingest_files(&paths, &options).at(stage)?;
    let signals = report.signals();
    let out = cfg.daily_signal_path();
    write_file(&out, |w| write_daily_csv(w, &signals).map_err(|e| Error::csv(&out, e))).at(stage)?;
    let log = IngestLog {
        config_hash: cfg.hash(),
        keyword: cfg.keyword.clone(),
        match_mode: cfg.match_mode.clone(),
        terms: cfg.terms.clone(),
        totals: report.totals(),
        counted: report.files.iter().map(|f| f.counted).sum(),
        files: report.files,
        days: signals.len(),
    };
    write_json(&cfg.output_dir().join("ingest_log.json"), &log).at(stage)?;
    Ok(log)
}

#[derive(Debug, Clone)]
pub struct IndexReturns {
    pub entry: IndexEntry,
    pub returns: ReturnSeries,
    pub skipped: Vec<NaiveDate>,
}

fn load_returns(cfg: &RunConfig, stage: Stage) -> StageResult<Vec<IndexReturns>> {
    cfg.indices()
        .at(stage)?
        .into_iter()
        .map(|entry| {
            let file = File::open(&entry.prices).map_err(|e| Error::io(&entry.prices, e)).at(stage)?;
            let parsed = parse_price_csv(file, &entry.prices).at(stage)?;
            let returns = log_returns(&parsed.bars)
                .map_err(|e| Error::format(&entry.prices, e.to_string()))
                .at(stage)?;
            Ok(IndexReturns {
                entry,
                returns,
                skipped: parsed.skipped,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PriceLog {
    pub index: String,
    pub source: PathBuf,
    pub returns: usize,
    pub skipped_rows: Vec<NaiveDate>,
}

/// Converts each price file to `returns_<index>.csv`.
pub fn ingest_prices(cfg: &RunConfig) -> StageResult<Vec<PriceLog>> {
    let stage = Stage::IngestPrices;
    cfg.check_inputs(false).at(stage)?;
    let out = cfg.output_dir();
    let mut logs = Vec::new();
    for r in load_returns(cfg, stage)? {
        let path = out.join(format!("returns_{}.csv", slug(&r.entry.name)));
        write_file(&path, |w| write_returns_csv(w, &r.returns).map_err(|e| Error::csv(&path, e)))
            .at(stage)?;
        logs.push(PriceLog {
            index: r.entry.name.clone(),
            source: r.entry.prices.clone(),
            returns: r.returns.len(),
            skipped_rows: r.skipped,
        });
    }
    write_json(&out.join("prices_log.json"), &logs).at(stage)?;
    Ok(logs)
}

/// A built regression sample with its provenance.
#[derive(Debug, Clone)]
pub struct BuiltSample {
    pub entry: IndexEntry,
    pub sample: RegressionSample,
    pub meta: SampleMeta,
    pub skipped_prices: Vec<NaiveDate>,
}

impl BuiltSample {
    pub fn baseline_spec(&self) -> Result<ModelSpec> {
        Ok(ModelSpec::arx(&self.entry.lags, &[SHARE, REGIME])?)
    }

    fn index_sample(&self) -> Result<IndexSample> {
        Ok(IndexSample::new(&self.entry.name, self.sample.clone(), self.baseline_spec()?))
    }
}

fn read_signal(cfg: &RunConfig, stage: Stage) -> StageResult<Vec<DailySignal>> {
    let path = cfg.daily_signal_path();
    let file = File::open(&path).map_err(|e| Error::io(&path, e)).at(stage)?;
    read_daily_csv(file, &path).at(stage)
}

/// Builds every index sample, with weekday columns, in memory.
pub fn build_samples(cfg: &RunConfig, stage: Stage) -> StageResult<Vec<BuiltSample>> {
    cfg.validate().at(Stage::Config)?;
    cfg.check_inputs(true).at(stage)?;
    let signal = read_signal(cfg, stage)?;
    let options = cfg.sample_options(true).at(stage)?;
    load_returns(cfg, stage)?
        .into_iter()
        .map(|r| {
            let (sample, meta) = build_sample(&r.entry.name, &r.returns, &signal, &options).at(stage)?;
            Ok(BuiltSample {
                entry: r.entry,
                sample,
                meta,
                skipped_prices: r.skipped,
            })
        })
        .collect()
}

fn labels(cfg: &RunConfig) -> Labels {
    Labels {
        keyword: cfg.keyword.clone(),
        regime_date: cfg.regime_date,
    }
}

/// Writes sample CSVs with sidecars, figure data and the descriptive table.
pub fn build(cfg: &RunConfig) -> StageResult<Vec<BuiltSample>> {
    let stage = Stage::Build;
    let samples = build_samples(cfg, stage)?;
    let out = cfg.output_dir();
    let hash = cfg.hash();
    for b in &samples {
        let s = slug(&b.entry.name);
        let csv_path = out.join(format!("sample_{s}.csv"));
        write_file(&csv_path, |w| write_sample_csv(w, &b.sample).map_err(|e| Error::csv(&csv_path, e)))
            .at(stage)?;
        let sidecar = SampleSidecar::new(&b.entry.name, &b.sample, &b.meta, b.skipped_prices.clone(), &hash);
        write_json(&out.join(format!("sample_{s}.json")), &sidecar).at(stage)?;
        write_file(&out.join(format!("figure_{s}.csv")), |w| write_figure_csv(w, &b.sample)).at(stage)?;
    }
    write_text(&out.join("table1.txt"), &descriptive_table(cfg, &samples).at(stage)?).at(stage)?;
    Ok(samples)
}

fn descriptive_table(cfg: &RunConfig, samples: &[BuiltSample]) -> Result<String> {
    let stats = samples
        .iter()
        .map(|b| describe(&b.sample))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for (b, st) in samples.iter().zip(&stats) {
        rows.push((format!("Log returns of {}", b.entry.name), st, b.sample.response_name()));
    }
    if let Some(first) = stats.first() {
        let l = labels(cfg);
        rows.push((l.term(SHARE), first, SHARE));
        rows.push((l.term(REGIME), first, REGIME));
    }
    let title = match samples.first().and_then(|b| Some((b.sample.dates().first()?, b.sample.dates().last()?))) {
        Some((a, z)) => format!("Descriptive statistics, {a} to {z}"),
        None => "Descriptive statistics".into(),
    };
    let mut text = render_descriptive(&title, &rows);
    text.push_str(&format!("config sha256 {}\n", cfg.hash()));
    Ok(text)
}

#[derive(Debug, Clone, Serialize)]
pub struct PacfReport {
    pub index: String,
    pub nobs: usize,
    pub maxlag: usize,
    pub band: f64,
    pub values: Vec<f64>,
    pub lags_outside_band: Vec<usize>,
    pub aic_by_order: Vec<f64>,
    pub configured_lags: Vec<usize>,
}

/// Fits each index on its own thread; results keep the input order.
fn fit_parallel<F>(samples: &[IndexSample], f: F) -> Result<RobustnessReport>
where
    F: Fn(&[IndexSample]) -> sharesignal_core::Result<RobustnessReport> + Sync,
{
    let parts: Vec<sharesignal_core::Result<RobustnessReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = samples
            .iter()
            .map(|s| scope.spawn(|| f(std::slice::from_ref(s))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("fit thread panicked")).collect()
    });
    let mut fits = Vec::new();
    let mut spec_name = String::new();
    for p in parts {
        let r = p?;
        spec_name = r.spec_name;
        fits.extend(r.fits);
    }
    Ok(RobustnessReport { spec_name, fits })
}

fn fit_options(cfg: &RunConfig) -> FitOptions {
    FitOptions {
        use_presample: cfg.sample_start.is_some(),
    }
}

#[derive(Debug, Clone)]
pub struct FitOutput {
    pub report: RobustnessReport,
    pub effects: Vec<Option<f64>>,
}

/// PACF diagnostics, baseline fits and the coefficient table as text and JSON.
pub fn fit(cfg: &RunConfig) -> StageResult<FitOutput> {
    let stage = Stage::Fit;
    let samples = build_samples(cfg, stage)?;
    let out = cfg.output_dir();
    let hash = cfg.hash();

    let mut diagnostics = Vec::new();
    for b in &samples {
        let y = b.sample.y();
        let maxlag = cfg.pacf_maxlag.min(y.len().saturating_sub(1) / 2);
        let p = pacf(y, maxlag).at(stage)?;
        diagnostics.push(PacfReport {
            index: b.entry.name.clone(),
            nobs: p.nobs,
            maxlag,
            band: p.band,
            lags_outside_band: select_lags_pacf(&p, maxlag),
            aic_by_order: aic_by_order(y, maxlag).at(stage)?,
            values: p.values,
            configured_lags: b.entry.lags.clone(),
        });
    }
    write_json(&out.join("pacf.json"), &diagnostics).at(stage)?;

    let inputs = samples
        .iter()
        .map(BuiltSample::index_sample)
        .collect::<Result<Vec<_>>>()
        .at(stage)?;
    let options = fit_options(cfg);
    let report = fit_parallel(&inputs, |s| run_baseline(s, options)).at(stage)?;
    let effects: Vec<Option<f64>> = report
        .fits
        .iter()
        .zip(&samples)
        .map(|(f, b)| standardized_effect(&f.fit, &b.sample, SHARE).ok())
        .collect();

    let title = "Model of daily log returns";
    let mut text = render_table(title, &report.fits, &labels(cfg), &hash);
    let named: Vec<(&str, f64)> = report
        .fits
        .iter()
        .zip(&effects)
        .filter_map(|(f, e)| e.map(|e| (f.index.as_str(), e)))
        .collect();
    if !named.is_empty() {
        text.push('\n');
        let names: Vec<&str> = named.iter().map(|(n, _)| *n).collect();
        let values: Vec<f64> = named.iter().map(|(_, e)| *e).collect();
        text.push_str(&effect_lines(&names, &values));
    }
    write_text(&out.join("table2.txt"), &text).at(stage)?;
    write_json(&out.join("table2.json"), &TableReport::new(title, &report, &effects, &hash)).at(stage)?;
    Ok(FitOutput { report, effects })
}

#[derive(Debug, Clone)]
pub struct RobustnessOutput {
    pub weekday: RobustnessReport,
    pub five_year: RobustnessReport,
    pub one_year: RobustnessReport,
    pub subsample: RobustnessReport,
    /// Per index, regressors dropped from the subsample fit.
    pub subsample_dropped: Vec<Vec<String>>,
}

/// Weekday, trailing-window and observed-signal subsample reports.
pub fn robustness(cfg: &RunConfig) -> StageResult<RobustnessOutput> {
    let stage = Stage::Robustness;
    let samples = build_samples(cfg, stage)?;
    let inputs = samples
        .iter()
        .map(BuiltSample::index_sample)
        .collect::<Result<Vec<_>>>()
        .at(stage)?;
    let options = fit_options(cfg);
    let out = cfg.output_dir();
    let hash = cfg.hash();
    let labels = labels(cfg);

    let weekday = fit_parallel(&inputs, |s| run_weekday_spec(s, options)).at(stage)?;
    let five_year = fit_parallel(&inputs, |s| run_window_spec(s, 5, options)).at(stage)?;
    let one_year = fit_parallel(&inputs, |s| run_window_spec(s, 1, options)).at(stage)?;
    let subsample = fit_parallel(&inputs, |s| run_nonzero_subsample(s, options)).at(stage)?;
    let subsample_dropped: Vec<Vec<String>> = inputs
        .iter()
        .map(|s| constant_regressors(&observed_subsample(&s.sample), &s.spec))
        .collect();

    let tables = [
        ("tableA1", "Model of daily log returns with weekday indicators", &weekday),
        ("tableA2", "Model of daily log returns, last 5 years", &five_year),
        ("tableA3", "Model of daily log returns, last 1 year", &one_year),
        ("subsample", "Model of daily log returns, observed-signal days only", &subsample),
    ];
    for (file, title, report) in tables {
        let mut text = render_table(title, &report.fits, &labels, &hash);
        if file == "subsample" {
            for (f, dropped) in report.fits.iter().zip(&subsample_dropped) {
                if !dropped.is_empty() {
                    text.push_str(&format!(
                        "{}: constant on these days and omitted: {}\n",
                        f.index,
                        dropped.join(", ")
                    ));
                }
            }
        }
        write_text(&out.join(format!("{file}.txt")), &text).at(stage)?;
        write_json(&out.join(format!("{file}.json")), &TableReport::new(title, report, &[], &hash))
            .at(stage)?;
    }
    Ok(RobustnessOutput {
        weekday,
        five_year,
        one_year,
        subsample,
        subsample_dropped,
    })
}

/// Build, fit and robustness in sequence.
pub fn report(cfg: &RunConfig) -> StageResult<()> {
    build(cfg)?;
    fit(cfg)?;
    robustness(cfg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("S&P500"), "sp500");
        assert_eq!(slug("DJIA"), "djia");
    }
}
