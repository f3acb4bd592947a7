//! Re-estimation of the baseline model under alternative specifications.
//!
//! Every report fits the same specification to each index sample in the
//! order the samples are given. Trailing-window and subsample variants build
//! their lags from the retained rows only.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{Duration, NaiveDate};

use crate::dataset::{RegressionSample, WEEKDAY_COLUMNS};
use crate::econometrics::{fit_arx_with, FitOptions, FitResult, ModelSpec};
use crate::{Error, Result};

/// One index's sample together with its baseline specification.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSample {
    pub name: String,
    pub sample: RegressionSample,
    pub spec: ModelSpec,
}

impl IndexSample {
    pub fn new(name: impl Into<String>, sample: RegressionSample, spec: ModelSpec) -> Self {
        IndexSample {
            name: name.into(),
            sample,
            spec,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexFit {
    pub index: String,
    pub fit: FitResult,
    /// Rows of the (possibly truncated) sample before lagging.
    pub sample_rows: usize,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub spec_name: String,
    pub fits: Vec<IndexFit>,
}

impl RobustnessReport {
    pub fn get(&self, index: &str) -> Option<&IndexFit> {
        self.fits.iter().find(|f| f.index == index)
    }
}

fn fit_all<F>(
    spec_name: &str,
    samples: &[IndexSample],
    options: FitOptions,
    mut prepare: F,
) -> Result<RobustnessReport>
where
    F: FnMut(&IndexSample) -> Result<(RegressionSample, ModelSpec)>,
{
    let mut fits = Vec::with_capacity(samples.len());
    for s in samples {
        let (sample, spec) = prepare(s)?;
        if sample.is_empty() {
            return Err(Error::SampleSize {
                nobs: 0,
                terms: spec.num_terms(),
            });
        }
        let fit = fit_arx_with(&sample, &spec, options)?;
        fits.push(IndexFit {
            index: s.name.clone(),
            sample_rows: sample.len(),
            first_date: sample.dates()[0],
            last_date: sample.dates()[sample.len() - 1],
            fit,
        });
    }
    Ok(RobustnessReport {
        spec_name: spec_name.into(),
        fits,
    })
}

/// The baseline specification on the full samples.
pub fn run_baseline(samples: &[IndexSample], options: FitOptions) -> Result<RobustnessReport> {
    fit_all("baseline", samples, options, |s| {
        Ok((s.sample.clone(), s.spec.clone()))
    })
}

/// Baseline plus Monday-Thursday indicators.
pub fn run_weekday_spec(samples: &[IndexSample], options: FitOptions) -> Result<RobustnessReport> {
    fit_all("weekday", samples, options, |s| {
        Ok((s.sample.clone(), s.spec.with_exog(&WEEKDAY_COLUMNS)?))
    })
}

/// First date of the trailing `years * 365`-day interval ending at `end`.
pub fn trailing_window_start(end: NaiveDate, years: u32) -> NaiveDate {
    end - Duration::days(365 * i64::from(years))
}

/// Rows of `sample` inside the trailing window ending at its last date.
pub fn truncate_trailing(sample: &RegressionSample, years: u32) -> Result<RegressionSample> {
    if years == 0 {
        return Err(Error::Argument("window must be at least one year".into()));
    }
    let (first, last) = match (sample.dates().first(), sample.dates().last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(Error::InsufficientData { needed: 1, got: 0 }),
    };
    let start = trailing_window_start(last, years);
    if start < first {
        return Err(Error::Argument(format!(
            "{years}-year window starts {start}, before the sample begins on {first}"
        )));
    }
    Ok(sample.since(start))
}

/// Baseline refitted on the trailing `years`-year window of each sample.
pub fn run_window_spec(
    samples: &[IndexSample],
    years: u32,
    options: FitOptions,
) -> Result<RobustnessReport> {
    let name = format!("last {years} year{}", if years == 1 { "" } else { "s" });
    fit_all(&name, samples, options, |s| {
        Ok((truncate_trailing(&s.sample, years)?, s.spec.clone()))
    })
}

/// Rows whose share comes from a recorded daily signal.
pub fn observed_subsample(sample: &RegressionSample) -> RegressionSample {
    let observed = sample.observed();
    sample.select_rows(|i| observed[i])
}

/// Exogenous columns of `spec` that take a single value on every row of
/// `sample`. With a constant in the model these cannot be estimated.
pub fn constant_regressors(sample: &RegressionSample, spec: &ModelSpec) -> Vec<String> {
    if !spec.include_constant() {
        return Vec::new();
    }
    spec.exog()
        .iter()
        .filter(|name| {
            sample
                .column(name)
                .is_some_and(|v| v.iter().all(|x| *x == v[0]))
        })
        .cloned()
        .collect()
}

/// Baseline refitted on the observed-signal days only. Regressors constant
/// on those days (the regime indicator inside the collection window) are
/// dropped.
pub fn run_nonzero_subsample(
    samples: &[IndexSample],
    options: FitOptions,
) -> Result<RobustnessReport> {
    fit_all("observed-signal subsample", samples, options, |s| {
        let sub = observed_subsample(&s.sample);
        let spec = s.spec.without_exog(&constant_regressors(&sub, &s.spec))?;
        if sub.len() <= spec.num_terms() {
            return Err(Error::SampleSize {
                nobs: sub.len(),
                terms: spec.num_terms(),
            });
        }
        Ok((sub, spec))
    })
}
