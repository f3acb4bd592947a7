//! Alignment of the daily keyword signal with trading-day returns.
//!
//! The return series defines the trading calendar. Each trading date becomes
//! one sample row unless it falls inside the collection window without a
//! recorded signal, in which case the row is dropped. Outside the window the
//! share is zero-filled.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::corpus::DailySignal;
use crate::marketdata::ReturnSeries;
use crate::{Error, Result};

pub const SHARE: &str = "share";
pub const REGIME: &str = "regime";
/// Monday to Thursday indicators; Friday is the omitted base.
pub const WEEKDAY_COLUMNS: [&str; 4] = ["mon", "tue", "wed", "thu"];

/// Inclusive date range over which tweets were collected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollectionWindow {
    start: NaiveDate,
    end: NaiveDate,
}

impl CollectionWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if end < start {
            return Err(Error::Argument(format!(
                "collection window ends ({end}) before it starts ({start})"
            )));
        }
        Ok(CollectionWindow { start, end })
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

impl Default for CollectionWindow {
    /// 2020-02-01 through 2020-05-02.
    fn default() -> Self {
        CollectionWindow {
            start: NaiveDate::from_ymd_opt(2020, 2, 1).expect("valid date"),
            end: NaiveDate::from_ymd_opt(2020, 5, 2).expect("valid date"),
        }
    }
}

/// First confirmed US COVID-19 case, 2020-01-20.
pub fn default_regime_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 20).expect("valid date")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOptions {
    pub window: CollectionWindow,
    /// The regime indicator is 1 on and after this date.
    pub regime_date: NaiveDate,
    pub weekdays: bool,
    /// Returns dated before this become presample values rather than rows.
    pub sample_start: Option<NaiveDate>,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            window: CollectionWindow::default(),
            regime_date: default_regime_date(),
            weekdays: false,
            sample_start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            values,
        }
    }
}

/// Date-aligned response and regressor columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample {
    response_name: String,
    dates: Vec<NaiveDate>,
    y: Vec<f64>,
    columns: Vec<Column>,
    /// True where the share value came from a recorded daily signal.
    observed: Vec<bool>,
    /// Responses immediately preceding the first row, oldest first.
    presample: Vec<f64>,
}

impl RegressionSample {
    pub fn new(
        response_name: impl Into<String>,
        dates: Vec<NaiveDate>,
        y: Vec<f64>,
        columns: Vec<Column>,
        observed: Vec<bool>,
    ) -> Result<Self> {
        let n = y.len();
        if dates.len() != n || observed.len() != n {
            return Err(Error::Argument(format!(
                "{} dates and {} observed flags for {} responses",
                dates.len(),
                observed.len(),
                n
            )));
        }
        for c in &columns {
            if c.values.len() != n {
                return Err(Error::Argument(format!(
                    "column `{}` has {} values, expected {}",
                    c.name,
                    c.values.len(),
                    n
                )));
            }
        }
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::Argument(format!("duplicate column `{}`", c.name)));
            }
        }
        for w in dates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Ordering {
                    previous: w[0],
                    next: w[1],
                });
            }
        }
        Ok(RegressionSample {
            response_name: response_name.into(),
            dates,
            y,
            columns,
            observed,
            presample: Vec::new(),
        })
    }

    pub fn with_presample(mut self, presample: Vec<f64>) -> Self {
        self.presample = presample;
        self
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    pub fn presample(&self) -> &[f64] {
        &self.presample
    }

    /// Keeps the rows for which `keep(index)` holds. The presample is
    /// discarded: lags of a subset are built from the subset alone.
    pub fn select_rows(&self, mut keep: impl FnMut(usize) -> bool) -> RegressionSample {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        RegressionSample {
            response_name: self.response_name.clone(),
            dates: idx.iter().map(|&i| self.dates[i]).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            columns: self
                .columns
                .iter()
                .map(|c| Column::new(c.name.clone(), idx.iter().map(|&i| c.values[i]).collect()))
                .collect(),
            observed: idx.iter().map(|&i| self.observed[i]).collect(),
            presample: Vec::new(),
        }
    }

    /// Rows dated on or after `start`.
    pub fn since(&self, start: NaiveDate) -> RegressionSample {
        let dates = &self.dates;
        self.select_rows(|i| dates[i] >= start)
    }

    pub fn with_response(&self, name: impl Into<String>, y: Vec<f64>) -> Result<RegressionSample> {
        if y.len() != self.len() {
            return Err(Error::Argument(format!(
                "{} responses for {} rows",
                y.len(),
                self.len()
            )));
        }
        let mut out = self.clone();
        out.response_name = name.into();
        out.y = y;
        Ok(out)
    }
}

/// What [`build_sample`] did to the trading calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMeta {
    pub window: CollectionWindow,
    pub regime_date: NaiveDate,
    /// In-window trading dates without a daily signal.
    pub dropped_days: Vec<NaiveDate>,
    pub zero_filled_rows: usize,
    pub observed_rows: usize,
    /// First sample date with regime = 1.
    pub first_regime_row: Option<NaiveDate>,
    pub presample_rows: usize,
}

/// Builds the regression sample for one index.
pub fn build_sample(
    response_name: &str,
    returns: &ReturnSeries,
    signal: &[DailySignal],
    options: &SampleOptions,
) -> Result<(RegressionSample, SampleMeta)> {
    if returns.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let window = CollectionWindow::new(options.window.start, options.window.end)?;
    let mut by_date = BTreeMap::new();
    for s in signal {
        if !(s.share >= 0.0) || !s.share.is_finite() {
            return Err(Error::Domain(format!("{}: share {} is negative", s.date, s.share)));
        }
        if by_date.insert(s.date, s.share).is_some() {
            return Err(Error::Argument(format!("daily signal repeats {}", s.date)));
        }
    }

    let mut presample = Vec::new();
    let mut dates = Vec::new();
    let mut y = Vec::new();
    let mut share = Vec::new();
    let mut regime = Vec::new();
    let mut observed = Vec::new();
    let mut dropped_days = Vec::new();
    for (date, r) in returns.iter() {
        if options.sample_start.is_some_and(|s| date < s) {
            presample.push(r);
            continue;
        }
        let value = if window.contains(date) {
            match by_date.get(&date) {
                Some(v) => Some(*v),
                None => {
                    dropped_days.push(date);
                    continue;
                }
            }
        } else {
            None
        };
        dates.push(date);
        y.push(r);
        share.push(value.unwrap_or(0.0));
        observed.push(value.is_some());
        regime.push(if date >= options.regime_date { 1.0 } else { 0.0 });
    }

    let mut columns = Vec::with_capacity(6);
    if options.weekdays {
        let days = [Weekday::Mon, Weekday::Tue, Weekday::Wed, Weekday::Thu];
        for (name, wd) in WEEKDAY_COLUMNS.iter().zip(days) {
            let values = dates
                .iter()
                .map(|d| if d.weekday() == wd { 1.0 } else { 0.0 })
                .collect();
            columns.push(Column::new(*name, values));
        }
    }
    columns.insert(0, Column::new(REGIME, regime));
    columns.insert(0, Column::new(SHARE, share));

    let observed_rows = observed.iter().filter(|o| **o).count();
    let first_regime_row = dates.iter().copied().find(|d| *d >= options.regime_date);
    let meta = SampleMeta {
        window,
        regime_date: options.regime_date,
        zero_filled_rows: dates.len() - observed_rows,
        observed_rows,
        dropped_days,
        first_regime_row,
        presample_rows: presample.len(),
    };
    let sample = RegressionSample::new(response_name.to_string(), dates, y, columns, observed)?
        .with_presample(presample);
    Ok((sample, meta))
}

/// Count, mean, sample standard deviation (n - 1), min and max.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableStats {
    pub name: String,
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptiveStats {
    pub variables: Vec<VariableStats>,
}

impl DescriptiveStats {
    pub fn get(&self, name: &str) -> Option<&VariableStats> {
        self.variables.iter().find(|v| v.name == name)
    }
}

/// Summary statistics of one vector, with a single Welford pass.
pub fn describe_values(name: &str, values: &[f64]) -> Result<VariableStats> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: values.len(),
        });
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
        min = min.min(v);
        max = max.max(v);
    }
    let var = (m2 / (values.len() - 1) as f64).max(0.0);
    Ok(VariableStats {
        name: name.to_string(),
        count: values.len(),
        mean,
        std_dev: libm::sqrt(var),
        min,
        max,
    })
}

/// Statistics for the response and every column of the sample.
pub fn describe(sample: &RegressionSample) -> Result<DescriptiveStats> {
    let mut variables = Vec::with_capacity(1 + sample.columns().len());
    variables.push(describe_values(sample.response_name(), sample.y())?);
    for c in sample.columns() {
        variables.push(describe_values(&c.name, &c.values)?);
    }
    Ok(DescriptiveStats { variables })
}

/// Sample standard deviation with the n - 1 denominator.
pub fn std_dev(values: &[f64]) -> Result<f64> {
    describe_values("", values).map(|s| s.std_dev)
}
