//! Daily price bars and log returns on the adjusted close.

use alloc::format;
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceBar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub adj_close: f64,
    pub volume: u64,
}

impl PriceBar {
    /// A bar whose OHLC fields all equal `price`.
    pub fn flat(date: NaiveDate, price: f64) -> Self {
        PriceBar {
            date,
            open: price,
            high: price,
            low: price,
            close: price,
            adj_close: price,
            volume: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prices = [self.open, self.high, self.low, self.close, self.adj_close];
        if prices.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::Domain(format!(
                "{}: prices must be finite and positive",
                self.date
            )));
        }
        if self.low > self.open.min(self.close) || self.high < self.open.max(self.close) {
            return Err(Error::Domain(format!(
                "{}: high/low range does not cover open and close",
                self.date
            )));
        }
        Ok(())
    }
}

/// Checks that bar dates strictly increase.
pub fn check_ordering(bars: &[PriceBar]) -> Result<()> {
    for w in bars.windows(2) {
        if w[1].date <= w[0].date {
            return Err(Error::Ordering {
                previous: w[0].date,
                next: w[1].date,
            });
        }
    }
    Ok(())
}

/// Date-ordered log returns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReturnSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::Argument(format!(
                "{} dates for {} returns",
                dates.len(),
                values.len()
            )));
        }
        for w in dates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Ordering {
                    previous: w[0],
                    next: w[1],
                });
            }
        }
        Ok(ReturnSeries { dates, values })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }
}

/// `r_t = ln(adj_t) - ln(adj_{t-1})`, dated at the later bar of each pair.
///
/// Bars are consecutive available observations; a gap left by a skipped row
/// is spanned by a single return.
pub fn log_returns(bars: &[PriceBar]) -> Result<ReturnSeries> {
    if bars.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: bars.len(),
        });
    }
    if let Some(bad) = bars
        .iter()
        .find(|b| !(b.adj_close > 0.0) || !b.adj_close.is_finite())
    {
        return Err(Error::Domain(format!(
            "{}: adjusted close {} is not positive",
            bad.date, bad.adj_close
        )));
    }
    check_ordering(bars)?;
    let mut dates = Vec::with_capacity(bars.len() - 1);
    let mut values = Vec::with_capacity(bars.len() - 1);
    let mut prev = libm::log(bars[0].adj_close);
    for b in &bars[1..] {
        let cur = libm::log(b.adj_close);
        dates.push(b.date);
        values.push(cur - prev);
        prev = cur;
    }
    Ok(ReturnSeries { dates, values })
}
