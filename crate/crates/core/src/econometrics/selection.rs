use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::arx::{aic_value, lag_term, CONSTANT};
use super::correlation::PacfResult;
use crate::linalg;
use crate::{Error, Result};

/// AR order in `0..=pmax` minimizing AIC, each candidate fitted with a
/// constant on the common sample that drops the first `pmax` observations.
/// Ties go to the smaller order.
pub fn select_order_aic(series: &[f64], pmax: usize) -> Result<usize> {
    Ok(aic_by_order(series, pmax)?
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(best, best_aic), (p, a)| {
            if *a < best_aic {
                (p, *a)
            } else {
                (best, best_aic)
            }
        })
        .0)
}

/// AIC of the consecutive-lag AR(p) fits for `p = 0..=pmax`.
pub fn aic_by_order(series: &[f64], pmax: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n <= pmax + 2 {
        return Err(Error::InsufficientData {
            needed: pmax + 3,
            got: n,
        });
    }
    let y = &series[pmax..];
    let rows = y.len();
    let ones = vec![1.0; rows];
    let lag_cols: Vec<&[f64]> = (1..=pmax).map(|l| &series[pmax - l..n - l]).collect();
    let mut out = Vec::with_capacity(pmax + 1);
    for p in 0..=pmax {
        let mut cols: Vec<&[f64]> = Vec::with_capacity(p + 1);
        cols.push(&ones);
        cols.extend_from_slice(&lag_cols[..p]);
        if rows <= cols.len() + 1 {
            return Err(Error::SampleSize {
                nobs: rows,
                terms: cols.len(),
            });
        }
        let fit = linalg::least_squares(&cols, y).map_err(|d| Error::Collinear {
            columns: d
                .dependent
                .iter()
                .chain(d.involved.iter())
                .map(|&i| term_name(i))
                .collect(),
        })?;
        out.push(aic_value(rows, fit.rss, p + 1)?);
    }
    Ok(out)
}

fn term_name(i: usize) -> String {
    if i == 0 {
        CONSTANT.into()
    } else {
        lag_term(i)
    }
}

/// Lags up to `maxlag` whose partial autocorrelation leaves the band.
pub fn select_lags_pacf(pacf: &PacfResult, maxlag: usize) -> Vec<usize> {
    pacf.lags()
        .take_while(|(lag, _)| *lag <= maxlag)
        .filter(|(_, v)| v.abs() > pacf.band)
        .map(|(lag, _)| lag)
        .collect()
}
