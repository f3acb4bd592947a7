use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Sample autocorrelations at lags `1..=maxlag`.
///
/// Autocovariances are mean-removed cross-product sums divided by `n`.
pub fn acf(series: &[f64], maxlag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if maxlag == 0 {
        return Err(Error::Argument("maxlag must be at least 1".into()));
    }
    if n <= maxlag {
        return Err(Error::InsufficientData {
            needed: maxlag + 1,
            got: n,
        });
    }
    let gamma = autocovariances(series, maxlag);
    if gamma[0] == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(gamma[1..].iter().map(|g| g / gamma[0]).collect())
}

/// Biased autocovariances at lags `0..=maxlag`.
pub(crate) fn autocovariances(series: &[f64], maxlag: usize) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    (0..=maxlag)
        .map(|k| {
            centered[k..]
                .iter()
                .zip(&centered[..n - k])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacfResult {
    /// `values[i]` is the partial autocorrelation at lag `i + 1`.
    pub values: Vec<f64>,
    /// Approximate 95% band, `1.96 / sqrt(n)`.
    pub band: f64,
    pub nobs: usize,
}

impl PacfResult {
    pub fn lags(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (i + 1, *v))
    }
}

/// Partial autocorrelations by the Durbin-Levinson recursion on [`acf`].
pub fn pacf(series: &[f64], maxlag: usize) -> Result<PacfResult> {
    let n = series.len();
    if 2 * maxlag >= n {
        return Err(Error::Argument(format!(
            "maxlag {maxlag} must be below half the series length {n}"
        )));
    }
    let rho = acf(series, maxlag)?;
    let values = durbin_levinson(&rho);
    Ok(PacfResult {
        values,
        band: 1.96 / libm::sqrt(n as f64),
        nobs: n,
    })
}

/// Reflection coefficients from autocorrelations `rho[0] = r(1), ...`.
fn durbin_levinson(rho: &[f64]) -> Vec<f64> {
    let m = rho.len();
    let mut out = Vec::with_capacity(m);
    let mut phi: Vec<f64> = Vec::with_capacity(m);
    let mut prev: Vec<f64> = Vec::with_capacity(m);
    for k in 1..=m {
        let kk = if k == 1 {
            rho[0]
        } else {
            let num: f64 = rho[k - 1]
                - (1..k).map(|j| phi[j - 1] * rho[k - j - 1]).sum::<f64>();
            let den: f64 = 1.0 - (1..k).map(|j| phi[j - 1] * rho[j - 1]).sum::<f64>();
            if den == 0.0 {
                0.0
            } else {
                num / den
            }
        };
        prev.clear();
        prev.extend_from_slice(&phi);
        phi.clear();
        for j in 1..k {
            phi.push(prev[j - 1] - kk * prev[k - j - 1]);
        }
        phi.push(kk);
        out.push(kk);
    }
    out
}
