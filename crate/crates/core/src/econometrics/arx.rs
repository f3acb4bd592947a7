//! Conditional least-squares estimation of subset-lag AR-X models.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::dataset::RegressionSample;
use crate::linalg;
use crate::special::{student_t_quantile, two_sided_p_value};
use crate::{Error, Result};

pub const CONSTANT: &str = "const";

pub fn lag_term(lag: usize) -> String {
    format!("ar{lag}")
}

/// Which lags, exogenous columns and intercept enter the regression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    lags: Vec<usize>,
    exog: Vec<String>,
    include_constant: bool,
}

impl ModelSpec {
    pub fn new(lags: Vec<usize>, exog: Vec<String>, include_constant: bool) -> Result<Self> {
        if lags.is_empty() && exog.is_empty() && !include_constant {
            return Err(Error::Argument("model has no terms".into()));
        }
        if lags.first().is_some_and(|l| *l == 0) {
            return Err(Error::Argument("lags must be at least 1".into()));
        }
        if lags.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument(format!(
                "lags must be strictly increasing, got {lags:?}"
            )));
        }
        for (i, e) in exog.iter().enumerate() {
            if exog[..i].contains(e) {
                return Err(Error::Argument(format!("exogenous column `{e}` repeated")));
            }
        }
        Ok(ModelSpec {
            lags,
            exog,
            include_constant,
        })
    }

    /// Constant, the given lags, and the given exogenous columns.
    pub fn arx(lags: &[usize], exog: &[&str]) -> Result<Self> {
        Self::new(
            lags.to_vec(),
            exog.iter().map(|s| s.to_string()).collect(),
            true,
        )
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn exog(&self) -> &[String] {
        &self.exog
    }

    pub fn include_constant(&self) -> bool {
        self.include_constant
    }

    pub fn max_lag(&self) -> usize {
        self.lags.last().copied().unwrap_or(0)
    }

    /// Same spec with more exogenous columns appended.
    pub fn with_exog<S: AsRef<str>>(&self, extra: &[S]) -> Result<Self> {
        let mut exog = self.exog.clone();
        exog.extend(extra.iter().map(|s| s.as_ref().to_string()));
        Self::new(self.lags.clone(), exog, self.include_constant)
    }

    /// Same spec with the named exogenous columns removed.
    pub fn without_exog<S: AsRef<str>>(&self, drop: &[S]) -> Result<Self> {
        let exog = self
            .exog
            .iter()
            .filter(|e| !drop.iter().any(|d| d.as_ref() == e.as_str()))
            .cloned()
            .collect();
        Self::new(self.lags.clone(), exog, self.include_constant)
    }

    /// Term names in design-matrix order: constant, lags, exogenous.
    pub fn term_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.num_terms());
        if self.include_constant {
            names.push(CONSTANT.to_string());
        }
        names.extend(self.lags.iter().map(|l| lag_term(*l)));
        names.extend(self.exog.iter().cloned());
        names
    }

    pub fn num_terms(&self) -> usize {
        self.include_constant as usize + self.lags.len() + self.exog.len()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FitOptions {
    /// Fill leading lags from the sample's presample responses.
    pub use_presample: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub response_name: String,
    pub term_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    /// Residual variance, `rss / df_resid`.
    pub sigma2: f64,
    pub rss: f64,
    pub nobs: usize,
    pub df_resid: usize,
    /// `nobs * ln(rss / nobs) + 2k`; negative infinity for an exact fit.
    pub aic: f64,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub residuals: Vec<f64>,
}

impl FitResult {
    pub fn term_index(&self, name: &str) -> Option<usize> {
        self.term_names.iter().position(|t| t == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.term_index(name).map(|i| self.coefficients[i])
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.term_index(name).map(|i| self.std_errors[i])
    }

    pub fn t_stat(&self, name: &str) -> Option<f64> {
        self.term_index(name).map(|i| self.t_stats[i])
    }

    pub fn p_value(&self, name: &str) -> Option<f64> {
        self.term_index(name).map(|i| self.p_values[i])
    }

    pub fn num_terms(&self) -> usize {
        self.term_names.len()
    }

    /// Two-sided confidence interval from the t distribution.
    pub fn confidence_interval(&self, name: &str, level: f64) -> Option<(f64, f64)> {
        let i = self.term_index(name)?;
        let q = student_t_quantile(0.5 + level / 2.0, self.df_resid as f64);
        let half = q * self.std_errors[i];
        Some((self.coefficients[i] - half, self.coefficients[i] + half))
    }
}

/// The regressors and response that [`fit_arx_with`] hands to the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub term_names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    /// Index of the first sample row used.
    pub first_row: usize,
}

/// Builds the lag-augmented design. Rows that lack a full set of lags are
/// dropped unless presample responses fill them.
pub fn build_design(
    sample: &RegressionSample,
    spec: &ModelSpec,
    options: FitOptions,
) -> Result<Design> {
    let n = sample.len();
    let max_lag = spec.max_lag();
    let pre: &[f64] = if options.use_presample {
        sample.presample()
    } else {
        &[]
    };
    let first_row = max_lag.saturating_sub(pre.len());
    let y_all = sample.y();
    // Responses with presample prepended: row t sits at t + pre.len().
    let lagged = |t: usize, lag: usize| -> f64 {
        let idx = t + pre.len() - lag;
        if idx < pre.len() {
            pre[idx]
        } else {
            y_all[idx - pre.len()]
        }
    };

    let rows = n.saturating_sub(first_row);
    let mut columns = Vec::with_capacity(spec.num_terms());
    if spec.include_constant() {
        columns.push(alloc::vec![1.0; rows]);
    }
    for &lag in spec.lags() {
        columns.push((first_row..n).map(|t| lagged(t, lag)).collect());
    }
    for name in spec.exog() {
        let col = sample
            .column(name)
            .ok_or_else(|| Error::UnknownColumn(name.clone()))?;
        columns.push(col[first_row.min(n)..].to_vec());
    }
    Ok(Design {
        term_names: spec.term_names(),
        columns,
        y: y_all[first_row.min(n)..].to_vec(),
        first_row,
    })
}

pub fn fit_arx(sample: &RegressionSample, spec: &ModelSpec) -> Result<FitResult> {
    fit_arx_with(sample, spec, FitOptions::default())
}

/// Least-squares AR-X fit with classical standard errors and two-sided
/// Student-t p-values.
pub fn fit_arx_with(
    sample: &RegressionSample,
    spec: &ModelSpec,
    options: FitOptions,
) -> Result<FitResult> {
    let design = build_design(sample, spec, options)?;
    let k = design.columns.len();
    let nobs = design.y.len();
    if nobs <= k + 1 {
        return Err(Error::SampleSize { nobs, terms: k });
    }
    let cols: Vec<&[f64]> = design.columns.iter().map(|c| c.as_slice()).collect();
    let ls = linalg::least_squares(&cols, &design.y).map_err(|d| Error::Collinear {
        columns: d
            .dependent
            .iter()
            .chain(d.involved.iter())
            .map(|&i| design.term_names[i].clone())
            .collect(),
    })?;
    let dates = sample.dates();
    Ok(assemble(
        sample.response_name().to_string(),
        design.term_names,
        ls,
        nobs,
        dates[design.first_row],
        dates[dates.len() - 1],
    ))
}

fn assemble(
    response_name: String,
    term_names: Vec<String>,
    ls: linalg::LeastSquares,
    nobs: usize,
    start_date: NaiveDate,
    end_date: NaiveDate,
) -> FitResult {
    let k = term_names.len();
    let df_resid = nobs - k;
    let sigma2 = ls.rss / df_resid as f64;
    let std_errors: Vec<f64> = ls
        .xtx_inv_diag
        .iter()
        .map(|d| libm::sqrt(sigma2 * d))
        .collect();
    let t_stats: Vec<f64> = ls
        .coefficients
        .iter()
        .zip(&std_errors)
        .map(|(b, s)| b / s)
        .collect();
    let p_values = t_stats
        .iter()
        .map(|t| two_sided_p_value(*t, df_resid as f64))
        .collect();
    let aic = aic_value(nobs, ls.rss, k).unwrap_or(f64::NEG_INFINITY);
    FitResult {
        response_name,
        term_names,
        coefficients: ls.coefficients,
        std_errors,
        t_stats,
        p_values,
        sigma2,
        rss: ls.rss,
        nobs,
        df_resid,
        aic,
        start_date,
        end_date,
        residuals: ls.residuals,
    }
}

/// `n ln(rss / n) + 2k`.
pub fn aic_value(nobs: usize, rss: f64, terms: usize) -> Result<f64> {
    if !(rss > 0.0) {
        return Err(Error::DegenerateFit);
    }
    let n = nobs as f64;
    Ok(n * libm::log(rss / n) + 2.0 * terms as f64)
}

/// AIC of a fitted model; errors when the fit is exact.
pub fn aic(fit: &FitResult) -> Result<f64> {
    aic_value(fit.nobs, fit.rss, fit.num_terms())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Column;
    use alloc::vec;
    use alloc::vec::Vec;

    fn sample(y: Vec<f64>, cols: Vec<Column>) -> RegressionSample {
        let start = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
        let dates = (0..y.len())
            .map(|i| start + chrono::Duration::days(i as i64))
            .collect();
        let observed = vec![false; y.len()];
        RegressionSample::new("y", dates, y, cols, observed).unwrap()
    }

    #[test]
    fn intercept_only_is_mean() {
        let v = vec![1.0, 4.0, 2.0, 8.0, 5.0];
        let fit = fit_arx(&sample(v.clone(), vec![]), &ModelSpec::arx(&[], &[]).unwrap()).unwrap();
        let mean = 4.0;
        assert!((fit.coefficients[0] - mean).abs() < 1e-14);
        // (n - 1) * var = sum of squared deviations = 30.
        assert!((fit.rss - 30.0).abs() < 1e-12);
        assert_eq!(fit.nobs, 5);
        assert_eq!(fit.df_resid, 4);
    }

    #[test]
    fn aic_arithmetic() {
        assert_eq!(aic_value(100, 100.0, 2).unwrap(), 4.0);
        assert_eq!(aic_value(10, 0.0, 1), Err(Error::DegenerateFit));
    }

    #[test]
    fn lag_rows_are_dropped() {
        let y: Vec<f64> = (0..20).map(|i| libm::sin(i as f64)).collect();
        let fit = fit_arx(&sample(y, vec![]), &ModelSpec::arx(&[1, 7], &[]).unwrap()).unwrap();
        assert_eq!(fit.nobs, 13);
        assert_eq!(fit.term_names, vec!["const", "ar1", "ar7"]);
        assert_eq!(fit.nobs, fit.df_resid + 3);
    }

    #[test]
    fn presample_fills_leading_lags() {
        let y: Vec<f64> = (0..30).map(|i| libm::sin(1.3 * i as f64)).collect();
        let s = sample(y[7..].to_vec(), vec![]).with_presample(y[..7].to_vec());
        let spec = ModelSpec::arx(&[1, 7], &[]).unwrap();
        let padded = fit_arx_with(&s, &spec, FitOptions { use_presample: true }).unwrap();
        assert_eq!(padded.nobs, 23);
        // Same as fitting the full series without presample.
        let full = fit_arx(&sample(y, vec![]), &spec).unwrap();
        for (a, b) in padded.coefficients.iter().zip(&full.coefficients) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn collinear_columns_are_named() {
        let y = vec![0.1, 0.4, -0.2, 0.3, 0.0, 0.5, -0.1, 0.2];
        let a = vec![1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0];
        let b: Vec<f64> = a.iter().map(|v| 1.0 - v).collect();
        let s = sample(y, vec![Column::new("a", a), Column::new("b", b)]);
        let err = fit_arx(&s, &ModelSpec::arx(&[], &["a", "b"]).unwrap()).unwrap_err();
        match err {
            Error::Collinear { columns } => {
                assert!(columns.contains(&"b".to_string()));
                assert!(columns.contains(&"a".to_string()));
                assert!(columns.contains(&"const".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        let s = sample(vec![1.0, 2.0, 3.0], vec![]);
        assert!(matches!(
            fit_arx(&s, &ModelSpec::arx(&[1], &[]).unwrap()),
            Err(Error::SampleSize { nobs: 2, terms: 2 })
        ));
    }

    #[test]
    fn unknown_column() {
        let s = sample(vec![1.0, 2.0, 3.0, 5.0], vec![]);
        assert_eq!(
            fit_arx(&s, &ModelSpec::arx(&[], &["share"]).unwrap()),
            Err(Error::UnknownColumn("share".into()))
        );
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::new(vec![], vec![], false).is_err());
        assert!(ModelSpec::new(vec![0], vec![], true).is_err());
        assert!(ModelSpec::new(vec![7, 1], vec![], true).is_err());
        assert!(ModelSpec::arx(&[1], &["x", "x"]).is_err());
    }
}
