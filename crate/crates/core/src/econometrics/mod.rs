//! Identification, estimation and reporting helpers for AR-X models.

mod arx;
mod correlation;
mod selection;

use alloc::format;

pub use arx::{
    aic, aic_value, build_design, fit_arx, fit_arx_with, lag_term, Design, FitOptions, FitResult,
    ModelSpec, CONSTANT,
};
pub use correlation::{acf, pacf, PacfResult};
pub use selection::{aic_by_order, select_lags_pacf, select_order_aic};

use crate::dataset::{self, RegressionSample};
use crate::{Error, Result};

/// `beta * sd(x) / sd(y)`: the response change, in standard deviations, for
/// a one standard deviation change in the regressor.
pub fn standardized_effect_from_sd(beta: f64, sd_regressor: f64, sd_response: f64) -> Result<f64> {
    if !(sd_regressor > 0.0) || !(sd_response > 0.0) {
        return Err(Error::Domain(format!(
            "standard deviations must be positive (regressor {sd_regressor}, response {sd_response})"
        )));
    }
    Ok(beta * sd_regressor / sd_response)
}

/// Standardized effect of `term`, with standard deviations taken over the
/// whole sample.
pub fn standardized_effect(fit: &FitResult, sample: &RegressionSample, term: &str) -> Result<f64> {
    let beta = fit
        .coefficient(term)
        .ok_or_else(|| Error::UnknownTerm(term.into()))?;
    let column = sample
        .column(term)
        .ok_or_else(|| Error::UnknownColumn(term.into()))?;
    let sd_x = dataset::std_dev(column)?;
    let sd_y = dataset::std_dev(sample.y())?;
    standardized_effect_from_sd(beta, sd_x, sd_y)
}

/// `***` below 0.01, `**` below 0.05, `*` below 0.10.
pub fn significance_stars(p_value: f64) -> Result<&'static str> {
    if !(0.0..=1.0).contains(&p_value) {
        return Err(Error::Domain(format!("p-value {p_value} outside [0, 1]")));
    }
    Ok(if p_value < 0.01 {
        "***"
    } else if p_value < 0.05 {
        "**"
    } else if p_value < 0.10 {
        "*"
    } else {
        ""
    })
}
