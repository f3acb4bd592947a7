use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dates must be strictly increasing: {previous} is followed by {next}")]
    Ordering { previous: NaiveDate, next: NaiveDate },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("design matrix is rank deficient; collinear columns: {}", .columns.join(", "))]
    Collinear { columns: Vec<String> },

    #[error("sample too small: {nobs} usable observations for {terms} terms")]
    SampleSize { nobs: usize, terms: usize },

    #[error("residual sum of squares is zero; AIC is undefined")]
    DegenerateFit,

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("unknown term `{0}`")]
    UnknownTerm(String),

    #[error("lag polynomial is not stationary")]
    Unstable,
}
