//! Estimation core for keyword-share signals and subset-lag AR-X models of
//! daily index returns.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! filesystem (tweet dumps, price CSVs, report files, the CLI) lives in the
//! companion `sharesignal` crate; this crate holds the pure pieces:
//!
//! - [`corpus`]: keyword counting and per-day aggregation of tweet records.
//! - [`marketdata`]: price bars and log returns from adjusted closes.
//! - [`calendar`]: a generated US equity trading calendar.
//! - [`dataset`]: alignment of the daily signal with trading-day returns,
//!   regime and weekday indicators, descriptive statistics.
//! - [`econometrics`]: ACF/PACF, least-squares AR-X fits with classical
//!   inference, AIC order selection, standardized effects.
//! - [`robustness`]: the weekday, trailing-window and observed-signal
//!   re-estimations.
//! - [`synth`]: seeded AR-X generators with sparse spike regressors.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod calendar;
pub mod corpus;
pub mod dataset;
pub mod econometrics;
mod error;
pub mod linalg;
pub mod marketdata;
pub mod robustness;
pub mod special;
pub mod synth;

pub use error::{Error, Result};

pub use chrono::{NaiveDate, Weekday};
