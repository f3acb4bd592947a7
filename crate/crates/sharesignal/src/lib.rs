//! File formats, configuration, report rendering and the stage pipeline
//! around `sharesignal-core`.

pub mod config;
pub mod dataset_io;
pub mod error;
pub mod fmt;
pub mod pipeline;
pub mod prices;
pub mod report;
pub mod synth_fixture;
pub mod tweets;

pub use error::{Error, Result};
