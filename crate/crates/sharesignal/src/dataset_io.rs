//! Regression-sample CSV, its JSON sidecar, and the figure data file.
//!
//! Floating-point columns are written in shortest round-trip form so a
//! sample read back from disk is bit-identical to the one written.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sharesignal_core::dataset::{
    CollectionWindow, Column, RegressionSample, SampleMeta, REGIME, SHARE, WEEKDAY_COLUMNS,
};
use sharesignal_core::NaiveDate;

use crate::error::{Error, Result};

/// Metadata written next to each sample CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub index: String,
    pub rows: usize,
    pub first_date: Option<NaiveDate>,
    pub last_date: Option<NaiveDate>,
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub regime_date: NaiveDate,
    pub first_regime_row: Option<NaiveDate>,
    pub dropped_days: Vec<NaiveDate>,
    pub observed_rows: usize,
    pub zero_filled_rows: usize,
    /// Price rows skipped for missing values; the return spans the gap.
    pub skipped_price_rows: Vec<NaiveDate>,
    pub config_hash: String,
}

impl SampleSidecar {
    pub fn new(
        index: &str,
        sample: &RegressionSample,
        meta: &SampleMeta,
        skipped_price_rows: Vec<NaiveDate>,
        config_hash: &str,
    ) -> Self {
        SampleSidecar {
            index: index.into(),
            rows: sample.len(),
            first_date: sample.dates().first().copied(),
            last_date: sample.dates().last().copied(),
            window_start: meta.window.start(),
            window_end: meta.window.end(),
            regime_date: meta.regime_date,
            first_regime_row: meta.first_regime_row,
            dropped_days: meta.dropped_days.clone(),
            observed_rows: meta.observed_rows,
            zero_filled_rows: meta.zero_filled_rows,
            skipped_price_rows,
            config_hash: config_hash.into(),
        }
    }

    pub fn window(&self) -> Result<CollectionWindow> {
        Ok(CollectionWindow::new(self.window_start, self.window_end)?)
    }
}

/// Writes `date,log_return,share,regime[,mon,tue,wed,thu]`. Other columns
/// are ignored.
pub fn write_sample_csv<W: Write>(out: W, sample: &RegressionSample) -> csv::Result<()> {
    let mut names = vec![SHARE, REGIME];
    if WEEKDAY_COLUMNS.iter().all(|c| sample.column(c).is_some()) {
        names.extend(WEEKDAY_COLUMNS);
    }
    let cols: Vec<&[f64]> = names
        .iter()
        .map(|n| sample.column(n).unwrap_or(&[]))
        .collect();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["date", "log_return"];
    header.extend(&names);
    w.write_record(&header)?;
    for (i, d) in sample.dates().iter().enumerate() {
        let mut row = vec![d.to_string(), sample.y()[i].to_string()];
        row.extend(cols.iter().map(|c| c.get(i).map_or(String::new(), f64::to_string)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(field: &str, name: &Path, line: u64, column: &str) -> Result<f64> {
    field.parse().map_err(|_| Error::Parse {
        path: name.to_path_buf(),
        line,
        message: format!("invalid {column} `{field}`"),
    })
}

/// Reads a sample CSV. Rows inside `window` are marked as observed signal
/// days, matching how the sample was built.
pub fn read_sample_csv<R: Read>(
    source: R,
    name: &Path,
    response_name: &str,
    window: Option<CollectionWindow>,
) -> Result<RegressionSample> {
    let mut r = csv::Reader::from_reader(source);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::csv(name, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let base = ["date", "log_return", SHARE, REGIME];
    let weekdays = header.len() == 8 && header[4..] == WEEKDAY_COLUMNS;
    if header.len() < 4 || header[..4] != base || !(header.len() == 4 || weekdays) {
        return Err(Error::format(
            name,
            format!("unexpected sample header {}", header.join(",")),
        ));
    }
    let mut dates = Vec::new();
    let mut y = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len() - 2];
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(|e| Error::csv(name, e))?;
        let line = i as u64 + 2;
        dates.push(row[0].parse::<NaiveDate>().map_err(|_| Error::Parse {
            path: name.to_path_buf(),
            line,
            message: format!("invalid date `{}`", &row[0]),
        })?);
        y.push(parse_f64(&row[1], name, line, "log_return")?);
        for (c, col) in cols.iter_mut().enumerate() {
            col.push(parse_f64(&row[c + 2], name, line, &header[c + 2])?);
        }
    }
    let observed = dates
        .iter()
        .map(|d| window.is_some_and(|w| w.contains(*d)))
        .collect();
    let columns = header[2..]
        .iter()
        .zip(cols)
        .map(|(n, v)| Column::new(n.clone(), v))
        .collect();
    Ok(RegressionSample::new(response_name, dates, y, columns, observed)?)
}

/// Plot-ready `date,log_return,share`.
pub fn write_figure_csv<W: Write>(out: W, sample: &RegressionSample) -> Result<()> {
    let share = sample
        .column(SHARE)
        .ok_or_else(|| sharesignal_core::Error::UnknownColumn(SHARE.into()))?;
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e| Error::csv("<figure>", e);
    w.write_record(["date", "log_return", "share"]).map_err(wrap)?;
    for (i, d) in sample.dates().iter().enumerate() {
        w.write_record([d.to_string(), sample.y()[i].to_string(), share[i].to_string()])
            .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io("<figure>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigurePoint {
    pub date: NaiveDate,
    pub log_return: f64,
    pub share: f64,
}

pub fn read_figure_csv<R: Read>(source: R, name: &Path) -> Result<Vec<FigurePoint>> {
    let mut r = csv::Reader::from_reader(source);
    let header = r.headers().map_err(|e| Error::csv(name, e))?.clone();
    if header.iter().collect::<Vec<_>>() != ["date", "log_return", "share"] {
        return Err(Error::format(name, "expected header date,log_return,share"));
    }
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(|e| Error::csv(name, e))?;
        let line = i as u64 + 2;
        out.push(FigurePoint {
            date: row[0].parse().map_err(|_| Error::Parse {
                path: name.to_path_buf(),
                line,
                message: format!("invalid date `{}`", &row[0]),
            })?,
            log_return: parse_f64(&row[1], name, line, "log_return")?,
            share: parse_f64(&row[2], name, line, "share")?,
        });
    }
    Ok(out)
}
