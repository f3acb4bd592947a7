//! Yahoo-style daily price files and the log-return CSV.

use std::io::{Read, Write};
use std::path::Path;

use sharesignal_core::marketdata::{check_ordering, PriceBar, ReturnSeries};
use sharesignal_core::NaiveDate;

use crate::error::{Error, Result};
use crate::fmt::fmt_sig;

pub const PRICE_HEADER: [&str; 7] = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"];

#[derive(Debug, Clone, PartialEq)]
pub struct PriceFile {
    pub bars: Vec<PriceBar>,
    /// Dates of rows dropped for a non-numeric field (Yahoo writes `null`).
    pub skipped: Vec<NaiveDate>,
}

/// Parses a price CSV. Rows with a non-numeric price or volume are skipped
/// and listed; a row that parses but breaks the bar invariants is an error.
pub fn parse_price_csv<R: Read>(source: R, name: &Path) -> Result<PriceFile> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let header = r.headers().map_err(|e| Error::csv(name, e))?.clone();
    if header.iter().collect::<Vec<_>>() != PRICE_HEADER {
        return Err(Error::format(
            name,
            format!(
                "expected header {}, found {}",
                PRICE_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut bars = Vec::new();
    let mut skipped = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(|e| Error::csv(name, e))?;
        let line = i as u64 + 2;
        let date: NaiveDate = row[0].parse().map_err(|_| Error::Parse {
            path: name.to_path_buf(),
            line,
            message: format!("invalid date `{}`", &row[0]),
        })?;
        let prices: Option<Vec<f64>> = (1..=5).map(|c| row[c].parse::<f64>().ok()).collect();
        let volume = row[6]
            .parse::<u64>()
            .ok()
            .or_else(|| row[6].parse::<f64>().ok().filter(|v| *v >= 0.0).map(|v| v as u64));
        let (Some(p), Some(volume)) = (prices, volume) else {
            skipped.push(date);
            continue;
        };
        let bar = PriceBar {
            date,
            open: p[0],
            high: p[1],
            low: p[2],
            close: p[3],
            adj_close: p[4],
            volume,
        };
        bar.validate().map_err(|e| Error::Parse {
            path: name.to_path_buf(),
            line,
            message: e.to_string(),
        })?;
        bars.push(bar);
    }
    check_ordering(&bars).map_err(|e| Error::format(name, e.to_string()))?;
    Ok(PriceFile { bars, skipped })
}

pub fn write_price_csv<W: Write>(out: W, bars: &[PriceBar]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PRICE_HEADER)?;
    for b in bars {
        w.write_record([
            b.date.to_string(),
            b.open.to_string(),
            b.high.to_string(),
            b.low.to_string(),
            b.close.to_string(),
            b.adj_close.to_string(),
            b.volume.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `date,log_return` at fifteen significant digits.
pub fn write_returns_csv<W: Write>(out: W, returns: &ReturnSeries) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "log_return"])?;
    for (d, r) in returns.iter() {
        w.write_record([d.to_string(), fmt_sig(r, 15)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use sharesignal_core::marketdata::log_returns;

    fn parse(text: &str) -> Result<PriceFile> {
        parse_price_csv(text.as_bytes(), Path::new("p.csv"))
    }

    const HEAD: &str = "Date,Open,High,Low,Close,Adj Close,Volume\n";

    #[test]
    fn two_rows() {
        let f = parse(&format!(
            "{HEAD}2020-01-02,100,100,100,100,100.0,5\n2020-01-03,110,110,110,110,110.0,7\n"
        ))
        .unwrap();
        assert_eq!(f.bars.len(), 2);
        let r = log_returns(&f.bars).unwrap();
        assert!((r.values()[0] - 1.1f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn empty_data_section() {
        assert!(parse(HEAD).unwrap().bars.is_empty());
    }

    #[test]
    fn null_row_skipped() {
        let mut text = HEAD.to_string();
        for d in 2..7 {
            if d == 4 {
                text.push_str(&format!("2020-01-0{d},null,null,null,null,null,null\n"));
            } else {
                text.push_str(&format!("2020-01-0{d},10,11,9,10,10,100\n"));
            }
        }
        let f = parse(&text).unwrap();
        assert_eq!(f.bars.len(), 4);
        assert_eq!(f.skipped, [NaiveDate::from_ymd_opt(2020, 1, 4).unwrap()]);
    }

    #[test]
    fn wrong_header() {
        let err = parse("Date,Close\n2020-01-02,1\n").unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }

    #[test]
    fn unordered_dates() {
        let err = parse(&format!("{HEAD}2020-01-03,1,1,1,1,1,0\n2020-01-02,1,1,1,1,1,0\n")).unwrap_err();
        assert!(err.to_string().contains("2020-01-02"), "{err}");
    }

    #[test]
    fn inconsistent_bar() {
        let err = parse(&format!("{HEAD}2020-01-03,10,9,8,10,10,0\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn returns_csv() {
        let bars: Vec<PriceBar> = [100.0, 110.0, 99.0]
            .iter()
            .enumerate()
            .map(|(i, p)| PriceBar::flat(NaiveDate::from_ymd_opt(2020, 1, 2 + i as u32).unwrap(), *p))
            .collect();
        let mut buf = Vec::new();
        write_returns_csv(&mut buf, &log_returns(&bars).unwrap()).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "date,log_return\n2020-01-03,0.0953101798043248\n2020-01-04,-0.105360515657827\n"
        );
    }
}
