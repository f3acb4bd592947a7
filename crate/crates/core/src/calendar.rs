//! US equity trading calendar.
//!
//! The calendar follows the NYSE holiday rules in force since 1998 (when
//! Martin Luther King Jr. Day was added) plus the unscheduled closures listed
//! in [`SPECIAL_CLOSURES`]. It is used to generate synthetic price histories
//! and to check observation counts; the pipeline itself takes its trading
//! days from the price files.

use alloc::vec::Vec;

use chrono::{Datelike, Duration, NaiveDate, Weekday};

/// Full-day market closures outside the regular holiday schedule.
pub const SPECIAL_CLOSURES: &[(i32, u32, u32)] = &[
    (2001, 9, 11),
    (2001, 9, 12),
    (2001, 9, 13),
    (2001, 9, 14),
    (2004, 6, 11),
    (2007, 1, 2),
    (2012, 10, 29),
    (2012, 10, 30),
    (2018, 12, 5),
    (2025, 1, 9),
];

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

/// Gregorian Easter Sunday (anonymous Gregorian algorithm).
pub fn easter_sunday(year: i32) -> NaiveDate {
    let a = year % 19;
    let b = year / 100;
    let c = year % 100;
    let d = b / 4;
    let e = b % 4;
    let f = (b + 8) / 25;
    let g = (b - f + 1) / 3;
    let h = (19 * a + b - d - g + 15) % 30;
    let i = c / 4;
    let k = c % 4;
    let l = (32 + 2 * e + 2 * i - h - k) % 7;
    let m = (a + 11 * h + 22 * l) / 451;
    let month = (h + l - 7 * m + 114) / 31;
    let day = (h + l - 7 * m + 114) % 31 + 1;
    ymd(year, month as u32, day as u32)
}

fn nth_weekday(year: i32, month: u32, weekday: Weekday, n: u8) -> NaiveDate {
    NaiveDate::from_weekday_of_month_opt(year, month, weekday, n).expect("nth weekday exists")
}

fn last_weekday(year: i32, month: u32, weekday: Weekday) -> NaiveDate {
    let next_month = if month == 12 {
        ymd(year + 1, 1, 1)
    } else {
        ymd(year, month + 1, 1)
    };
    let mut d = next_month - Duration::days(1);
    while d.weekday() != weekday {
        d -= Duration::days(1);
    }
    d
}

/// Saturday holidays move to Friday, Sunday holidays to Monday.
fn observed(d: NaiveDate) -> NaiveDate {
    match d.weekday() {
        Weekday::Sat => d - Duration::days(1),
        Weekday::Sun => d + Duration::days(1),
        _ => d,
    }
}

/// Regular NYSE holidays observed in `year`.
pub fn us_market_holidays(year: i32) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(10);
    // New Year's Day on a Saturday is not observed on the preceding Friday.
    let new_year = ymd(year, 1, 1);
    match new_year.weekday() {
        Weekday::Sat => {}
        Weekday::Sun => out.push(new_year + Duration::days(1)),
        _ => out.push(new_year),
    }
    if year >= 1998 {
        out.push(nth_weekday(year, 1, Weekday::Mon, 3));
    }
    out.push(nth_weekday(year, 2, Weekday::Mon, 3));
    out.push(easter_sunday(year) - Duration::days(2));
    out.push(last_weekday(year, 5, Weekday::Mon));
    if year >= 2022 {
        out.push(observed(ymd(year, 6, 19)));
    }
    out.push(observed(ymd(year, 7, 4)));
    out.push(nth_weekday(year, 9, Weekday::Mon, 1));
    out.push(nth_weekday(year, 11, Weekday::Thu, 4));
    out.push(observed(ymd(year, 12, 25)));
    out.sort_unstable();
    out
}

pub fn is_us_trading_day(date: NaiveDate) -> bool {
    if matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
        return false;
    }
    let key = (date.year(), date.month(), date.day());
    if SPECIAL_CLOSURES.contains(&key) {
        return false;
    }
    !us_market_holidays(date.year()).contains(&date)
}

/// All trading days in `[start, end]`, ascending.
pub fn us_trading_days(start: NaiveDate, end: NaiveDate) -> Vec<NaiveDate> {
    let mut out = Vec::new();
    if end < start {
        return out;
    }
    let mut holidays = Vec::new();
    for year in start.year()..=end.year() {
        holidays.extend(us_market_holidays(year));
    }
    let mut d = start;
    while d <= end {
        let weekend = matches!(d.weekday(), Weekday::Sat | Weekday::Sun);
        let key = (d.year(), d.month(), d.day());
        if !weekend && !SPECIAL_CLOSURES.contains(&key) && holidays.binary_search(&d).is_err() {
            out.push(d);
        }
        d += Duration::days(1);
    }
    out
}

/// The last `n` trading days ending on or before `end`.
pub fn us_trading_days_ending(end: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = end;
    while out.len() < n {
        if is_us_trading_day(d) {
            out.push(d);
        }
        d -= Duration::days(1);
    }
    out.reverse();
    out
}
