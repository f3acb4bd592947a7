//! Text tables and JSON documents for estimation results.

use serde::Serialize;
use sharesignal_core::dataset::{DescriptiveStats, REGIME, SHARE};
use sharesignal_core::econometrics::{significance_stars, FitResult, CONSTANT};
use sharesignal_core::robustness::{IndexFit, RobustnessReport};
use sharesignal_core::NaiveDate;

use crate::fmt::{fmt_fixed, fmt_sig};

pub const STAR_NOTE: &str = "t-statistics in parentheses; * p < 0.10, ** p < 0.05, *** p < 0.01";

/// Human-readable row labels.
#[derive(Debug, Clone)]
pub struct Labels {
    pub keyword: String,
    pub regime_date: NaiveDate,
}

impl Labels {
    pub fn term(&self, term: &str) -> String {
        match term {
            SHARE => format!("Share of \"{}\" mentions in tweets", self.keyword),
            REGIME => format!("Date on or after {}", self.regime_date),
            "mon" => "Indicator for Monday".into(),
            "tue" => "Indicator for Tuesday".into(),
            "wed" => "Indicator for Wednesday".into(),
            "thu" => "Indicator for Thursday".into(),
            CONSTANT => "Constant".into(),
            t => match t.strip_prefix("ar").and_then(|l| l.parse::<usize>().ok()) {
                Some(l) => format!("AR({l})"),
                None => t.into(),
            },
        }
    }
}

/// Share and regime first, weekday dummies, then constant and lags.
fn row_order(fits: &[&FitResult]) -> Vec<String> {
    let mut exog: Vec<String> = Vec::new();
    let mut lags: Vec<usize> = Vec::new();
    let mut constant = false;
    for f in fits {
        for t in &f.term_names {
            if t == CONSTANT {
                constant = true;
            } else if let Some(l) = t.strip_prefix("ar").and_then(|l| l.parse().ok()) {
                if !lags.contains(&l) {
                    lags.push(l);
                }
            } else if !exog.contains(t) {
                exog.push(t.clone());
            }
        }
    }
    lags.sort_unstable();
    let mut rows = exog;
    if constant {
        rows.push(CONSTANT.into());
    }
    rows.extend(lags.iter().map(|l| format!("ar{l}")));
    rows
}

fn stars(p: f64) -> &'static str {
    significance_stars(p).unwrap_or("")
}

/// Renders fits side by side: coefficient with stars, t-statistic below.
pub fn render_table(title: &str, fits: &[IndexFit], labels: &Labels, config_hash: &str) -> String {
    let results: Vec<&FitResult> = fits.iter().map(|f| &f.fit).collect();
    let rows = row_order(&results);
    let mut body: Vec<(String, Vec<String>)> = Vec::new();
    for term in &rows {
        let mut coef = Vec::new();
        let mut tstat = Vec::new();
        for f in &results {
            match f.term_index(term) {
                Some(i) => {
                    coef.push(format!("{}{}", fmt_fixed(f.coefficients[i], 3), stars(f.p_values[i])));
                    tstat.push(format!("({})", fmt_fixed(f.t_stats[i], 3)));
                }
                None => {
                    coef.push(String::new());
                    tstat.push(String::new());
                }
            }
        }
        body.push((labels.term(term), coef));
        body.push((String::new(), tstat));
    }
    body.push((
        "Observations".into(),
        results.iter().map(|f| f.nobs.to_string()).collect(),
    ));

    let label_w = body.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0).max(9);
    let col_w = fits
        .iter()
        .map(|f| f.index.chars().count())
        .chain(body.iter().flat_map(|(_, c)| c.iter().map(|s| s.chars().count())))
        .max()
        .unwrap_or(0)
        + 2;
    let mut out = String::new();
    out.push_str(title);
    out.push('\n');
    let rule = "-".repeat(label_w + col_w * fits.len());
    out.push_str(&rule);
    out.push('\n');
    out.push_str(&format!("{:<label_w$}", "Variables"));
    for f in fits {
        out.push_str(&format!("{:>col_w$}", f.index));
    }
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    for (label, cells) in &body {
        let mut line = format!("{label:<label_w$}");
        for c in cells {
            line.push_str(&format!("{c:>col_w$}"));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push_str(&rule);
    out.push('\n');
    out.push_str(STAR_NOTE);
    out.push('\n');
    for f in fits {
        out.push_str(&format!(
            "{}: {} to {}, {} sample rows\n",
            f.index, f.fit.start_date, f.fit.end_date, f.sample_rows
        ));
    }
    out.push_str(&format!("config sha256 {config_hash}\n"));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TermReport {
    pub term: String,
    pub coefficient: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub stars: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub index: String,
    pub nobs: usize,
    pub df_resid: usize,
    pub sample_rows: usize,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub sigma2: f64,
    pub rss: f64,
    pub aic: f64,
    pub terms: Vec<TermReport>,
    /// Response standard deviations per one-standard-deviation move in the
    /// share, when available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardized_effect: Option<f64>,
}

impl FitReport {
    pub fn new(f: &IndexFit, standardized_effect: Option<f64>) -> Self {
        let fit = &f.fit;
        FitReport {
            index: f.index.clone(),
            nobs: fit.nobs,
            df_resid: fit.df_resid,
            sample_rows: f.sample_rows,
            start_date: fit.start_date,
            end_date: fit.end_date,
            sigma2: fit.sigma2,
            rss: fit.rss,
            aic: fit.aic,
            terms: (0..fit.num_terms())
                .map(|i| TermReport {
                    term: fit.term_names[i].clone(),
                    coefficient: fit.coefficients[i],
                    std_error: fit.std_errors[i],
                    t_stat: fit.t_stats[i],
                    p_value: fit.p_values[i],
                    stars: stars(fit.p_values[i]),
                })
                .collect(),
            standardized_effect,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub title: String,
    pub spec: String,
    pub config_hash: String,
    pub indices: Vec<FitReport>,
}

impl TableReport {
    pub fn new(title: &str, report: &RobustnessReport, effects: &[Option<f64>], config_hash: &str) -> Self {
        TableReport {
            title: title.into(),
            spec: report.spec_name.clone(),
            config_hash: config_hash.into(),
            indices: report
                .fits
                .iter()
                .enumerate()
                .map(|(i, f)| FitReport::new(f, effects.get(i).copied().flatten()))
                .collect(),
        }
    }
}

/// One sentence per index on the size of the share effect.
pub fn effect_lines(names: &[&str], effects: &[f64]) -> String {
    let mut out = String::new();
    for (name, e) in names.iter().zip(effects) {
        out.push_str(&format!(
            "{name}: a one standard deviation rise in the share is associated with a {:.1}% of a standard deviation {} in log returns\n",
            100.0 * e.abs(),
            if *e < 0.0 { "decline" } else { "rise" }
        ));
    }
    out
}

/// Count, mean, standard deviation, min and max per variable.
pub fn render_descriptive(title: &str, rows: &[(String, &DescriptiveStats, &str)]) -> String {
    let mut table: Vec<[String; 6]> = vec![[
        "Variable".into(),
        "#".into(),
        "Mean".into(),
        "Std. Dev.".into(),
        "Min".into(),
        "Max".into(),
    ]];
    for (label, stats, column) in rows {
        if let Some(v) = stats.get(column) {
            table.push([
                label.clone(),
                v.count.to_string(),
                fmt_sig(v.mean, 7),
                fmt_sig(v.std_dev, 7),
                fmt_sig(v.min, 7),
                fmt_sig(v.max, 7),
            ]);
        }
    }
    let widths: Vec<usize> = (0..6)
        .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = format!("{title}\n");
    for r in &table {
        let mut line = format!("{:<w$}", r[0], w = widths[0]);
        for c in 1..6 {
            line.push_str(&format!("  {:>w$}", r[c], w = widths[c]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
