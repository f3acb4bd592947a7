use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use sharesignal::config::{parse_lags, parse_window, Overrides, RunConfig};
use sharesignal::pipeline::{self, Stage, StageError};
use sharesignal::synth_fixture::{write_fixture, FixtureOptions};
use sharesignal_core::NaiveDate;

/// Tweet keyword share versus daily index returns.
#[derive(Debug, Parser)]
#[command(name = "sharesignal", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// TOML configuration; relative paths inside it resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    keyword: Option<String>,
    /// exact, prefix or substring.
    #[arg(long, global = true)]
    match_mode: Option<String>,
    /// Collection window, START..END.
    #[arg(long, global = true, value_parser = |s: &str| parse_window(s).map_err(|e| e.to_string()))]
    window: Option<(NaiveDate, NaiveDate)>,
    #[arg(long, global = true)]
    regime_date: Option<NaiveDate>,
    /// Lag set for one index, INDEX=1,7; repeatable.
    #[arg(long, global = true, value_parser = |s: &str| parse_lags(s).map_err(|e| e.to_string()))]
    lags: Vec<(String, Vec<usize>)>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, relative to the working directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count keyword mentions per day from newline-delimited JSON tweets.
    IngestTweets {
        /// Tweet files or glob patterns; replaces `tweet_globs`.
        files: Vec<String>,
        /// Worker threads; 0 uses every core.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Convert price CSVs to log returns.
    IngestPrices,
    /// Build the regression samples and descriptive statistics.
    Build,
    /// Fit the baseline model for every index.
    Fit,
    /// Weekday, trailing-window and observed-day specifications.
    Robustness,
    /// Build, fit and robustness in one run.
    Report,
    /// Write a synthetic input set with known coefficients.
    Synth {
        /// Directory for prices, daily signal, truth and config.
        #[arg(long, default_value = "synthetic")]
        dir: PathBuf,
    },
}

fn load_config(g: &Global) -> Result<RunConfig, StageError> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p).map_err(|source| StageError {
            stage: Stage::Config,
            source,
        })?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        keyword: g.keyword.clone(),
        match_mode: g.match_mode.clone(),
        window: g.window,
        regime_date: g.regime_date,
        lags: g.lags.clone(),
        seed: g.seed,
        output_dir: g.out.clone(),
    });
    cfg.validate().map_err(|source| StageError {
        stage: Stage::Config,
        source,
    })?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli.global)?;
    let out = cfg.output_dir();
    match cli.command {
        Command::IngestTweets { files, workers } => {
            if !files.is_empty() {
                // Command-line paths are relative to the working directory.
                cfg.tweet_globs = files
                    .iter()
                    .map(|f| std::path::absolute(f).map(|p| p.to_string_lossy().into_owned()))
                    .collect::<std::io::Result<_>>()
                    .context("resolving tweet paths")?;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let log = pipeline::ingest_tweets(&cfg)?;
            println!(
                "{} lines, {} records, {} malformed, {} counted, {} days -> {}",
                log.totals.lines,
                log.totals.records,
                log.totals.malformed,
                log.counted,
                log.days,
                cfg.daily_signal_path().display()
            );
        }
        Command::IngestPrices => {
            for log in pipeline::ingest_prices(&cfg)? {
                println!(
                    "{}: {} returns, {} skipped rows",
                    log.index,
                    log.returns,
                    log.skipped_rows.len()
                );
            }
        }
        Command::Build => {
            for b in pipeline::build(&cfg)? {
                println!(
                    "{}: {} rows, {} observed, {} dropped",
                    b.entry.name,
                    b.sample.len(),
                    b.meta.observed_rows,
                    b.meta.dropped_days.len()
                );
            }
        }
        Command::Fit => {
            pipeline::fit(&cfg)?;
            print!("{}", std::fs::read_to_string(out.join("table2.txt"))?);
        }
        Command::Robustness => {
            pipeline::robustness(&cfg)?;
            println!("wrote tableA1, tableA2, tableA3 and subsample to {}", out.display());
        }
        Command::Report => {
            pipeline::report(&cfg)?;
            print!("{}", std::fs::read_to_string(out.join("table2.txt"))?);
        }
        Command::Synth { dir } => {
            let fixture = write_fixture(&dir, &FixtureOptions::new(cfg.seed)).map_err(|source| {
                StageError {
                    stage: Stage::Synth,
                    source,
                }
            })?;
            println!("wrote {}", fixture.config.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
