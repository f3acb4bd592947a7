//! Newline-delimited JSON tweet ingestion.
//!
//! Each line holds one object with `created_at` (RFC 3339), `text`,
//! `is_retweet` and `user_id`. Files are read in a single streaming pass;
//! several files can be processed by a pool of workers whose per-day
//! tallies are summed, so the result does not depend on the worker count.

use std::borrow::Cow;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};
use sharesignal_core::corpus::{CountConfig, DailyCounts, DailySignal, TermFilter, TweetRecord};
use sharesignal_core::NaiveDate;

use crate::error::{Error, Result};
use crate::fmt::fmt_sig;

/// How malformed lines are treated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    /// Stop at the first malformed line.
    Strict,
    /// Skip and count malformed lines.
    #[default]
    Lenient,
}

#[derive(Deserialize)]
struct RawTweet<'a> {
    #[serde(borrow)]
    created_at: Cow<'a, str>,
    #[serde(borrow)]
    text: Cow<'a, str>,
    is_retweet: bool,
    #[serde(borrow)]
    user_id: Cow<'a, str>,
}

/// A parsed line, borrowing from the line buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct TweetRef<'a> {
    pub timestamp: DateTime<Utc>,
    pub text: Cow<'a, str>,
    pub is_retweet: bool,
    pub user_id: Cow<'a, str>,
}

impl TweetRef<'_> {
    pub fn into_owned(self) -> TweetRecord {
        TweetRecord {
            timestamp: self.timestamp,
            text: self.text.into_owned(),
            is_retweet: self.is_retweet,
            user_id: self.user_id.into_owned(),
        }
    }
}

/// Parses an ISO-8601 timestamp. Values without an offset are taken as UTC.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f")
        .ok()
        .map(|n| n.and_utc())
}

/// Parses one line into a record, or explains why it is malformed.
pub fn parse_line(line: &[u8]) -> std::result::Result<TweetRef<'_>, String> {
    let raw: RawTweet = serde_json::from_slice(line).map_err(|e| e.to_string())?;
    let timestamp = parse_timestamp(&raw.created_at)
        .ok_or_else(|| format!("invalid created_at `{}`", raw.created_at))?;
    Ok(TweetRef {
        timestamp,
        text: raw.text,
        is_retweet: raw.is_retweet,
        user_id: raw.user_id,
    })
}

/// Line counts for one source.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StreamStats {
    pub lines: u64,
    pub records: u64,
    pub malformed: u64,
}

impl StreamStats {
    fn absorb(&mut self, other: &StreamStats) {
        self.lines += other.lines;
        self.records += other.records;
        self.malformed += other.malformed;
    }
}

/// Calls `f` for every well-formed record of `source`, in order. Blank lines
/// are ignored. `name` labels errors.
pub fn for_each_tweet<R, F>(source: R, name: &Path, mode: ParseMode, mut f: F) -> Result<StreamStats>
where
    R: Read,
    F: FnMut(TweetRef<'_>),
{
    let mut reader = BufReader::with_capacity(1 << 16, source);
    let mut buf = Vec::with_capacity(1024);
    let mut stats = StreamStats::default();
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io(name, e))?;
        if n == 0 {
            break;
        }
        stats.lines += 1;
        let line = buf.trim_ascii();
        if line.is_empty() {
            continue;
        }
        match parse_line(line) {
            Ok(t) => {
                stats.records += 1;
                f(t);
            }
            Err(message) => match mode {
                ParseMode::Strict => {
                    return Err(Error::Parse {
                        path: name.to_path_buf(),
                        line: stats.lines,
                        message,
                    })
                }
                ParseMode::Lenient => stats.malformed += 1,
            },
        }
    }
    Ok(stats)
}

/// Collects every well-formed record of `source`.
pub fn parse_tweet_stream<R: Read>(
    source: R,
    mode: ParseMode,
) -> Result<(Vec<TweetRecord>, StreamStats)> {
    let mut out = Vec::new();
    let stats = for_each_tweet(source, Path::new("<stream>"), mode, |t| {
        out.push(t.into_owned())
    })?;
    Ok((out, stats))
}

/// Counting settings for [`ingest_files`].
#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub count: CountConfig,
    pub terms: TermFilter,
    pub mode: ParseMode,
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileStats {
    pub path: PathBuf,
    pub bytes: u64,
    #[serde(flatten)]
    pub stats: StreamStats,
    /// Records that passed the term filter and retweet policy.
    pub counted: u64,
}

#[derive(Debug, Clone)]
pub struct IngestReport {
    /// In input order.
    pub files: Vec<FileStats>,
    pub counts: DailyCounts,
}

impl IngestReport {
    pub fn totals(&self) -> StreamStats {
        let mut t = StreamStats::default();
        for f in &self.files {
            t.absorb(&f.stats);
        }
        t
    }

    pub fn signals(&self) -> Vec<DailySignal> {
        self.counts.to_signals()
    }
}

fn ingest_one(path: &Path, options: &IngestOptions) -> Result<(FileStats, DailyCounts)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let bytes = file.metadata().map(|m| m.len()).unwrap_or(0);
    let mut counts = DailyCounts::new();
    let mut counted = 0;
    let stats = for_each_tweet(file, path, options.mode, |t| {
        if counts.add_filtered(&options.count, &options.terms, &t.timestamp, &t.text, t.is_retweet)
        {
            counted += 1;
        }
    })?;
    Ok((
        FileStats {
            path: path.to_path_buf(),
            bytes,
            stats,
            counted,
        },
        counts,
    ))
}

/// Ingests `paths` with up to `options.workers` threads. Files are handed
/// out one at a time; per-day tallies are merged by summation.
pub fn ingest_files(paths: &[PathBuf], options: &IngestOptions) -> Result<IngestReport> {
    let workers = match options.workers {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
    .min(paths.len())
    .max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<FileStats>>> = Mutex::new(vec![None; paths.len()]);

    let partials: Vec<Result<DailyCounts>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = DailyCounts::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(path) = paths.get(i) else {
                            return Ok(local);
                        };
                        let (stats, counts) = ingest_one(path, options)?;
                        local.merge(counts);
                        slots.lock().expect("stats lock")[i] = Some(stats);
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("ingest worker panicked"))
            .collect()
    });

    let mut counts = DailyCounts::new();
    for p in partials {
        counts.merge(p?);
    }
    let files = slots
        .into_inner()
        .expect("stats lock")
        .into_iter()
        .map(|s| s.expect("every file processed"))
        .collect();
    Ok(IngestReport { files, counts })
}

/// Expands glob patterns into a sorted, de-duplicated file list.
pub fn expand_globs<S: AsRef<str>>(patterns: &[S]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in patterns {
        let p = p.as_ref();
        let entries = glob::glob(p).map_err(|e| Error::Config(format!("bad glob `{p}`: {e}")))?;
        for entry in entries {
            let path = entry.map_err(|e| {
                let p = e.path().to_path_buf();
                Error::io(p, e.into())
            })?;
            if path.is_file() {
                out.push(path);
            }
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        let joined: Vec<&str> = patterns.iter().map(|p| p.as_ref()).collect();
        return Err(Error::NoInput(joined.join(", ")));
    }
    Ok(out)
}

pub const DAILY_HEADER: [&str; 4] = ["date", "mention_count", "tweet_count", "share"];

/// Writes `date,mention_count,tweet_count,share` with shares at ten
/// significant digits.
pub fn write_daily_csv<W: Write>(out: W, signals: &[DailySignal]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DAILY_HEADER)?;
    for s in signals {
        w.write_record([
            s.date.to_string(),
            s.mention_count.to_string(),
            s.tweet_count.to_string(),
            fmt_sig(s.share, 10),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a daily-signal CSV. Shares are recomputed from the counts.
pub fn read_daily_csv<R: Read>(source: R, name: &Path) -> Result<Vec<DailySignal>> {
    let mut r = csv::Reader::from_reader(source);
    let header = r.headers().map_err(|e| Error::csv(name, e))?.clone();
    if header.iter().collect::<Vec<_>>() != DAILY_HEADER {
        return Err(Error::format(
            name,
            format!("expected header {}, found {}", DAILY_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(|e| Error::csv(name, e))?;
        let line = i as u64 + 2;
        let bad = |what: &str| Error::Parse {
            path: name.to_path_buf(),
            line,
            message: format!("invalid {what}"),
        };
        let date: NaiveDate = row[0].parse().map_err(|_| bad("date"))?;
        let mentions: u64 = row[1].parse().map_err(|_| bad("mention_count"))?;
        let tweets: u64 = row[2].parse().map_err(|_| bad("tweet_count"))?;
        out.push(DailySignal::from_counts(date, mentions, tweets));
    }
    Ok(out)
}
