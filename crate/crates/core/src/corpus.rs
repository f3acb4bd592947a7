//! Keyword counting and daily aggregation over tweet records.
//!
//! A tweet contributes one unit to its day's `tweet_count` and
//! [`count_keyword`] units to its day's `mention_count`. Per-day tallies are
//! plain integer sums, so partial tallies built from shards of a corpus can
//! be merged in any order and produce the same [`DailySignal`] sequence.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{DateTime, FixedOffset, NaiveDate, Utc};

/// One tweet as read from a dump.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub timestamp: DateTime<Utc>,
    pub text: String,
    pub is_retweet: bool,
    pub user_id: String,
}

/// How a keyword is matched against the tokens of a tweet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MatchMode {
    /// Whole-token equality.
    #[default]
    Exact,
    /// Tokens starting with the keyword.
    Prefix,
    /// Every occurrence in the lowercased text, token boundaries ignored.
    Substring,
}

impl MatchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchMode::Exact => "exact",
            MatchMode::Prefix => "prefix",
            MatchMode::Substring => "substring",
        }
    }
}

impl core::str::FromStr for MatchMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(MatchMode::Exact),
            "prefix" => Ok(MatchMode::Prefix),
            "substring" => Ok(MatchMode::Substring),
            other => Err(crate::Error::Argument(alloc::format!(
                "unknown match mode `{other}` (expected exact, prefix or substring)"
            ))),
        }
    }
}

/// Per-day keyword statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DailySignal {
    pub date: NaiveDate,
    pub mention_count: u64,
    pub tweet_count: u64,
    /// `mention_count / tweet_count`; zero when `tweet_count` is zero.
    pub share: f64,
}

impl DailySignal {
    pub fn from_counts(date: NaiveDate, mention_count: u64, tweet_count: u64) -> Self {
        let share = if tweet_count == 0 {
            0.0
        } else {
            mention_count as f64 / tweet_count as f64
        };
        DailySignal {
            date,
            mention_count,
            tweet_count,
            share,
        }
    }
}

fn tokens(lowered: &str) -> impl Iterator<Item = &str> {
    lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
}

/// Counts occurrences of `keyword` in `text`.
///
/// The text is lowercased and split into tokens on every non-alphanumeric
/// code point. `keyword` is expected in lowercase; an empty keyword counts
/// nothing. Substring matches are non-overlapping.
pub fn count_keyword(text: &str, keyword: &str, mode: MatchMode) -> u64 {
    if keyword.is_empty() {
        return 0;
    }
    let lowered = text.to_lowercase();
    count_in_lowered(&lowered, keyword, mode)
}

fn count_in_lowered(lowered: &str, keyword: &str, mode: MatchMode) -> u64 {
    match mode {
        MatchMode::Exact => tokens(lowered).filter(|t| *t == keyword).count() as u64,
        MatchMode::Prefix => tokens(lowered).filter(|t| t.starts_with(keyword)).count() as u64,
        MatchMode::Substring => lowered.matches(keyword).count() as u64,
    }
}

/// Case-insensitive substring filter over a fixed list of search terms.
#[derive(Debug, Clone, Default)]
pub struct TermFilter {
    terms: Vec<String>,
}

impl TermFilter {
    pub fn new<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let terms = terms
            .into_iter()
            .map(|t| t.as_ref().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        TermFilter { terms }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn matches(&self, text: &str) -> bool {
        let lowered = text.to_lowercase();
        self.matches_lowered(&lowered)
    }

    fn matches_lowered(&self, lowered: &str) -> bool {
        self.terms.iter().any(|t| lowered.contains(t.as_str()))
    }
}

/// Keeps the records whose text contains any of `terms`, case-insensitively.
pub fn filter_by_terms<I, S>(records: I, terms: &[S]) -> Vec<TweetRecord>
where
    I: IntoIterator<Item = TweetRecord>,
    S: AsRef<str>,
{
    let filter = TermFilter::new(terms);
    records
        .into_iter()
        .filter(|r| filter.matches(&r.text))
        .collect()
}

/// Settings for turning records into per-day tallies.
#[derive(Debug, Clone)]
pub struct CountConfig {
    pub keyword: String,
    pub mode: MatchMode,
    /// Offset applied to UTC timestamps before taking the calendar date.
    pub day_boundary: FixedOffset,
    /// Drop retweets from both numerator and denominator.
    pub originals_only: bool,
}

impl CountConfig {
    pub fn new(keyword: &str, mode: MatchMode) -> Self {
        CountConfig {
            keyword: keyword.to_lowercase(),
            mode,
            day_boundary: FixedOffset::east_opt(0).expect("zero offset"),
            originals_only: false,
        }
    }

    pub fn with_day_boundary(mut self, offset: FixedOffset) -> Self {
        self.day_boundary = offset;
        self
    }

    pub fn originals_only(mut self, yes: bool) -> Self {
        self.originals_only = yes;
        self
    }

    pub fn day_of(&self, timestamp: &DateTime<Utc>) -> NaiveDate {
        timestamp.with_timezone(&self.day_boundary).date_naive()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    mentions: u64,
    tweets: u64,
}

/// Mergeable per-day mention and tweet tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DailyCounts {
    days: BTreeMap<NaiveDate, Tally>,
}

impl DailyCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one record. Returns false when the record is excluded by the
    /// retweet policy.
    pub fn add(&mut self, config: &CountConfig, record: &TweetRecord) -> bool {
        self.add_parts(config, &record.timestamp, &record.text, record.is_retweet)
    }

    /// Same as [`DailyCounts::add`] without requiring an owned record.
    pub fn add_parts(
        &mut self,
        config: &CountConfig,
        timestamp: &DateTime<Utc>,
        text: &str,
        is_retweet: bool,
    ) -> bool {
        if config.originals_only && is_retweet {
            return false;
        }
        let mentions = count_keyword(text, &config.keyword, config.mode);
        self.add_tally(config.day_of(timestamp), mentions, 1);
        true
    }

    /// Adds a filtered record: returns false (and records nothing) unless
    /// `filter` matches the text.
    pub fn add_filtered(
        &mut self,
        config: &CountConfig,
        filter: &TermFilter,
        timestamp: &DateTime<Utc>,
        text: &str,
        is_retweet: bool,
    ) -> bool {
        if config.originals_only && is_retweet {
            return false;
        }
        let lowered = text.to_lowercase();
        if !filter.is_empty() && !filter.matches_lowered(&lowered) {
            return false;
        }
        let mentions = if config.keyword.is_empty() {
            0
        } else {
            count_in_lowered(&lowered, &config.keyword, config.mode)
        };
        self.add_tally(config.day_of(timestamp), mentions, 1);
        true
    }

    pub fn add_tally(&mut self, date: NaiveDate, mentions: u64, tweets: u64) {
        let t = self.days.entry(date).or_default();
        t.mentions += mentions;
        t.tweets += tweets;
    }

    pub fn merge(&mut self, other: DailyCounts) {
        for (date, t) in other.days {
            self.add_tally(date, t.mentions, t.tweets);
        }
    }

    pub fn total_tweets(&self) -> u64 {
        self.days.values().map(|t| t.tweets).sum()
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn to_signals(&self) -> Vec<DailySignal> {
        self.days
            .iter()
            .map(|(d, t)| DailySignal::from_counts(*d, t.mentions, t.tweets))
            .collect()
    }
}

/// Buckets records into calendar days and returns one [`DailySignal`] per
/// day that has at least one record, ordered by date.
pub fn aggregate_daily<'a, I>(records: I, config: &CountConfig) -> Vec<DailySignal>
where
    I: IntoIterator<Item = &'a TweetRecord>,
{
    let mut counts = DailyCounts::new();
    for r in records {
        counts.add(config, r);
    }
    counts.to_signals()
}

impl core::fmt::Display for MatchMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}
