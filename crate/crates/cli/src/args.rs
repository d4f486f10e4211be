use std::path::PathBuf;

use appemotion_core::store::{BASE_URL_ENV, RATE_LIMIT_ENV};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "appemotion", version, about = "Emotion analysis of app store reviews")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Review archive (JSON lines).
    #[arg(long, global = true, default_value = "archive.jsonl")]
    pub archive: PathBuf,
    /// Lexicon manifest; the bundled seed lexicon when omitted.
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    /// Emoji lexicon CSV (emoji,occurrences,polarity); the bundled one when omitted.
    #[arg(long, global = true)]
    pub emoji_lexicon: Option<PathBuf>,
    /// Only emojis seen more often than this are substituted.
    #[arg(long, global = true, default_value_t = 100)]
    pub min_occurrences: u64,
    /// Disable emoji substitution.
    #[arg(long, global = true)]
    pub no_emoji: bool,
    #[arg(long, global = true, env = BASE_URL_ENV, default_value = "https://itunes.apple.com")]
    pub base_url: String,
    /// Requests per second against the store; 0 disables limiting.
    #[arg(long, global = true, env = RATE_LIMIT_ENV, default_value_t = 1.0)]
    pub rate_limit: f64,
    /// First day of the analysis window.
    #[arg(long, global = true, default_value = "2016-01-04")]
    pub from: NaiveDate,
    /// Last day of the analysis window.
    #[arg(long, global = true, default_value = "2016-12-18")]
    pub to: NaiveDate,
    /// Apps need more reviews than this in the window for a pattern report.
    #[arg(long, global = true, default_value_t = 1000)]
    pub min_reviews: usize,
    #[command(flatten)]
    pub pattern: PatternArgs,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PatternArgs {
    /// Window-mean difference counted as a jump or drop.
    #[arg(long, global = true, default_value_t = 2.0)]
    pub jump_threshold: f64,
    /// Window length in weeks.
    #[arg(long, global = true, default_value_t = 3)]
    pub window: usize,
    /// Weekly slope counted as a steady trend.
    #[arg(long, global = true, default_value_t = 0.03)]
    pub slope_threshold: f64,
    /// R² needed for a steady trend.
    #[arg(long, global = true, default_value_t = 0.8)]
    pub fit_threshold: f64,
    /// SD of weekly means at or below which emotion is consistent.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub low_variance: f64,
    /// Weeks with fewer reviews are skipped.
    #[arg(long, global = true, default_value_t = 1)]
    pub min_weekly_reviews: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Rating,
    Price,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add apps, reviews and releases to the archive.
    Ingest {
        /// Store app ids to fetch (details and reviews).
        #[arg(long = "app", value_delimiter = ',')]
        apps: Vec<String>,
        /// Merge another archive file.
        #[arg(long)]
        import: Option<PathBuf>,
        /// Release CSV (app_id,version,date,notes).
        #[arg(long)]
        releases: Option<PathBuf>,
    },
    /// Score every review in the archive.
    Score,
    /// Per-category statistics with an overall ALL row.
    Summarize,
    /// Correlation of combined sentiment with rating or price.
    Correlate {
        #[arg(long, value_enum)]
        target: Target,
        /// Leave out reviews with combined sentiment 0.
        #[arg(long)]
        exclude_neutral: bool,
    },
    /// Sentiment distribution per star rating.
    Ratings,
    /// Sentiment dispersion per review topic from a labeled CSV.
    Topics {
        /// CSV with id,topic,title,body and an optional combined column.
        #[arg(long)]
        labeled: PathBuf,
    },
    /// Weekly plot data for one app.
    Timeline {
        #[arg(long)]
        app: String,
    },
    /// Pattern labels for every qualifying app.
    Patterns,
    /// Before/after comparison around each release of one app.
    Impact {
        #[arg(long)]
        app: String,
    },
    /// Convert the Emoji Sentiment Ranking CSV to the emoji lexicon format.
    EmojiConvert {
        input: PathBuf,
        /// Keep emojis with at least this many occurrences.
        #[arg(long, default_value_t = 5)]
        min: u64,
    },
}

impl Command {
    /// Commands that modify the archive.
    pub fn writes_archive(&self) -> bool {
        matches!(self, Command::Ingest { .. } | Command::Score)
    }

    /// Commands that read an existing archive.
    pub fn reads_archive(&self) -> bool {
        !matches!(self, Command::Topics { .. } | Command::EmojiConvert { .. } | Command::Ingest { .. })
    }
}
