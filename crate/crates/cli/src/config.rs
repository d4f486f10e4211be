use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use appemotion_core::emoji::EmojiLexicon;
use appemotion_core::store::ClientConfig;
use appemotion_core::temporal::PatternConfig;
use appemotion_core::{Lexicon, SentimentEngine};
use chrono::NaiveDate;

use crate::args::{Command, GlobalArgs};

/// Validated settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub archive: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub emoji_lexicon: Option<PathBuf>,
    pub min_occurrences: u64,
    pub no_emoji: bool,
    pub client: ClientConfig,
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub min_reviews: usize,
    pub pattern: PatternConfig,
    pub output: Option<PathBuf>,
}

fn require_file(what: &str, path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("{what} {} does not exist or is not a file", path.display());
    }
    Ok(())
}

impl RunConfig {
    /// Checks everything that can be checked before the archive is touched.
    pub fn new(g: &GlobalArgs, command: &Command) -> Result<Self> {
        if g.from > g.to {
            bail!("--from {} is after --to {}", g.from, g.to);
        }
        let pattern = PatternConfig {
            jump_threshold: g.pattern.jump_threshold,
            window: g.pattern.window,
            slope_threshold: g.pattern.slope_threshold,
            fit_threshold: g.pattern.fit_threshold,
            low_variance: g.pattern.low_variance,
            min_weekly_reviews: g.pattern.min_weekly_reviews,
        };
        pattern.validate()?;
        if !(g.rate_limit.is_finite() && g.rate_limit >= 0.0) {
            bail!("--rate-limit must be a non-negative number, got {}", g.rate_limit);
        }
        if !(g.base_url.starts_with("http://") || g.base_url.starts_with("https://")) {
            bail!("--base-url must be an http(s) URL, got {:?}", g.base_url);
        }
        if let Some(p) = &g.lexicon {
            require_file("lexicon manifest", p)?;
        }
        if let Some(p) = &g.emoji_lexicon {
            require_file("emoji lexicon", p)?;
        }
        match command {
            Command::Ingest { apps, import, releases } => {
                if apps.is_empty() && import.is_none() && releases.is_none() {
                    bail!("ingest needs --app, --import or --releases");
                }
                if let Some(p) = import {
                    require_file("import archive", p)?;
                }
                if let Some(p) = releases {
                    require_file("release file", p)?;
                }
                let parent = g.archive.parent().filter(|p| !p.as_os_str().is_empty());
                if let Some(dir) = parent.filter(|d| !d.is_dir()) {
                    bail!("archive directory {} does not exist", dir.display());
                }
            }
            Command::Topics { labeled } => require_file("labeled topic file", labeled)?,
            Command::EmojiConvert { input, .. } => require_file("emoji ranking file", input)?,
            c if c.reads_archive() => require_file("archive", &g.archive)?,
            _ => {}
        }
        Ok(RunConfig {
            archive: g.archive.clone(),
            lexicon: g.lexicon.clone(),
            emoji_lexicon: g.emoji_lexicon.clone(),
            min_occurrences: g.min_occurrences,
            no_emoji: g.no_emoji,
            client: ClientConfig {
                base_url: g.base_url.clone(),
                rate_limit: g.rate_limit,
                ..ClientConfig::default()
            },
            from: g.from,
            to: g.to,
            min_reviews: g.min_reviews,
            pattern,
            output: g.output.clone(),
        })
    }

    pub fn engine(&self) -> Result<SentimentEngine> {
        let lexicon = match &self.lexicon {
            Some(path) => {
                let (lexicon, warnings) = Lexicon::from_manifest(path)
                    .with_context(|| format!("loading lexicon {}", path.display()))?;
                for w in warnings {
                    log::warn!("{}: line {}: duplicate term {:?}, last entry kept", w.role.name(), w.line, w.term);
                }
                lexicon
            }
            None => Lexicon::seed(),
        };
        let emoji = if self.no_emoji {
            None
        } else {
            let full = match &self.emoji_lexicon {
                Some(path) => {
                    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                    EmojiLexicon::from_csv(file).with_context(|| format!("reading {}", path.display()))?
                }
                None => EmojiLexicon::published(),
            };
            let selected = full.select_frequent(self.min_occurrences);
            log::debug!("{} of {} emojis selected", selected.len(), full.len());
            Some(selected)
        };
        Ok(SentimentEngine::new(lexicon, emoji))
    }
}
