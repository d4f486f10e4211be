use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AppRecord, Release, Review, ScoredReview};
use crate::engine::SentimentEngine;

/// One line of an archive file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    App(AppRecord),
    Release(Release),
    Review(Review),
    Scored(ScoredReview),
}

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("archive {0} is locked by another writer (remove {0}.lock if stale)")]
    Locked(PathBuf),
    #[error("serializing record: {0}")]
    Encode(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub skipped: Vec<SkippedLine>,
}

impl LoadReport {
    pub fn skipped_count(&self) -> usize {
        self.skipped.len()
    }
}

/// Everything collected for a study: app details, releases, and reviews
/// before and after scoring.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Archive {
    pub apps: Vec<AppRecord>,
    pub releases: Vec<Release>,
    /// Reviews not yet scored.
    pub reviews: Vec<Review>,
    pub scored: Vec<ScoredReview>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn app(&self, app_id: &str) -> Option<&AppRecord> {
        self.apps.iter().find(|a| a.app_id == app_id)
    }

    /// Inserts or replaces by `app_id`.
    pub fn upsert_app(&mut self, app: AppRecord) {
        match self.apps.iter_mut().find(|a| a.app_id == app.app_id) {
            Some(existing) => *existing = app,
            None => self.apps.push(app),
        }
    }

    /// Adds a release unless `(app_id, version)` is already present.
    pub fn add_release(&mut self, release: Release) -> bool {
        if self
            .releases
            .iter()
            .any(|r| r.app_id == release.app_id && r.version == release.version)
        {
            return false;
        }
        self.releases.push(release);
        true
    }

    fn review_keys(&self) -> HashSet<(String, String)> {
        self.reviews
            .iter()
            .chain(self.scored.iter().map(|s| &s.review))
            .map(|r| (r.app_id.clone(), r.review_id.clone()))
            .collect()
    }

    /// Appends reviews not already stored (by app and review id). Returns
    /// how many were added.
    pub fn add_reviews(&mut self, reviews: impl IntoIterator<Item = Review>) -> usize {
        let mut keys = self.review_keys();
        let before = self.reviews.len();
        for r in reviews {
            if keys.insert((r.app_id.clone(), r.review_id.clone())) {
                self.reviews.push(r);
            }
        }
        self.reviews.len() - before
    }

    pub fn review_count(&self) -> usize {
        self.reviews.len() + self.scored.len()
    }

    pub fn is_fully_scored(&self) -> bool {
        self.reviews.is_empty()
    }

    /// Latest review date stored for an app.
    pub fn newest_review_date(&self, app_id: &str) -> Option<NaiveDate> {
        self.reviews
            .iter()
            .chain(self.scored.iter().map(|s| &s.review))
            .filter(|r| r.app_id == app_id)
            .map(|r| r.date)
            .max()
    }

    /// Scores every review (rescoring already scored ones) so the archive
    /// reflects the engine's current lexicon.
    pub fn score_all(&mut self, engine: &SentimentEngine) {
        let pending = std::mem::take(&mut self.reviews);
        for s in &mut self.scored {
            *s = ScoredReview::new(s.review.clone(), engine.score_review(&s.review));
        }
        self.scored.extend(
            pending
                .into_iter()
                .map(|r| {
                    let score = engine.score_review(&r);
                    ScoredReview::new(r, score)
                }),
        );
    }

    pub fn records(&self) -> impl Iterator<Item = Record> + '_ {
        self.apps
            .iter()
            .cloned()
            .map(Record::App)
            .chain(self.releases.iter().cloned().map(Record::Release))
            .chain(self.reviews.iter().cloned().map(Record::Review))
            .chain(self.scored.iter().cloned().map(Record::Scored))
    }

    /// Writes one JSON record per line.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), ArchiveError> {
        for record in self.records() {
            serde_json::to_writer(&mut w, &record)?;
            w.write_all(b"\n").map_err(serde_json::Error::io)?;
        }
        w.flush().map_err(serde_json::Error::io)?;
        Ok(())
    }

    /// Reads records line by line. Lines that fail to parse or violate an
    /// entity invariant are skipped and reported; blank lines are ignored.
    pub fn read_from<R: BufRead>(reader: R) -> (Archive, LoadReport) {
        let mut archive = Archive::new();
        let mut report = LoadReport::default();
        let mut app_ids = HashSet::new();
        let mut review_keys = HashSet::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let mut skip = |reason: String| {
                log::warn!("archive line {line_no} skipped: {reason}");
                report.skipped.push(SkippedLine {
                    line: line_no,
                    reason,
                });
            };
            let line = match line {
                Ok(l) => l,
                Err(e) => {
                    skip(e.to_string());
                    continue;
                }
            };
            if line.trim().is_empty() {
                continue;
            }
            let record: Record = match serde_json::from_str(&line) {
                Ok(r) => r,
                Err(e) => {
                    skip(e.to_string());
                    continue;
                }
            };
            match record {
                Record::App(app) => {
                    if let Err(e) = app.validate() {
                        skip(e);
                    } else if !app_ids.insert(app.app_id.clone()) {
                        skip(format!("duplicate app {}", app.app_id));
                    } else {
                        archive.apps.push(app);
                    }
                }
                Record::Release(rel) => {
                    let (app_id, version) = (rel.app_id.clone(), rel.version.clone());
                    if !archive.add_release(rel) {
                        skip(format!("duplicate release {app_id} {version}"));
                    }
                }
                Record::Review(r) => {
                    if let Err(e) = r.validate() {
                        skip(e);
                    } else if !review_keys.insert((r.app_id.clone(), r.review_id.clone())) {
                        skip(format!("duplicate review {}", r.review_id));
                    } else {
                        archive.reviews.push(r);
                    }
                }
                Record::Scored(s) => {
                    if let Err(e) = s.review.validate() {
                        skip(e);
                    } else if !s.is_consistent() {
                        skip(format!(
                            "review {}: combined {} does not match score ({}, {})",
                            s.review.review_id,
                            s.combined,
                            s.score.positive(),
                            s.score.negative()
                        ));
                    } else if !review_keys
                        .insert((s.review.app_id.clone(), s.review.review_id.clone()))
                    {
                        skip(format!("duplicate review {}", s.review.review_id));
                    } else {
                        archive.scored.push(s);
                    }
                }
            }
        }
        (archive, report)
    }

    /// Writes the archive to `path` via a temporary file and rename.
    pub fn persist(&self, path: &Path) -> Result<(), ArchiveError> {
        let io_err = |source| ArchiveError::Io {
            path: path.to_path_buf(),
            source,
        };
        let tmp = path.with_extension("tmp");
        let file = File::create(&tmp).map_err(io_err)?;
        self.write_to(BufWriter::new(file))?;
        fs::rename(&tmp, path).map_err(io_err)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<(Archive, LoadReport), ArchiveError> {
        let file = File::open(path).map_err(|source| ArchiveError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::read_from(BufReader::new(file)))
    }

    /// Loads `path`, or returns an empty archive when it does not exist yet.
    pub fn load_or_default(path: &Path) -> Result<(Archive, LoadReport), ArchiveError> {
        if path.exists() {
            Self::load(path)
        } else {
            Ok((Archive::new(), LoadReport::default()))
        }
    }
}

/// Exclusive writer lock: a `<archive>.lock` file created on acquire and
/// removed on drop.
#[derive(Debug)]
pub struct ArchiveLock {
    path: PathBuf,
}

impl ArchiveLock {
    pub fn acquire(archive: &Path) -> Result<Self, ArchiveError> {
        let mut name = archive.as_os_str().to_owned();
        name.push(".lock");
        let path = PathBuf::from(name);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Self { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(ArchiveError::Locked(archive.to_path_buf()))
            }
            Err(source) => Err(ArchiveError::Io { path, source }),
        }
    }
}

impl Drop for ArchiveLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
