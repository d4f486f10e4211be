//! Apps, reviews and releases, their line-delimited archive, and the
//! store clients that fill it.

mod archive;
mod client;
mod releases;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::combine::{combine, CombinedSentiment};
use crate::engine::SentimentScore;

pub use archive::{Archive, ArchiveError, ArchiveLock, LoadReport, Record, SkippedLine};
pub use client::{
    fetch_app_details, fetch_reviews, fetch_reviews_for_apps, AppDetailsBatch, ClientConfig,
    FetchError, HttpStoreClient, ReviewFetch, StoreApi, BASE_URL_ENV, RATE_LIMIT_ENV,
};
pub use releases::{import_releases, ReleaseImport, Rejection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppRecord {
    pub app_id: String,
    pub name: String,
    pub primary_category: String,
    pub price: f64,
    pub is_free: bool,
    pub current_version: String,
    /// The store's payload, verbatim.
    #[serde(default)]
    pub raw_details: Map<String, Value>,
}

impl AppRecord {
    pub fn validate(&self) -> Result<(), String> {
        if self.app_id.is_empty() {
            return Err("empty app_id".into());
        }
        if !(self.price.is_finite() && self.price >= 0.0) {
            return Err(format!("app {}: invalid price {}", self.app_id, self.price));
        }
        if self.is_free != (self.price == 0.0) {
            return Err(format!(
                "app {}: is_free={} disagrees with price {}",
                self.app_id, self.is_free, self.price
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub review_id: String,
    pub app_id: String,
    pub author: String,
    pub title: String,
    pub body: String,
    pub rating: u8,
    pub date: NaiveDate,
    pub helpful_votes: u32,
    pub app_version: String,
    #[serde(default)]
    pub raw: Map<String, Value>,
}

impl Review {
    pub fn validate(&self) -> Result<(), String> {
        if self.review_id.is_empty() || self.app_id.is_empty() {
            return Err("review without review_id or app_id".into());
        }
        if !(1..=5).contains(&self.rating) {
            return Err(format!("review {}: rating {} not in 1..=5", self.review_id, self.rating));
        }
        Ok(())
    }

    /// Title plus body length in characters.
    pub fn text_length(&self) -> usize {
        self.title.chars().count() + self.body.chars().count()
    }

    #[cfg(test)]
    pub(crate) fn example() -> Self {
        Review {
            review_id: "r1".into(),
            app_id: "a1".into(),
            author: "someone".into(),
            title: String::new(),
            body: String::new(),
            rating: 5,
            date: NaiveDate::from_ymd_opt(2016, 1, 4).unwrap(),
            helpful_votes: 0,
            app_version: "1.0".into(),
            raw: Map::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Release {
    pub app_id: String,
    pub version: String,
    pub date: NaiveDate,
    #[serde(default)]
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredReview {
    pub review: Review,
    pub score: SentimentScore,
    pub combined: CombinedSentiment,
}

impl ScoredReview {
    pub fn new(review: Review, score: SentimentScore) -> Self {
        Self {
            review,
            score,
            combined: combine(score),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.combined == combine(self.score)
    }
}
