//! Store clients.
//!
//! App details come from an iTunes-Search-style lookup endpoint:
//!
//! ```text
//! GET {base}/lookup?id={app_id}&country=us
//!   -> {"resultCount": 1, "results": [{"trackId": ..., "trackName": ...,
//!       "primaryGenreName": ..., "price": ..., "version": ..., ...}]}
//! ```
//!
//! Reviews come from a paged feed, newest first, ending with an empty page:
//!
//! ```text
//! GET {base}/reviews?id={app_id}&page={n}
//!   -> {"reviews": [{"id": ..., "author": ..., "title": ..., "body": ...,
//!       "rating": 1..5, "date": "YYYY-MM-DD", "votes": ..., "version": ...}]}
//! ```

use std::collections::HashSet;
use std::future::Future;
use std::time::Duration;

use chrono::NaiveDate;
use serde::Deserialize;
use serde_json::{Map, Value};
use thiserror::Error;
use tokio::sync::Mutex;
use tokio::time::Instant;

use super::{AppRecord, Review};

pub const BASE_URL_ENV: &str = "APPEMOTION_BASE_URL";
pub const RATE_LIMIT_ENV: &str = "APPEMOTION_RATE_LIMIT";

#[derive(Debug, Clone, Error)]
pub enum FetchError {
    #[error("no ids")]
    NoIds,
    #[error("{0} not found")]
    NotFound(String),
    #[error("HTTP {status} from {url}")]
    Status { status: u16, url: String },
    #[error("request to {url} failed: {reason}")]
    Transport { url: String, reason: String },
    #[error("unexpected payload from {url}: {reason}")]
    Parse { url: String, reason: String },
    #[error("all {} ids failed", .0.len())]
    AllFailed(Vec<(String, FetchError)>),
}

impl FetchError {
    fn is_transient(&self) -> bool {
        match self {
            FetchError::Transport { .. } => true,
            FetchError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClientConfig {
    pub base_url: String,
    /// Requests per second; zero or negative disables limiting.
    pub rate_limit: f64,
    pub max_retries: u32,
    /// First retry delay; doubled on each further attempt.
    pub backoff: Duration,
    pub timeout: Duration,
    /// Safety cap on pages fetched per app.
    pub max_pages: u32,
}

impl Default for ClientConfig {
    fn default() -> Self {
        Self {
            base_url: "https://itunes.apple.com".into(),
            rate_limit: 1.0,
            max_retries: 3,
            backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(30),
            max_pages: 10_000,
        }
    }
}

impl ClientConfig {
    /// Defaults overridden by `APPEMOTION_BASE_URL` / `APPEMOTION_RATE_LIMIT`.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Ok(url) = std::env::var(BASE_URL_ENV) {
            cfg.base_url = url;
        }
        if let Some(rate) = std::env::var(RATE_LIMIT_ENV)
            .ok()
            .and_then(|r| r.parse().ok())
        {
            cfg.rate_limit = rate;
        }
        cfg
    }
}

/// The two calls ingestion needs from an app store.
pub trait StoreApi: Sync {
    fn lookup(&self, app_id: &str) -> impl Future<Output = Result<AppRecord, FetchError>> + Send;

    /// One page of reviews, newest first. An empty page means no more.
    fn review_page(
        &self,
        app_id: &str,
        page: u32,
    ) -> impl Future<Output = Result<Vec<Review>, FetchError>> + Send;

    fn max_pages(&self) -> u32 {
        u32::MAX
    }
}

#[derive(Debug, Clone, Default)]
pub struct AppDetailsBatch {
    pub apps: Vec<AppRecord>,
    pub errors: Vec<(String, FetchError)>,
}

/// Looks up each id. Failures are collected per id; the call only fails
/// when the list is empty or every id failed.
pub async fn fetch_app_details<A: StoreApi>(
    api: &A,
    app_ids: &[String],
) -> Result<AppDetailsBatch, FetchError> {
    if app_ids.is_empty() {
        return Err(FetchError::NoIds);
    }
    let mut batch = AppDetailsBatch::default();
    for id in app_ids {
        match api.lookup(id).await {
            Ok(app) => batch.apps.push(app),
            Err(e) => {
                log::warn!("app {id}: {e}");
                batch.errors.push((id.clone(), e));
            }
        }
    }
    if batch.apps.is_empty() {
        return Err(FetchError::AllFailed(batch.errors));
    }
    Ok(batch)
}

#[derive(Debug, Clone, Default)]
pub struct ReviewFetch {
    pub app_id: String,
    pub reviews: Vec<Review>,
    /// Reviews dropped because their id was already seen in this fetch.
    pub duplicates: usize,
    pub pages: u32,
    /// Set when paging stopped on a persistent failure; `reviews` then
    /// holds what was fetched before it.
    pub error: Option<FetchError>,
}

/// Drains the review feed for one app. Paging stops on an empty page, on
/// the first review dated on or before `since` (only strictly newer reviews
/// are kept), or on a persistent error.
pub async fn fetch_reviews<A: StoreApi>(api: &A, app_id: &str, since: Option<NaiveDate>) -> ReviewFetch {
    let mut out = ReviewFetch {
        app_id: app_id.to_string(),
        ..Default::default()
    };
    let mut seen = HashSet::new();
    let mut page = 1;
    loop {
        let reviews = match api.review_page(app_id, page).await {
            Ok(r) => r,
            Err(e) => {
                log::warn!("app {app_id}, page {page}: {e}");
                out.error = Some(e);
                break;
            }
        };
        out.pages = page;
        if reviews.is_empty() {
            break;
        }
        let mut reached_since = false;
        for r in reviews {
            if since.is_some_and(|s| r.date <= s) {
                reached_since = true;
                continue;
            }
            if seen.insert(r.review_id.clone()) {
                out.reviews.push(r);
            } else {
                out.duplicates += 1;
            }
        }
        if reached_since || page >= api.max_pages() {
            break;
        }
        page += 1;
    }
    if out.duplicates > 0 {
        log::warn!("app {app_id}: dropped {} duplicate reviews", out.duplicates);
    }
    out
}

/// One concurrent fetch per app; results come back in input order.
pub async fn fetch_reviews_for_apps<A: StoreApi>(
    api: &A,
    requests: &[(String, Option<NaiveDate>)],
) -> Vec<ReviewFetch> {
    futures::future::join_all(
        requests
            .iter()
            .map(|(id, since)| fetch_reviews(api, id, *since)),
    )
    .await
}

/// HTTP implementation of [`StoreApi`] with rate limiting and retries.
#[derive(Debug)]
pub struct HttpStoreClient {
    http: reqwest::Client,
    config: ClientConfig,
    next_slot: Mutex<Option<Instant>>,
}

#[derive(Deserialize)]
struct LookupResponse {
    #[serde(rename = "resultCount", default)]
    result_count: u64,
    #[serde(default)]
    results: Vec<Map<String, Value>>,
}

#[derive(Deserialize)]
struct ReviewPage {
    #[serde(default)]
    reviews: Vec<Map<String, Value>>,
}

impl HttpStoreClient {
    pub fn new(config: ClientConfig) -> Result<Self, FetchError> {
        let http = reqwest::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| FetchError::Transport {
                url: config.base_url.clone(),
                reason: e.to_string(),
            })?;
        Ok(Self {
            http,
            config,
            next_slot: Mutex::new(None),
        })
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    async fn wait_for_slot(&self) {
        if !(self.config.rate_limit > 0.0 && self.config.rate_limit.is_finite()) {
            return;
        }
        let interval = Duration::from_secs_f64(1.0 / self.config.rate_limit);
        let mut slot = self.next_slot.lock().await;
        let now = Instant::now();
        let at = slot.map_or(now, |s| s.max(now));
        *slot = Some(at + interval);
        drop(slot);
        tokio::time::sleep_until(at).await;
    }

    fn url(&self, path: &str) -> String {
        format!("{}/{}", self.config.base_url.trim_end_matches('/'), path)
    }

    async fn get_json<T: serde::de::DeserializeOwned>(
        &self,
        path: &str,
        query: &[(&str, String)],
    ) -> Result<T, FetchError> {
        let url = self.url(path);
        let mut attempt = 0;
        loop {
            self.wait_for_slot().await;
            let result = self.get_once(&url, query).await;
            match result {
                Err(e) if e.is_transient() && attempt < self.config.max_retries => {
                    let delay = self.config.backoff * 2u32.saturating_pow(attempt);
                    log::debug!("{url}: {e}; retry {} in {delay:?}", attempt + 1);
                    tokio::time::sleep(delay).await;
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    async fn get_once<T: serde::de::DeserializeOwned>(
        &self,
        url: &str,
        query: &[(&str, String)],
    ) -> Result<T, FetchError> {
        let resp = self
            .http
            .get(url)
            .query(query)
            .send()
            .await
            .map_err(|e| FetchError::Transport {
                url: url.to_string(),
                reason: e.to_string(),
            })?;
        let status = resp.status();
        if !status.is_success() {
            return Err(FetchError::Status {
                status: status.as_u16(),
                url: url.to_string(),
            });
        }
        let bytes = resp.bytes().await.map_err(|e| FetchError::Transport {
            url: url.to_string(),
            reason: e.to_string(),
        })?;
        serde_json::from_slice(&bytes).map_err(|e| FetchError::Parse {
            url: url.to_string(),
            reason: e.to_string(),
        })
    }
}

fn as_string(v: Option<&Value>) -> Option<String> {
    match v? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn app_from_details(requested: &str, details: Map<String, Value>) -> Result<AppRecord, String> {
    let text = |key: &str| as_string(details.get(key)).unwrap_or_default();
    let price = match details.get("price") {
        None | Some(Value::Null) => 0.0,
        Some(v) => v.as_f64().ok_or_else(|| format!("price {v} is not a number"))?,
    };
    let app = AppRecord {
        app_id: as_string(details.get("trackId")).unwrap_or_else(|| requested.to_string()),
        name: text("trackName"),
        primary_category: text("primaryGenreName"),
        price,
        is_free: price == 0.0,
        current_version: text("version"),
        raw_details: details,
    };
    app.validate()?;
    Ok(app)
}

fn review_from_wire(app_id: &str, raw: Map<String, Value>) -> Result<Review, String> {
    let text = |key: &str| as_string(raw.get(key)).unwrap_or_default();
    let review_id = as_string(raw.get("id")).ok_or("review without id")?;
    let rating = raw
        .get("rating")
        .and_then(|v| v.as_u64().or_else(|| v.as_str().and_then(|s| s.parse().ok())))
        .ok_or_else(|| format!("review {review_id}: missing rating"))?;
    let date_str = text("date");
    // accept full timestamps by keeping the date part
    let date = NaiveDate::parse_from_str(date_str.get(..10).unwrap_or(&date_str), "%Y-%m-%d")
        .map_err(|e| format!("review {review_id}: date {date_str:?}: {e}"))?;
    let review = Review {
        review_id,
        app_id: app_id.to_string(),
        author: text("author"),
        title: text("title"),
        body: text("body"),
        rating: u8::try_from(rating).unwrap_or(0),
        date,
        helpful_votes: raw
            .get("votes")
            .and_then(Value::as_u64)
            .map_or(0, |v| v.min(u32::MAX as u64) as u32),
        app_version: text("version"),
        raw,
    };
    review.validate()?;
    Ok(review)
}

impl StoreApi for HttpStoreClient {
    async fn lookup(&self, app_id: &str) -> Result<AppRecord, FetchError> {
        let resp: LookupResponse = self
            .get_json("lookup", &[("id", app_id.to_string()), ("country", "us".into())])
            .await?;
        if resp.result_count == 0 && resp.results.is_empty() {
            return Err(FetchError::NotFound(app_id.to_string()));
        }
        let details = resp
            .results
            .into_iter()
            .next()
            .ok_or_else(|| FetchError::NotFound(app_id.to_string()))?;
        app_from_details(app_id, details).map_err(|reason| FetchError::Parse {
            url: self.url("lookup"),
            reason,
        })
    }

    async fn review_page(&self, app_id: &str, page: u32) -> Result<Vec<Review>, FetchError> {
        let resp: ReviewPage = self
            .get_json("reviews", &[("id", app_id.to_string()), ("page", page.to_string())])
            .await?;
        resp.reviews
            .into_iter()
            .map(|raw| review_from_wire(app_id, raw))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|reason| FetchError::Parse {
                url: self.url("reviews"),
                reason,
            })
    }

    fn max_pages(&self) -> u32 {
        self.config.max_pages
    }
}
