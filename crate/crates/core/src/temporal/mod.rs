//! Weekly sentiment series per app, release annotation and pattern labels.

mod patterns;
mod render;

use chrono::NaiveDate;
use thiserror::Error;

use crate::store::Archive;

pub use patterns::{classify_patterns, classify_points, ols, Fit, PatternConfig, PatternLabel};
pub use render::{parse_labels, pattern_report, render_timeline};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TemporalError {
    #[error("app {0} is not in the archive")]
    UnknownApp(String),
    #[error("window start {start} is after end {end}")]
    InvalidWindow { start: NaiveDate, end: NaiveDate },
    #[error("archive has {0} unscored reviews; run score first")]
    Unscored(usize),
    #[error("insufficient data: {got} usable weeks, need at least {needed}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid pattern configuration: {0}")]
    InvalidConfig(String),
    #[error("week {week} is outside a series of {len} weeks")]
    WeekOutOfRange { week: u32, len: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeeklyPoint {
    pub week_index: u32,
    /// Mean combined sentiment; absent exactly when `n_reviews` is 0.
    pub mean: Option<f64>,
    /// Reviews with a defined combined sentiment.
    pub n_reviews: usize,
    /// Mean title plus body length of the same reviews, in characters.
    pub mean_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeeklySeries {
    pub app_id: String,
    pub start_date: NaiveDate,
    /// One point per week of the window, empty weeks included.
    pub points: Vec<WeeklyPoint>,
    /// `(week_index, version)` in date order.
    pub releases: Vec<(u32, String)>,
}

impl WeeklySeries {
    pub fn total_reviews(&self) -> usize {
        self.points.iter().map(|p| p.n_reviews).sum()
    }

    /// Builds a series from per-week `(sentiment sum, count, length sum)`
    /// accumulators.
    pub fn from_sums(
        app_id: impl Into<String>,
        start_date: NaiveDate,
        sums: &[(f64, usize, f64)],
        releases: Vec<(u32, String)>,
    ) -> Self {
        let points = sums
            .iter()
            .enumerate()
            .map(|(i, &(s, n, len))| WeeklyPoint {
                week_index: i as u32,
                mean: (n > 0).then(|| s / n as f64),
                n_reviews: n,
                mean_length: (n > 0).then(|| len / n as f64),
            })
            .collect();
        WeeklySeries {
            app_id: app_id.into(),
            start_date,
            points,
            releases,
        }
    }
}

/// Number of 7-day bins needed to cover `start..=end`.
pub fn week_count(start: NaiveDate, end: NaiveDate) -> usize {
    ((end - start).num_days() / 7 + 1) as usize
}

/// Week of `date` counted from `start`, if it falls inside `start..=end`.
pub fn week_of(start: NaiveDate, end: NaiveDate, date: NaiveDate) -> Option<u32> {
    (date >= start && date <= end).then(|| ((date - start).num_days() / 7) as u32)
}

/// Bins an app's scored reviews into consecutive weeks from `start`.
/// Reviews and releases outside `start..=end` are ignored; reviews with an
/// undefined sentiment are not counted.
pub fn weekly_aggregate(
    archive: &Archive,
    app_id: &str,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<WeeklySeries, TemporalError> {
    if start > end {
        return Err(TemporalError::InvalidWindow { start, end });
    }
    if archive.app(app_id).is_none() {
        return Err(TemporalError::UnknownApp(app_id.to_string()));
    }
    let unscored = archive.reviews.iter().filter(|r| r.app_id == app_id).count();
    if unscored > 0 {
        return Err(TemporalError::Unscored(unscored));
    }

    // integer sums keep the result independent of review order
    let mut sums = vec![(0i64, 0usize, 0u64); week_count(start, end)];
    for s in archive.scored.iter().filter(|s| s.review.app_id == app_id) {
        let (Some(week), Some(v)) = (week_of(start, end, s.review.date), s.combined.value()) else {
            continue;
        };
        let bin = &mut sums[week as usize];
        bin.0 += v as i64;
        bin.1 += 1;
        bin.2 += s.review.text_length() as u64;
    }
    let mut releases: Vec<_> = archive
        .releases
        .iter()
        .filter(|r| r.app_id == app_id)
        .filter_map(|r| week_of(start, end, r.date).map(|w| (r.date, w, r.version.clone())))
        .collect();
    releases.sort();
    let sums: Vec<_> = sums.into_iter().map(|(s, n, l)| (s as f64, n, l as f64)).collect();
    Ok(WeeklySeries::from_sums(
        app_id,
        start,
        &sums,
        releases.into_iter().map(|(_, w, v)| (w, v)).collect(),
    ))
}

/// Apps with more than `min_reviews` scored reviews dated inside the window,
/// sorted by id.
pub fn qualifying_apps(archive: &Archive, start: NaiveDate, end: NaiveDate, min_reviews: usize) -> Vec<String> {
    let mut counts = std::collections::BTreeMap::<&str, usize>::new();
    for s in &archive.scored {
        if week_of(start, end, s.review.date).is_some() {
            *counts.entry(s.review.app_id.as_str()).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|(id, n)| *n > min_reviews && archive.app(id).is_some())
        .map(|(id, _)| id.to_string())
        .collect()
}

/// Before/after comparison around a release week.
#[derive(Debug, Clone, PartialEq)]
pub struct ReleaseImpact {
    /// Review-weighted mean sentiment over the weeks before the release.
    pub pre_mean: Option<f64>,
    /// Same, from the release week on.
    pub post_mean: Option<f64>,
    pub delta: Option<f64>,
    /// Reviews per week.
    pub pre_volume: f64,
    pub post_volume: f64,
    pub pre_length: Option<f64>,
    pub post_length: Option<f64>,
    pub pre_weeks: usize,
    pub post_weeks: usize,
    /// A window was cut short by the series boundary.
    pub truncated: bool,
}

/// Compares weeks `t-w..t` with `t..t+w` (the release week belongs to the
/// post window). Windows cut by the series boundary use the weeks available
/// and set `truncated`.
pub fn release_impact(series: &WeeklySeries, release_week: u32, w: usize) -> Result<ReleaseImpact, TemporalError> {
    let len = series.points.len();
    let t = release_week as usize;
    if w == 0 {
        return Err(TemporalError::InvalidConfig("window must be at least 1 week".into()));
    }
    if t >= len {
        return Err(TemporalError::WeekOutOfRange { week: release_week, len });
    }
    let pre = &series.points[t.saturating_sub(w)..t];
    let post = &series.points[t..(t + w).min(len)];

    fn window(points: &[WeeklyPoint]) -> (Option<f64>, f64, Option<f64>) {
        let n: usize = points.iter().map(|p| p.n_reviews).sum();
        let weighted = |f: fn(&WeeklyPoint) -> Option<f64>| {
            let total: f64 = points.iter().filter_map(|p| f(p).map(|v| v * p.n_reviews as f64)).sum();
            (n > 0).then(|| total / n as f64)
        };
        let volume = if points.is_empty() { 0.0 } else { n as f64 / points.len() as f64 };
        (weighted(|p| p.mean), volume, weighted(|p| p.mean_length))
    }
    let (pre_mean, pre_volume, pre_length) = window(pre);
    let (post_mean, post_volume, post_length) = window(post);
    Ok(ReleaseImpact {
        pre_mean,
        post_mean,
        delta: pre_mean.zip(post_mean).map(|(a, b)| b - a),
        pre_volume,
        post_volume,
        pre_length,
        post_length,
        pre_weeks: pre.len(),
        post_weeks: post.len(),
        truncated: pre.len() < w || post.len() < w,
    })
}
