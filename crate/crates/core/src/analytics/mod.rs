//! Corpus-level statistics over scored archives.
//!
//! Undefined combined sentiments count towards polarity shares but are left
//! out of every mean, median, dispersion and correlation.

mod correlation;
mod report;
pub mod stats;
mod topics;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::combine::{CombinedSentiment, PolarityClass};
use crate::store::{AppRecord, Archive, ScoredReview};

pub use correlation::{average_ranks, pearson, spearman, CorrelationError};
pub use report::{
    category_csv, correlation_csv, dispersion_csv, format_number, rating_csv,
};
pub use stats::BoxSummary;
pub use topics::{dispersion_by_topic, load_labeled, DispersionStats, LabeledImport, LabeledReview, TopicLabel};

/// Name of the pooled row emitted after the per-category rows.
pub const OVERALL_CATEGORY: &str = "ALL";

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("archive has {0} unscored reviews; run score first")]
    Unscored(usize),
    #[error("review {review_id} refers to app {app_id}, which is not in the archive")]
    UnknownApp { review_id: String, app_id: String },
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
}

/// Fractions of a category's reviews in each polarity class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shares {
    pub positive: f64,
    pub neutral: f64,
    pub negative: f64,
    pub undefined: f64,
}

impl Shares {
    pub fn sum(&self) -> f64 {
        self.positive + self.neutral + self.negative + self.undefined
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategorySummary {
    pub category: String,
    /// Reviews of free apps.
    pub n_free: usize,
    /// Reviews of paid apps.
    pub n_paid: usize,
    /// Reviews with a defined combined sentiment.
    pub n_scored: usize,
    pub n_undefined: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub median: Option<f64>,
    /// Absent when the category has no reviews at all.
    pub shares: Option<Shares>,
}

impl CategorySummary {
    pub fn total(&self) -> usize {
        self.n_free + self.n_paid
    }
}

fn require_scored(archive: &Archive) -> Result<(), AnalyticsError> {
    if archive.is_fully_scored() {
        Ok(())
    } else {
        Err(AnalyticsError::Unscored(archive.reviews.len()))
    }
}

/// Every scored review joined to its app.
fn joined(archive: &Archive) -> Result<Vec<(&AppRecord, &ScoredReview)>, AnalyticsError> {
    require_scored(archive)?;
    let apps: HashMap<&str, &AppRecord> = archive.apps.iter().map(|a| (a.app_id.as_str(), a)).collect();
    archive
        .scored
        .iter()
        .map(|s| {
            apps.get(s.review.app_id.as_str())
                .map(|a| (*a, s))
                .ok_or_else(|| AnalyticsError::UnknownApp {
                    review_id: s.review.review_id.clone(),
                    app_id: s.review.app_id.clone(),
                })
        })
        .collect()
}

fn summarize<'a>(
    category: &str,
    rows: impl IntoIterator<Item = (&'a AppRecord, &'a ScoredReview)>,
) -> CategorySummary {
    let (mut n_free, mut n_paid) = (0, 0);
    let mut counts: BTreeMap<PolarityClass, usize> = BTreeMap::new();
    let mut values = Vec::new();
    for (app, s) in rows {
        if app.is_free {
            n_free += 1;
        } else {
            n_paid += 1;
        }
        *counts.entry(s.combined.polarity_class()).or_default() += 1;
        if let Some(v) = s.combined.value() {
            values.push(v as f64);
        }
    }
    let total = n_free + n_paid;
    let share = |c: PolarityClass| counts.get(&c).copied().unwrap_or(0) as f64 / total as f64;
    CategorySummary {
        category: category.to_string(),
        n_free,
        n_paid,
        n_scored: values.len(),
        n_undefined: counts.get(&PolarityClass::Undefined).copied().unwrap_or(0),
        mean: stats::mean(&values),
        sd: stats::sample_sd(&values),
        median: stats::median(&values),
        shares: (total > 0).then(|| Shares {
            positive: share(PolarityClass::Positive),
            neutral: share(PolarityClass::Neutral),
            negative: share(PolarityClass::Negative),
            undefined: share(PolarityClass::Undefined),
        }),
    }
}

/// One summary per primary category (sorted by name), including categories
/// whose apps have no reviews.
pub fn summarize_by_category(archive: &Archive) -> Result<Vec<CategorySummary>, AnalyticsError> {
    let rows = joined(archive)?;
    let mut by_cat: BTreeMap<&str, Vec<(&AppRecord, &ScoredReview)>> = archive
        .apps
        .iter()
        .map(|a| (a.primary_category.as_str(), Vec::new()))
        .collect();
    for (app, s) in rows {
        by_cat.entry(app.primary_category.as_str()).or_default().push((app, s));
    }
    Ok(by_cat
        .into_iter()
        .map(|(cat, rows)| summarize(cat, rows))
        .collect())
}

/// The whole archive pooled into one summary.
pub fn summarize_overall(archive: &Archive) -> Result<CategorySummary, AnalyticsError> {
    Ok(summarize(OVERALL_CATEGORY, joined(archive)?))
}

/// Per-star distribution of combined sentiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingBucket {
    pub stars: u8,
    /// Absent when no review with these stars has a defined sentiment.
    pub summary: Option<BoxSummary>,
    /// Reviews whose combined sentiment is -4 or -5.
    pub strongly_negative: usize,
}

pub fn sentiment_by_rating(archive: &Archive) -> Result<Vec<RatingBucket>, AnalyticsError> {
    require_scored(archive)?;
    let mut values: BTreeMap<u8, Vec<f64>> = (1..=5).map(|s| (s, Vec::new())).collect();
    for s in &archive.scored {
        if let (Some(v), Some(bucket)) = (s.combined.value(), values.get_mut(&s.review.rating)) {
            bucket.push(v as f64);
        }
    }
    Ok(values
        .into_iter()
        .map(|(stars, vs)| RatingBucket {
            stars,
            strongly_negative: vs.iter().filter(|v| **v <= -4.0).count(),
            summary: BoxSummary::new(&vs),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub target: String,
    pub n: usize,
    pub pearson: f64,
    pub spearman: f64,
}

fn correlate(target: &str, pairs: Vec<(f64, f64)>) -> Result<CorrelationReport, AnalyticsError> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(CorrelationReport {
        target: target.to_string(),
        n: xs.len(),
        pearson: pearson(&xs, &ys)?,
        spearman: spearman(&xs, &ys)?,
    })
}

fn keep(c: CombinedSentiment, exclude_neutral: bool) -> Option<f64> {
    c.value()
        .filter(|v| !(exclude_neutral && *v == 0))
        .map(f64::from)
}

/// Star rating against combined sentiment, one observation per review.
pub fn sentiment_vs_rating(archive: &Archive, exclude_neutral: bool) -> Result<CorrelationReport, AnalyticsError> {
    require_scored(archive)?;
    let pairs = archive
        .scored
        .iter()
        .filter_map(|s| keep(s.combined, exclude_neutral).map(|v| (s.review.rating as f64, v)))
        .collect();
    correlate("rating", pairs)
}

/// App price against combined sentiment, one observation per review.
pub fn sentiment_vs_price(archive: &Archive, exclude_neutral: bool) -> Result<CorrelationReport, AnalyticsError> {
    let pairs = joined(archive)?
        .into_iter()
        .filter_map(|(app, s)| keep(s.combined, exclude_neutral).map(|v| (app.price, v)))
        .collect();
    correlate("price", pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SentimentScore;
    use crate::store::Review;
    use chrono::NaiveDate;

    fn app(id: &str, cat: &str, price: f64) -> AppRecord {
        AppRecord {
            app_id: id.into(),
            name: id.into(),
            primary_category: cat.into(),
            price,
            is_free: price == 0.0,
            current_version: "1".into(),
            raw_details: Default::default(),
        }
    }

    /// A scored review whose dual score combines to `combined` (never 1 or
    /// -1, which no dual score produces).
    fn scored(id: usize, app_id: &str, rating: u8, combined: Option<i8>) -> ScoredReview {
        let (p, n) = match combined {
            None => (4, -4),
            Some(0) => (1, -1),
            Some(v) if v > 0 => (v, -1),
            Some(v) => (1, v),
        };
        let s = ScoredReview::new(
            Review {
                review_id: format!("r{id}"),
                app_id: app_id.into(),
                rating,
                date: NaiveDate::from_ymd_opt(2016, 1, 4).unwrap(),
                ..Review::example()
            },
            SentimentScore::new(p, n).unwrap(),
        );
        assert_eq!(s.combined.value(), combined);
        s
    }

    fn archive(apps: Vec<AppRecord>, scored: Vec<ScoredReview>) -> Archive {
        Archive {
            apps,
            scored,
            ..Default::default()
        }
    }

    #[test]
    fn category_hand_example() {
        let a = archive(
            vec![app("f", "Games", 0.0), app("p", "Games", 2.99)],
            vec![
                scored(0, "f", 5, Some(3)),
                scored(1, "p", 5, Some(3)),
                scored(2, "f", 1, Some(-3)),
                scored(3, "f", 3, Some(0)),
            ],
        );
        let sums = summarize_by_category(&a).unwrap();
        assert_eq!(sums.len(), 1);
        let s = &sums[0];
        assert_eq!((s.n_free, s.n_paid, s.n_scored, s.n_undefined), (3, 1, 4, 0));
        assert_eq!(s.mean, Some(0.75));
        assert_eq!(s.median, Some(1.5));
        let sh = s.shares.unwrap();
        assert_eq!((sh.positive, sh.neutral, sh.negative, sh.undefined), (0.5, 0.25, 0.25, 0.0));
    }

    #[test]
    fn single_review_and_all_undefined() {
        let a = archive(
            vec![app("a", "Books", 0.0), app("b", "News", 0.0), app("c", "Travel", 0.0)],
            vec![scored(0, "a", 5, Some(5)), scored(1, "b", 1, None), scored(2, "b", 1, None)],
        );
        let sums = summarize_by_category(&a).unwrap();
        let books = &sums[0];
        assert_eq!((books.mean, books.median, books.sd), (Some(5.0), Some(5.0), Some(0.0)));
        let news = &sums[1];
        assert_eq!(news.mean, None);
        assert_eq!(news.n_scored, 0);
        assert_eq!(news.n_undefined, 2);
        let sh = news.shares.unwrap();
        assert_eq!((sh.positive, sh.neutral, sh.negative, sh.undefined), (0.0, 0.0, 0.0, 1.0));
        let travel = &sums[2];
        assert_eq!((travel.total(), travel.shares), (0, None));
    }

    #[test]
    fn unscored_and_unknown_app_rejected() {
        let mut a = archive(vec![], vec![scored(0, "ghost", 5, Some(2))]);
        assert!(matches!(summarize_by_category(&a), Err(AnalyticsError::UnknownApp { .. })));
        a.reviews.push(Review::example());
        assert!(matches!(summarize_by_category(&a), Err(AnalyticsError::Unscored(1))));
        assert!(matches!(sentiment_by_rating(&a), Err(AnalyticsError::Unscored(1))));
    }

    #[test]
    fn rating_buckets() {
        let a = archive(
            vec![app("a", "Games", 0.0)],
            vec![
                scored(0, "a", 5, Some(-4)),
                scored(1, "a", 5, Some(3)),
                scored(2, "a", 5, Some(5)),
                scored(3, "a", 5, Some(-5)),
                scored(4, "a", 1, Some(-2)),
                scored(5, "a", 1, None),
            ],
        );
        let buckets = sentiment_by_rating(&a).unwrap();
        assert_eq!(buckets.len(), 5);
        assert_eq!(buckets[4].strongly_negative, 2);
        let five = buckets[4].summary.as_ref().unwrap();
        // sorted -5 -4 3 5: q1 h=0.75 -> -4.25, median -0.5, q3 h=2.25 -> 3.5
        assert_eq!((five.min, five.q1, five.median, five.q3, five.max), (-5.0, -4.25, -0.5, 3.5, 5.0));
        let one = buckets[0].summary.as_ref().unwrap();
        assert_eq!((one.n, one.min, one.max), (1, -2.0, -2.0));
        assert!(buckets[1].summary.is_none());
        assert!(sentiment_by_rating(&Archive::new()).unwrap().iter().all(|b| b.summary.is_none()));
    }

    #[test]
    fn price_correlation_cases() {
        let free = archive(
            vec![app("a", "Games", 0.0)],
            vec![scored(0, "a", 5, Some(3)), scored(1, "a", 1, Some(-2))],
        );
        assert!(matches!(
            sentiment_vs_price(&free, false),
            Err(AnalyticsError::Correlation(CorrelationError::ZeroVariance("xs")))
        ));

        // symmetric: each price level carries the same sentiment multiset
        let sym = archive(
            vec![app("a", "Games", 0.0), app("b", "Games", 4.99)],
            vec![
                scored(0, "a", 5, Some(3)),
                scored(1, "a", 1, Some(-3)),
                scored(2, "b", 5, Some(3)),
                scored(3, "b", 1, Some(-3)),
            ],
        );
        let r = sentiment_vs_price(&sym, false).unwrap();
        assert!(r.pearson.abs() < 1e-12 && r.spearman.abs() < 1e-12);
        assert_eq!(r.n, 4);

        let mono = archive(
            vec![app("a", "Games", 0.0), app("b", "Games", 0.99), app("c", "Games", 9.99)],
            vec![scored(0, "a", 5, Some(-2)), scored(1, "b", 1, Some(2)), scored(2, "c", 3, Some(4))],
        );
        assert_eq!(sentiment_vs_price(&mono, false).unwrap().spearman, 1.0);
    }

    #[test]
    fn neutral_exclusion_flag() {
        let a = archive(
            vec![app("a", "Games", 0.0)],
            vec![
                scored(0, "a", 1, Some(-3)),
                scored(1, "a", 3, Some(0)),
                scored(2, "a", 5, Some(4)),
                scored(3, "a", 4, Some(0)),
            ],
        );
        assert_eq!(sentiment_vs_rating(&a, false).unwrap().n, 4);
        let r = sentiment_vs_rating(&a, true).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.pearson, 1.0);
    }

    fn combined_strategy() -> impl proptest::strategy::Strategy<Value = Option<i8>> {
        use proptest::prelude::*;
        prop_oneof![Just(None), prop::sample::select(vec![-5i8, -4, -3, -2, 0, 2, 3, 4, 5]).prop_map(Some)]
    }

    proptest::proptest! {
        #[test]
        fn shares_and_counts_reconcile(
            rows in proptest::collection::vec((0usize..3, combined_strategy()), 0..60),
        ) {
            let apps = vec![app("a", "Games", 0.0), app("b", "Games", 1.99), app("c", "News", 0.0)];
            let ids = ["a", "b", "c"];
            let scored: Vec<_> = rows.iter().enumerate().map(|(i, (a, c))| scored(i, ids[*a], 3, *c)).collect();
            let a = archive(apps, scored);
            for s in summarize_by_category(&a).unwrap() {
                proptest::prop_assert_eq!(s.n_scored + s.n_undefined, s.total());
                if let Some(sh) = s.shares {
                    proptest::prop_assert!((sh.sum() - 1.0).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn one_category_matches_direct_statistics(
            cs in proptest::collection::vec(combined_strategy(), 1..60),
        ) {
            let scored: Vec<_> = cs.iter().enumerate().map(|(i, c)| scored(i, "a", 3, *c)).collect();
            let a = archive(vec![app("a", "Games", 0.0)], scored);
            let only = summarize_by_category(&a).unwrap().remove(0);
            let mut overall = summarize_overall(&a).unwrap();
            overall.category = only.category.clone();
            proptest::prop_assert_eq!(&only, &overall);

            let mut direct: Vec<f64> = cs.iter().flatten().map(|v| *v as f64).collect();
            direct.sort_by(f64::total_cmp);
            proptest::prop_assert_eq!(only.n_scored, direct.len());
            if !direct.is_empty() {
                let n = direct.len();
                let median = if n % 2 == 1 { direct[n / 2] } else { (direct[n / 2 - 1] + direct[n / 2]) / 2.0 };
                proptest::prop_assert!((only.median.unwrap() - median).abs() < 1e-9);
            }
        }
    }
}
