//! CSV renderings of the analytics results. Numbers carry six decimals;
//! absent statistics are empty fields.

use std::collections::BTreeMap;

use super::{CategorySummary, CorrelationReport, DispersionStats, RatingBucket, TopicLabel};

pub fn format_number(x: f64) -> String {
    let s = format!("{x:.6}");
    // avoid "-0.000000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn render(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

pub fn category_csv(rows: &[CategorySummary]) -> String {
    render(
        &[
            "category", "n_free", "n_paid", "n_scored", "n_undefined", "mean", "sd", "median",
            "share_positive", "share_neutral", "share_negative", "share_undefined",
        ],
        rows.iter().map(|r| {
            let share = |f: fn(&super::Shares) -> f64| opt(r.shares.as_ref().map(f));
            vec![
                r.category.clone(),
                r.n_free.to_string(),
                r.n_paid.to_string(),
                r.n_scored.to_string(),
                r.n_undefined.to_string(),
                opt(r.mean),
                opt(r.sd),
                opt(r.median),
                share(|s| s.positive),
                share(|s| s.neutral),
                share(|s| s.negative),
                share(|s| s.undefined),
            ]
        }),
    )
}

pub fn rating_csv(buckets: &[RatingBucket]) -> String {
    render(
        &[
            "stars", "n", "min", "lower_whisker", "q1", "median", "q3", "upper_whisker", "max",
            "outliers", "strongly_negative",
        ],
        buckets.iter().map(|b| {
            let s = b.summary.as_ref();
            let f = |g: fn(&super::BoxSummary) -> f64| opt(s.map(g));
            vec![
                b.stars.to_string(),
                s.map_or(0, |s| s.n).to_string(),
                f(|s| s.min),
                f(|s| s.lower_whisker),
                f(|s| s.q1),
                f(|s| s.median),
                f(|s| s.q3),
                f(|s| s.upper_whisker),
                f(|s| s.max),
                s.map_or(0, |s| s.outliers).to_string(),
                b.strongly_negative.to_string(),
            ]
        }),
    )
}

pub fn correlation_csv(reports: &[CorrelationReport]) -> String {
    render(
        &["target", "n", "pearson", "spearman"],
        reports.iter().map(|r| {
            vec![
                r.target.clone(),
                r.n.to_string(),
                format_number(r.pearson),
                format_number(r.spearman),
            ]
        }),
    )
}

/// One row per topic, in fixed order; topics without data get empty fields.
pub fn dispersion_csv(stats: &BTreeMap<TopicLabel, DispersionStats>) -> String {
    render(
        &["topic", "n", "range", "iqr", "sd"],
        TopicLabel::ALL.into_iter().map(|t| {
            let s = stats.get(&t);
            vec![
                t.to_string(),
                s.map_or(0, |s| s.n).to_string(),
                opt(s.map(|s| s.range)),
                opt(s.map(|s| s.iqr)),
                opt(s.map(|s| s.sd)),
            ]
        }),
    )
}
