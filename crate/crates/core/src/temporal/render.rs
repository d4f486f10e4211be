use std::collections::BTreeSet;

use crate::analytics::format_number;

use super::{PatternLabel, WeeklySeries};

fn writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

/// Plot data, one row per week: `week,mean,n,mean_length,releases`. Weeks
/// are numbered from 1; releases in a week are joined with `;`.
pub fn render_timeline(series: &WeeklySeries) -> String {
    let mut w = writer();
    w.write_record(["week", "mean", "n", "mean_length", "releases"]).expect("writing to memory");
    for p in &series.points {
        let releases: Vec<&str> = series
            .releases
            .iter()
            .filter(|(week, _)| *week == p.week_index)
            .map(|(_, v)| v.as_str())
            .collect();
        w.write_record([
            (p.week_index + 1).to_string(),
            p.mean.map(format_number).unwrap_or_default(),
            p.n_reviews.to_string(),
            p.mean_length.map(format_number).unwrap_or_default(),
            releases.join(";"),
        ])
        .expect("writing to memory");
    }
    finish(w)
}

/// `app_id,labels` with labels joined by `;` in a fixed order.
pub fn pattern_report(rows: &[(String, BTreeSet<PatternLabel>)]) -> String {
    let mut w = writer();
    w.write_record(["app_id", "labels"]).expect("writing to memory");
    for (app, labels) in rows {
        let joined: Vec<&str> = labels.iter().map(|l| l.name()).collect();
        w.write_record([app.as_str(), &joined.join(";")]).expect("writing to memory");
    }
    finish(w)
}

pub fn parse_labels(field: &str) -> Result<BTreeSet<PatternLabel>, String> {
    field.split(';').filter(|s| !s.is_empty()).map(str::parse).collect()
}
