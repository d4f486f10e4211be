use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use crate::combine::{combine, CombinedSentiment};
use crate::engine::SentimentEngine;
use crate::store::Rejection;

use super::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TopicLabel {
    BugReport,
    FeatureRequest,
    UserExperience,
    Rating,
}

impl TopicLabel {
    pub const ALL: [TopicLabel; 4] = [
        TopicLabel::BugReport,
        TopicLabel::FeatureRequest,
        TopicLabel::UserExperience,
        TopicLabel::Rating,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopicLabel::BugReport => "BugReport",
            TopicLabel::FeatureRequest => "FeatureRequest",
            TopicLabel::UserExperience => "UserExperience",
            TopicLabel::Rating => "Rating",
        }
    }
}

impl fmt::Display for TopicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Accepts the literal names as well as spaced or underscored spellings in
/// any case ("Bug Report", "bug_report").
impl FromStr for TopicLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
            .flat_map(char::to_lowercase)
            .collect();
        TopicLabel::ALL
            .into_iter()
            .find(|t| t.name().to_lowercase() == key)
            .ok_or_else(|| format!("unknown topic {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionStats {
    pub n: usize,
    pub range: f64,
    pub iqr: f64,
    pub sd: f64,
}

/// Range, IQR and sample SD of the defined sentiments of each topic. Topics
/// without a single defined value are absent.
pub fn dispersion_by_topic(
    labeled: &[(TopicLabel, CombinedSentiment)],
) -> BTreeMap<TopicLabel, DispersionStats> {
    let mut values: BTreeMap<TopicLabel, Vec<f64>> = BTreeMap::new();
    for (topic, c) in labeled {
        if let Some(v) = c.value() {
            values.entry(*topic).or_default().push(v as f64);
        }
    }
    values
        .into_iter()
        .filter_map(|(topic, vs)| {
            let b = stats::BoxSummary::new(&vs)?;
            Some((
                topic,
                DispersionStats {
                    n: b.n,
                    range: b.range(),
                    iqr: b.iqr(),
                    sd: stats::sample_sd(&vs)?,
                },
            ))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledReview {
    pub id: String,
    pub topic: TopicLabel,
    pub title: String,
    pub body: String,
    /// Supplied by the file; when absent the text is scored.
    pub combined: Option<CombinedSentiment>,
}

impl LabeledReview {
    pub fn resolve(&self, engine: &SentimentEngine) -> CombinedSentiment {
        self.combined
            .unwrap_or_else(|| combine(engine.score_parts(&self.title, &self.body)))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledImport {
    pub reviews: Vec<LabeledReview>,
    pub rejected: Vec<Rejection>,
}

impl LabeledImport {
    pub fn resolve(&self, engine: &SentimentEngine) -> Vec<(TopicLabel, CombinedSentiment)> {
        self.reviews.iter().map(|r| (r.topic, r.resolve(engine))).collect()
    }
}

/// Reads `id,topic,title,body` with an optional `combined` column. Rows with
/// an unknown topic, a bad combined value or a repeated id are rejected.
pub fn load_labeled<R: Read>(reader: R) -> Result<LabeledImport, csv::Error> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let mut out = LabeledImport::default();
    let (Some(c_id), Some(c_topic)) = (col("id"), col("topic")) else {
        out.rejected.push(Rejection {
            line: 1,
            reason: format!(
                "header must be id,topic,title,body; found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
        return Ok(out);
    };
    let (c_title, c_body, c_combined) = (col("title"), col("body"), col("combined"));
    if c_combined.is_none() && c_title.is_none() && c_body.is_none() {
        out.rejected.push(Rejection {
            line: 1,
            reason: "need title/body text or a combined column".into(),
        });
        return Ok(out);
    }

    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |c: Option<usize>| c.and_then(|c| record.get(c)).unwrap_or("");
        let mut reject = |reason: String| out.rejected.push(Rejection { line, reason });

        let id = field(Some(c_id)).trim();
        let topic = match field(Some(c_topic)).parse::<TopicLabel>() {
            Ok(t) => t,
            Err(e) => {
                reject(e);
                continue;
            }
        };
        let combined = match field(c_combined).trim() {
            "" => None,
            s => match s.parse::<CombinedSentiment>() {
                Ok(c) => Some(c),
                Err(e) => {
                    reject(e);
                    continue;
                }
            },
        };
        if !id.is_empty() && !seen.insert(id.to_string()) {
            reject(format!("duplicate id {id}"));
            continue;
        }
        out.reviews.push(LabeledReview {
            id: id.to_string(),
            topic,
            title: field(c_title).to_string(),
            body: field(c_body).to_string(),
            combined,
        });
    }
    Ok(out)
}
