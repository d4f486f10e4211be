//! Reduction of a dual score to one value on the -5..=5 scale.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{ScoreRangeError, SentimentScore};

/// Combined sentiment: an integer in -5..=5 (0 is neutral) or undefined when
/// strong positive and strong negative cancel out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "serde_json::Value", into = "serde_json::Value")]
pub enum CombinedSentiment {
    Value(i8),
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolarityClass {
    Positive,
    Neutral,
    Negative,
    Undefined,
}

impl PolarityClass {
    pub const ALL: [PolarityClass; 4] = [
        PolarityClass::Positive,
        PolarityClass::Neutral,
        PolarityClass::Negative,
        PolarityClass::Undefined,
    ];
}

/// Combines a dual score: `p` when `p + n > 0`, `n` when `p + n < 0`,
/// 0 on a tie below 4 and undefined on a tie at 4 or 5.
pub fn combine(score: SentimentScore) -> CombinedSentiment {
    let (p, n) = (score.positive(), score.negative());
    match (p + n).signum() {
        1 => CombinedSentiment::Value(p),
        -1 => CombinedSentiment::Value(n),
        _ if p < 4 => CombinedSentiment::Value(0),
        _ => CombinedSentiment::Undefined,
    }
}

/// [`combine`] on raw integers; out-of-range input is an error.
pub fn combine_raw(positive: i64, negative: i64) -> Result<CombinedSentiment, ScoreRangeError> {
    SentimentScore::new(positive, negative).map(combine)
}

impl CombinedSentiment {
    pub fn value(self) -> Option<i8> {
        match self {
            CombinedSentiment::Value(v) => Some(v),
            CombinedSentiment::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, CombinedSentiment::Value(_))
    }

    pub fn polarity_class(self) -> PolarityClass {
        match self {
            CombinedSentiment::Value(v) if v > 0 => PolarityClass::Positive,
            CombinedSentiment::Value(0) => PolarityClass::Neutral,
            CombinedSentiment::Value(_) => PolarityClass::Negative,
            CombinedSentiment::Undefined => PolarityClass::Undefined,
        }
    }
}

pub fn polarity_class(c: CombinedSentiment) -> PolarityClass {
    c.polarity_class()
}

impl fmt::Display for CombinedSentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombinedSentiment::Value(v) => write!(f, "{v}"),
            CombinedSentiment::Undefined => f.write_str("undefined"),
        }
    }
}

impl FromStr for CombinedSentiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("undefined") {
            return Ok(CombinedSentiment::Undefined);
        }
        match s.parse::<i8>() {
            Ok(v) if (-5..=5).contains(&v) => Ok(CombinedSentiment::Value(v)),
            _ => Err(format!("combined sentiment {s:?} is not -5..=5 or \"undefined\"")),
        }
    }
}

impl TryFrom<serde_json::Value> for CombinedSentiment {
    type Error = String;

    fn try_from(v: serde_json::Value) -> Result<Self, Self::Error> {
        match v {
            serde_json::Value::String(s) if s == "undefined" => Ok(CombinedSentiment::Undefined),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) if (-5..=5).contains(&i) => Ok(CombinedSentiment::Value(i as i8)),
                _ => Err(format!("combined sentiment {n} outside -5..=5")),
            },
            other => Err(format!("invalid combined sentiment {other}")),
        }
    }
}

impl From<CombinedSentiment> for serde_json::Value {
    fn from(c: CombinedSentiment) -> Self {
        match c {
            CombinedSentiment::Value(v) => serde_json::Value::from(v),
            CombinedSentiment::Undefined => serde_json::Value::from("undefined"),
        }
    }
}
