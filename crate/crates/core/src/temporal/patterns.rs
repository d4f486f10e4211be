use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::analytics::stats;

use super::{TemporalError, WeeklySeries};

/// Fewest usable weeks a series needs before it is classified.
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternLabel {
    ConsistentEmotion,
    InconsistentEmotion,
    SentimentDrop,
    SentimentJump,
    SteadyDecrease,
    SteadyIncrease,
}

impl PatternLabel {
    pub const ALL: [PatternLabel; 6] = [
        PatternLabel::ConsistentEmotion,
        PatternLabel::InconsistentEmotion,
        PatternLabel::SentimentDrop,
        PatternLabel::SentimentJump,
        PatternLabel::SteadyDecrease,
        PatternLabel::SteadyIncrease,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PatternLabel::ConsistentEmotion => "ConsistentEmotion",
            PatternLabel::InconsistentEmotion => "InconsistentEmotion",
            PatternLabel::SentimentDrop => "SentimentDrop",
            PatternLabel::SentimentJump => "SentimentJump",
            PatternLabel::SteadyDecrease => "SteadyDecrease",
            PatternLabel::SteadyIncrease => "SteadyIncrease",
        }
    }
}

impl fmt::Display for PatternLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternLabel::ALL
            .into_iter()
            .find(|l| l.name() == s.trim())
            .ok_or_else(|| format!("unknown pattern label {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternConfig {
    /// Smallest difference between adjacent window means that counts as a
    /// jump or drop, in combined-sentiment units.
    pub jump_threshold: f64,
    /// Window length in weeks.
    pub window: usize,
    /// Smallest absolute OLS slope, per week, for a steady trend.
    pub slope_threshold: f64,
    /// Smallest R² for a steady trend.
    pub fit_threshold: f64,
    /// Largest SD of weekly means for consistent emotion.
    pub low_variance: f64,
    /// Weeks with fewer reviews are skipped.
    pub min_weekly_reviews: usize,
}

impl Default for PatternConfig {
    fn default() -> Self {
        PatternConfig {
            jump_threshold: 2.0,
            window: 3,
            slope_threshold: 0.03,
            // a 4-point step over 50 weeks already fits a line with R² = 0.75
            fit_threshold: 0.8,
            low_variance: 0.5,
            min_weekly_reviews: 1,
        }
    }
}

impl PatternConfig {
    pub fn validate(&self) -> Result<(), TemporalError> {
        let bad = |msg: String| Err(TemporalError::InvalidConfig(msg));
        if !(self.jump_threshold > 0.0 && self.jump_threshold.is_finite()) {
            return bad(format!("jump threshold must be positive, got {}", self.jump_threshold));
        }
        if self.window < 1 {
            return bad("window must be at least 1 week".into());
        }
        if !(self.slope_threshold > 0.0 && self.slope_threshold.is_finite()) {
            return bad(format!("slope threshold must be positive, got {}", self.slope_threshold));
        }
        if !(0.0..=1.0).contains(&self.fit_threshold) {
            return bad(format!("fit threshold must be in [0, 1], got {}", self.fit_threshold));
        }
        if !(self.low_variance >= 0.0 && self.low_variance.is_finite()) {
            return bad(format!("low variance must be non-negative, got {}", self.low_variance));
        }
        Ok(())
    }
}

/// Ordinary least squares line through `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// 0 when `y` is constant.
    pub r_squared: f64,
}

/// `None` when fewer than two points or all `x` coincide.
pub fn ols(points: &[(f64, f64)]) -> Option<Fit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(Fit {
        slope,
        intercept: my - slope * mx,
        r_squared: if syy == 0.0 { 0.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) },
    })
}

/// Labels a sequence of `(week_index, weekly mean)` points, skipped weeks
/// already removed.
pub fn classify_points(points: &[(f64, f64)], config: &PatternConfig) -> Result<BTreeSet<PatternLabel>, TemporalError> {
    config.validate()?;
    if points.len() < MIN_POINTS {
        return Err(TemporalError::InsufficientData { needed: MIN_POINTS, got: points.len() });
    }
    let means: Vec<f64> = points.iter().map(|p| p.1).collect();
    let w = config.window;
    let mut labels = BTreeSet::new();

    // adjacent windows m[t-w+1..=t] and m[t+1..=t+w]
    if means.len() >= 2 * w {
        for t in (w - 1)..(means.len() - w) {
            let before = stats::mean(&means[t + 1 - w..=t]).unwrap_or_default();
            let after = stats::mean(&means[t + 1..=t + w]).unwrap_or_default();
            let diff = after - before;
            if diff >= config.jump_threshold {
                labels.insert(PatternLabel::SentimentJump);
            }
            if diff <= -config.jump_threshold {
                labels.insert(PatternLabel::SentimentDrop);
            }
        }
    }

    if let Some(fit) = ols(points) {
        if fit.r_squared >= config.fit_threshold {
            if fit.slope >= config.slope_threshold {
                labels.insert(PatternLabel::SteadyIncrease);
            }
            if fit.slope <= -config.slope_threshold {
                labels.insert(PatternLabel::SteadyDecrease);
            }
        }
    }

    let abrupt = labels.contains(&PatternLabel::SentimentJump) || labels.contains(&PatternLabel::SentimentDrop);
    if !abrupt && stats::sample_sd(&means).is_some_and(|sd| sd <= config.low_variance) {
        labels.insert(PatternLabel::ConsistentEmotion);
    }
    if labels.is_empty() {
        labels.insert(PatternLabel::InconsistentEmotion);
    }
    Ok(labels)
}

/// Labels a weekly series. Weeks with fewer than `min_weekly_reviews`
/// reviews are skipped, never interpolated.
pub fn classify_patterns(series: &WeeklySeries, config: &PatternConfig) -> Result<BTreeSet<PatternLabel>, TemporalError> {
    let points: Vec<(f64, f64)> = series
        .points
        .iter()
        .filter(|p| p.n_reviews >= config.min_weekly_reviews.max(1))
        .filter_map(|p| p.mean.map(|m| (p.week_index as f64, m)))
        .collect();
    classify_points(&points, config)
}
