//! Dual-polarity lexicon scoring.
//!
//! Each text gets a positive strength in `1..=5` and a negative strength in
//! `-5..=-1`: the strongest positive and strongest negative dictionary hit,
//! after slang resolution and booster adjustment. `(1, -1)` means no
//! sentiment was found.

mod lexicon;
mod score;
mod tokenize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emoji::EmojiLexicon;
use crate::store::Review;

pub use lexicon::{
    load_lexicon, DictionaryRole, Lexicon, LexiconError, LexiconSources, LexiconWarning,
};
pub use score::{annotate, apply_boost, reduce, score_text, score_tokens, Annotation, BOOSTER_WINDOW};
pub use tokenize::{normalize_word, tokenize, Token, TokenKind, TokenStream, Tokenizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("sentiment score ({positive}, {negative}) outside 1..=5 / -5..=-1")]
pub struct ScoreRangeError {
    pub positive: i64,
    pub negative: i64,
}

/// Positive and negative strength of one text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawScore", into = "RawScore")]
pub struct SentimentScore {
    positive: i8,
    negative: i8,
}

#[derive(Serialize, Deserialize)]
struct RawScore {
    positive: i64,
    negative: i64,
}

impl TryFrom<RawScore> for SentimentScore {
    type Error = ScoreRangeError;

    fn try_from(raw: RawScore) -> Result<Self, Self::Error> {
        Self::new(raw.positive, raw.negative)
    }
}

impl From<SentimentScore> for RawScore {
    fn from(s: SentimentScore) -> Self {
        RawScore {
            positive: s.positive as i64,
            negative: s.negative as i64,
        }
    }
}

impl SentimentScore {
    pub const NEUTRAL: SentimentScore = SentimentScore {
        positive: 1,
        negative: -1,
    };

    pub fn new(positive: impl Into<i64>, negative: impl Into<i64>) -> Result<Self, ScoreRangeError> {
        let (p, n) = (positive.into(), negative.into());
        if (1..=5).contains(&p) && (-5..=-1).contains(&n) {
            Ok(SentimentScore {
                positive: p as i8,
                negative: n as i8,
            })
        } else {
            Err(ScoreRangeError {
                positive: p,
                negative: n,
            })
        }
    }

    pub fn positive(self) -> i8 {
        self.positive
    }

    pub fn negative(self) -> i8 {
        self.negative
    }
}

/// Lexicon plus optional emoji lexicon, with the tokenizer built once.
#[derive(Debug, Clone)]
pub struct SentimentEngine {
    lexicon: Lexicon,
    emoji: Option<EmojiLexicon>,
    tokenizer: Tokenizer,
}

impl SentimentEngine {
    pub fn new(lexicon: Lexicon, emoji: Option<EmojiLexicon>) -> Self {
        let tokenizer = Tokenizer::new(&lexicon);
        Self {
            lexicon,
            emoji,
            tokenizer,
        }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn emoji(&self) -> Option<&EmojiLexicon> {
        self.emoji.as_ref()
    }

    /// Scores text as-is, without emoji substitution.
    pub fn score_text(&self, text: &str) -> SentimentScore {
        score_tokens(&self.lexicon, &self.tokenizer.tokenize(text))
    }

    /// Title and body joined by a space, emoji-substituted, then scored.
    pub fn score_review(&self, review: &Review) -> SentimentScore {
        self.score_parts(&review.title, &review.body)
    }

    pub fn score_parts(&self, title: &str, body: &str) -> SentimentScore {
        let text = format!("{title} {body}");
        match &self.emoji {
            Some(emoji) => self.score_text(&emoji.substitute(&text)),
            None => self.score_text(&text),
        }
    }
}

/// [`SentimentEngine::score_review`] without emoji support.
pub fn score_review(lexicon: &Lexicon, review: &Review) -> SentimentScore {
    score_text(lexicon, &format!("{} {}", review.title, review.body))
}
