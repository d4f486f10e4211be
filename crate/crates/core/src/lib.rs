//! Emotion analysis for app store reviews.
//!
//! The pipeline: emojis in a review are rewritten to emoticons
//! ([`emoji`]), the text is scored with a dual-polarity lexicon
//! ([`engine`]), the dual score is reduced to one value on the -5..=5 scale
//! ([`combine`]), and scored archives ([`store`]) are summarized per
//! category, correlated with rating and price, dispersed per topic
//! ([`analytics`]) and followed week by week around releases
//! ([`temporal`]).

pub mod analytics;
pub mod combine;
pub mod emoji;
pub mod engine;
pub mod store;
pub mod temporal;

pub use combine::{combine, CombinedSentiment, PolarityClass};
pub use emoji::EmojiLexicon;
pub use engine::{score_text, Lexicon, SentimentEngine, SentimentScore};
pub use store::{AppRecord, Archive, Release, Review, ScoredReview};
