use super::tokenize::{TokenKind, TokenStream, Tokenizer};
use super::{Lexicon, SentimentScore};

/// Tokens after a booster that may still receive its boost.
pub const BOOSTER_WINDOW: usize = 2;

/// A scored token together with the boost it received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub token_index: usize,
    pub base: i8,
    pub boost: i8,
    /// `base` after boosting, clamped into its sign's range.
    pub score: i8,
}

/// Applies a boost so that it deepens the term's polarity, then clamps the
/// result back into `1..=5` or `-5..=-1` without changing sign.
pub fn apply_boost(base: i8, boost: i8) -> i8 {
    if boost == 0 {
        return base;
    }
    let base = base as i32;
    let boost = boost as i32;
    if base > 0 {
        (base + boost).clamp(1, 5) as i8
    } else {
        (base - boost).clamp(-5, -1) as i8
    }
}

/// Dictionary annotations for every sentiment-bearing token.
pub fn annotate(lexicon: &Lexicon, tokens: &TokenStream) -> Vec<Annotation> {
    let mut out = Vec::new();
    // (position among word/emoticon tokens, boost)
    let mut pending: Vec<(usize, i8)> = Vec::new();
    let mut position = 0usize;

    for (index, token) in tokens.iter().enumerate() {
        let base = match token.kind {
            TokenKind::Punctuation => continue,
            TokenKind::Emoticon => lexicon.emoticon(&token.surface),
            TokenKind::Word => {
                let term = lexicon.resolve_slang(&token.normalized);
                if let Some(boost) = lexicon.booster(term) {
                    pending.push((position, boost));
                    position += 1;
                    continue;
                }
                lexicon.sentiment(term)
            }
        };
        if let Some(base) = base {
            let boost: i8 = pending
                .iter()
                .filter(|(at, _)| position - at <= BOOSTER_WINDOW)
                .map(|(_, b)| *b)
                .sum();
            pending.clear();
            out.push(Annotation {
                token_index: index,
                base,
                boost,
                score: apply_boost(base, boost),
            });
        }
        position += 1;
    }
    out
}

/// Reduces annotations to the dual score: strongest positive and strongest
/// negative token, floored at (1, -1).
pub fn reduce(annotations: &[Annotation]) -> SentimentScore {
    let positive = annotations
        .iter()
        .map(|a| a.score)
        .filter(|s| *s > 0)
        .max()
        .unwrap_or(1)
        .max(1);
    let negative = annotations
        .iter()
        .map(|a| a.score)
        .filter(|s| *s < 0)
        .min()
        .unwrap_or(-1)
        .min(-1);
    SentimentScore::new(positive, negative).expect("token scores are range-clamped")
}

pub fn score_tokens(lexicon: &Lexicon, tokens: &TokenStream) -> SentimentScore {
    reduce(&annotate(lexicon, tokens))
}

/// Scores `text` against `lexicon`. Text with no matched token scores (1, -1).
pub fn score_text(lexicon: &Lexicon, text: &str) -> SentimentScore {
    score_tokens(lexicon, &Tokenizer::new(lexicon).tokenize(text))
}
