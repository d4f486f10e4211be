//! Emoji sentiment lexicon and emoji-to-emoticon rewriting.
//!
//! The scorer only understands emoticons, so emojis are rewritten into the
//! emoticon for their polarity before scoring. The lexicon CSV has a header
//! row `emoji,occurrences,polarity` where polarity is -1, 0 or 1.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The lexicon shipped with the crate: the 751 emojis of the Emoji
/// Sentiment Ranking v1.0 (occurrences >= 5), polarity by majority label.
pub const PUBLISHED_LEXICON_CSV: &str = include_str!("../data/emoji_sentiment_lexicon.csv");

/// Default frequency cut for [`EmojiLexicon::select_frequent`].
pub const DEFAULT_MIN_OCCURRENCES: u64 = 100;

const VARIATION_SELECTOR: char = '\u{FE0F}';
const ZWJ: char = '\u{200D}';

fn is_modifier(c: char) -> bool {
    c == VARIATION_SELECTOR || ('\u{1F3FB}'..='\u{1F3FF}').contains(&c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum EmojiPolarity {
    Negative,
    Neutral,
    Positive,
}

impl TryFrom<i8> for EmojiPolarity {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            -1 => Ok(EmojiPolarity::Negative),
            0 => Ok(EmojiPolarity::Neutral),
            1 => Ok(EmojiPolarity::Positive),
            other => Err(format!("polarity {other} not in {{-1, 0, 1}}")),
        }
    }
}

impl From<EmojiPolarity> for i8 {
    fn from(p: EmojiPolarity) -> i8 {
        match p {
            EmojiPolarity::Negative => -1,
            EmojiPolarity::Neutral => 0,
            EmojiPolarity::Positive => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiEntry {
    pub sequence: String,
    pub occurrences: u64,
    pub polarity: EmojiPolarity,
}

/// Emoticon emitted for each polarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitutions {
    pub positive: String,
    pub neutral: String,
    pub negative: String,
}

impl Default for Substitutions {
    fn default() -> Self {
        // ":|" is not in the emoticon dictionary, so neutral emojis score (1, -1)
        Self {
            positive: ":)".into(),
            neutral: ":|".into(),
            negative: ":(".into(),
        }
    }
}

impl Substitutions {
    pub fn for_polarity(&self, polarity: EmojiPolarity) -> &str {
        match polarity {
            EmojiPolarity::Positive => &self.positive,
            EmojiPolarity::Neutral => &self.neutral,
            EmojiPolarity::Negative => &self.negative,
        }
    }
}

#[derive(Debug, Error)]
pub enum EmojiError {
    #[error("line {line}: duplicate emoji {emoji:?}")]
    Duplicate { line: u64, emoji: String },
    #[error("line {line}: {reason}")]
    Invalid { line: u64, reason: String },
    #[error("expected header {expected:?}, found {found:?}")]
    Header { expected: String, found: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmojiLexicon {
    entries: Vec<EmojiEntry>,
    substitutions: Substitutions,
    index: HashMap<String, EmojiPolarity>,
    max_chars: usize,
}

impl EmojiLexicon {
    pub fn new(entries: Vec<EmojiEntry>, substitutions: Substitutions) -> Result<Self, EmojiError> {
        let mut index = HashMap::with_capacity(entries.len());
        let mut max_chars = 0;
        for (i, e) in entries.iter().enumerate() {
            if e.sequence.is_empty() {
                return Err(EmojiError::Invalid {
                    line: i as u64 + 1,
                    reason: "empty emoji".into(),
                });
            }
            if index.insert(e.sequence.clone(), e.polarity).is_some() {
                return Err(EmojiError::Duplicate {
                    line: i as u64 + 1,
                    emoji: e.sequence.clone(),
                });
            }
            max_chars = max_chars.max(e.sequence.chars().count());
        }
        Ok(Self {
            entries,
            substitutions,
            index,
            max_chars,
        })
    }

    /// Reads the `emoji,occurrences,polarity` CSV. Line numbers in errors
    /// count the header as line 1.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, EmojiError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let found: Vec<&str> = headers.iter().map(str::trim).collect();
        if found != ["emoji", "occurrences", "polarity"] {
            return Err(EmojiError::Header {
                expected: "emoji,occurrences,polarity".into(),
                found: found.join(","),
            });
        }
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let invalid = |reason: String| EmojiError::Invalid { line, reason };
            let sequence = record[0].trim().to_string();
            if sequence.is_empty() {
                return Err(invalid("empty emoji".into()));
            }
            let occurrences: u64 = record[1]
                .trim()
                .parse()
                .map_err(|_| invalid(format!("occurrences {:?} is not a count", &record[1])))?;
            let polarity: i8 = record[2]
                .trim()
                .parse()
                .map_err(|_| invalid(format!("polarity {:?} is not an integer", &record[2])))?;
            let polarity = EmojiPolarity::try_from(polarity).map_err(invalid)?;
            if !seen.insert(sequence.clone()) {
                return Err(EmojiError::Duplicate {
                    line,
                    emoji: sequence,
                });
            }
            entries.push(EmojiEntry {
                sequence,
                occurrences,
                polarity,
            });
        }
        Self::new(entries, Substitutions::default())
    }

    /// The lexicon bundled with the crate.
    pub fn published() -> Self {
        Self::from_csv(PUBLISHED_LEXICON_CSV.as_bytes()).expect("bundled emoji lexicon is valid")
    }

    /// Converts the Emoji Sentiment Ranking CSV (`Emoji,Unicode codepoint,
    /// Occurrences,Position,Negative,Neutral,Positive,...`), keeping rows with
    /// at least `min_occurrences`. Polarity is the label with the most
    /// tweets; ties go to neutral.
    pub fn from_ranking_csv<R: Read>(reader: R, min_occurrences: u64) -> Result<Self, EmojiError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim().eq_ignore_ascii_case(name))
                .ok_or_else(|| EmojiError::Header {
                    expected: format!("column {name}"),
                    found: headers.iter().collect::<Vec<_>>().join(","),
                })
        };
        let (c_emoji, c_occ, c_neg, c_neu, c_pos) = (
            col("Emoji")?,
            col("Occurrences")?,
            col("Negative")?,
            col("Neutral")?,
            col("Positive")?,
        );
        let mut entries = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let count = |c: usize| -> Result<u64, EmojiError> {
                record[c].trim().parse().map_err(|_| EmojiError::Invalid {
                    line,
                    reason: format!("{:?} is not a count", &record[c]),
                })
            };
            let occurrences = count(c_occ)?;
            if occurrences < min_occurrences {
                continue;
            }
            let (neg, neu, pos) = (count(c_neg)?, count(c_neu)?, count(c_pos)?);
            let polarity = if pos > neg && pos > neu {
                EmojiPolarity::Positive
            } else if neg > pos && neg > neu {
                EmojiPolarity::Negative
            } else {
                EmojiPolarity::Neutral
            };
            entries.push(EmojiEntry {
                sequence: record[c_emoji].trim().to_string(),
                occurrences,
                polarity,
            });
        }
        Self::new(entries, Substitutions::default())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), EmojiError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["emoji", "occurrences", "polarity"])?;
        for e in &self.entries {
            w.write_record([
                e.sequence.clone(),
                e.occurrences.to_string(),
                i8::from(e.polarity).to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn entries(&self) -> &[EmojiEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn substitutions(&self) -> &Substitutions {
        &self.substitutions
    }

    pub fn with_substitutions(mut self, substitutions: Substitutions) -> Self {
        self.substitutions = substitutions;
        self
    }

    pub fn polarity(&self, emoji: &str) -> Option<EmojiPolarity> {
        self.index.get(emoji).copied()
    }

    /// Entries seen strictly more than `min_occurrences` times.
    pub fn select_frequent(&self, min_occurrences: u64) -> EmojiLexicon {
        let entries = self
            .entries
            .iter()
            .filter(|e| e.occurrences > min_occurrences)
            .cloned()
            .collect();
        Self::new(entries, self.substitutions.clone()).expect("subset of a valid lexicon")
    }

    /// Replaces each lexicon emoji with its polarity's emoticon, separated
    /// from neighbouring text by single spaces. Everything else is copied
    /// unchanged. Longer sequences win over their prefixes; a trailing
    /// variation selector or skin-tone modifier is absorbed into the match,
    /// and an emoji that is part of an unknown ZWJ sequence is left alone.
    pub fn substitute(&self, text: &str) -> String {
        if self.index.is_empty() {
            return text.to_string();
        }
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let byte_at = |i: usize| chars.get(i).map_or(text.len(), |(b, _)| *b);
        let mut out = String::with_capacity(text.len());
        let mut i = 0;
        while i < chars.len() {
            let after_zwj = i > 0 && chars[i - 1].1 == ZWJ;
            let found = if after_zwj { None } else { self.longest_match(text, &chars, i) };
            let Some((len, polarity)) = found else {
                out.push(chars[i].1);
                i += 1;
                continue;
            };
            let mut j = i + len;
            while j < chars.len() && is_modifier(chars[j].1) {
                j += 1;
            }
            if j < chars.len() && chars[j].1 == ZWJ {
                let end = zwj_sequence_end(&chars, j);
                out.push_str(&text[byte_at(i)..byte_at(end)]);
                i = end;
                continue;
            }
            if out.chars().next_back().is_some_and(|c| !c.is_whitespace()) {
                out.push(' ');
            }
            out.push_str(self.substitutions.for_polarity(polarity));
            if j < chars.len() && !chars[j].1.is_whitespace() {
                out.push(' ');
            }
            i = j;
        }
        out
    }

    fn longest_match(
        &self,
        text: &str,
        chars: &[(usize, char)],
        at: usize,
    ) -> Option<(usize, EmojiPolarity)> {
        let start = chars[at].0;
        let longest = self.max_chars.min(chars.len() - at);
        (1..=longest).rev().find_map(|k| {
            let end = chars.get(at + k).map_or(text.len(), |(b, _)| *b);
            self.index.get(&text[start..end]).map(|p| (k, *p))
        })
    }
}

fn zwj_sequence_end(chars: &[(usize, char)], mut j: usize) -> usize {
    while j < chars.len() && chars[j].1 == ZWJ {
        j += 1;
        if j < chars.len() {
            j += 1;
        }
        while j < chars.len() && is_modifier(chars[j].1) {
            j += 1;
        }
    }
    j
}
