use std::collections::HashMap;
use std::ops::Range;

use super::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    Emoticon,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Lowercased, with letter runs longer than two collapsed. Emoticons and
    /// punctuation keep their surface form.
    pub normalized: String,
    pub kind: TokenKind,
    /// Byte range of `surface` in the input.
    pub span: Range<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.tokens.iter()
    }

    /// Rebuilds the input by interleaving surfaces with the separators taken
    /// from `original`.
    pub fn reassemble(&self, original: &str) -> String {
        let mut out = String::with_capacity(original.len());
        let mut pos = 0;
        for tok in &self.tokens {
            out.push_str(&original[pos..tok.span.start]);
            out.push_str(&tok.surface);
            pos = tok.span.end;
        }
        out.push_str(&original[pos..]);
        out
    }
}

/// Splits informal text into words, emoticons and punctuation.
///
/// Emoticons known to the lexicon are recognized greedily (longest first)
/// before word splitting, so `nice:)` yields `nice` and `:)`.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    // first char -> emoticons starting with it, longest first
    emoticons: HashMap<char, Vec<String>>,
}

impl Tokenizer {
    pub fn new(lexicon: &Lexicon) -> Self {
        Self::with_emoticons(lexicon.emoticons().map(|(e, _)| e))
    }

    pub fn with_emoticons<'a>(emoticons: impl IntoIterator<Item = &'a str>) -> Self {
        let mut map: HashMap<char, Vec<String>> = HashMap::new();
        for emo in emoticons {
            if let Some(first) = emo.chars().next() {
                map.entry(first).or_default().push(emo.to_string());
            }
        }
        for list in map.values_mut() {
            list.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        }
        Self { emoticons: map }
    }

    pub fn tokenize(&self, text: &str) -> TokenStream {
        let mut tokens = Vec::new();
        for (start, chunk) in whitespace_chunks(text) {
            self.tokenize_chunk(chunk, start, &mut tokens);
        }
        TokenStream { tokens }
    }

    fn tokenize_chunk(&self, chunk: &str, offset: usize, out: &mut Vec<Token>) {
        let mut pending: Option<usize> = None;
        let mut i = 0;
        while i < chunk.len() {
            if let Some(len) = self.match_emoticon(chunk, i) {
                if let Some(p) = pending.take() {
                    push_segment(&chunk[p..i], offset + p, out);
                }
                let surface = &chunk[i..i + len];
                out.push(Token {
                    surface: surface.to_string(),
                    normalized: surface.to_string(),
                    kind: TokenKind::Emoticon,
                    span: offset + i..offset + i + len,
                });
                i += len;
            } else {
                pending.get_or_insert(i);
                i += chunk[i..].chars().next().map_or(1, char::len_utf8);
            }
        }
        if let Some(p) = pending {
            push_segment(&chunk[p..], offset + p, out);
        }
    }

    fn match_emoticon(&self, chunk: &str, at: usize) -> Option<usize> {
        let rest = &chunk[at..];
        let first = rest.chars().next()?;
        let candidates = self.emoticons.get(&first)?;
        let prev = chunk[..at].chars().next_back();
        candidates.iter().find_map(|emo| {
            if !rest.starts_with(emo.as_str()) {
                return None;
            }
            // an emoticon may not cut through the middle of an alphanumeric run
            let next = rest[emo.len()..].chars().next();
            let starts_alnum = first.is_alphanumeric();
            let ends_alnum = emo.chars().next_back().is_some_and(char::is_alphanumeric);
            if starts_alnum && prev.is_some_and(char::is_alphanumeric) {
                return None;
            }
            if ends_alnum && next.is_some_and(char::is_alphanumeric) {
                return None;
            }
            Some(emo.len())
        })
    }
}

/// Tokenizes with the emoticons of `lexicon`.
pub fn tokenize(lexicon: &Lexicon, text: &str) -> TokenStream {
    Tokenizer::new(lexicon).tokenize(text)
}

fn whitespace_chunks(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest_start = 0;
    std::iter::from_fn(move || {
        let rest = &text[rest_start..];
        let skip = rest.find(|c: char| !c.is_whitespace())?;
        let start = rest_start + skip;
        let len = text[start..]
            .find(char::is_whitespace)
            .unwrap_or(text.len() - start);
        rest_start = start + len;
        Some((start, &text[start..start + len]))
    })
}

/// Emits a non-emoticon segment as leading punctuation, a word, and trailing
/// punctuation.
fn push_segment(seg: &str, offset: usize, out: &mut Vec<Token>) {
    let core_start = seg.find(char::is_alphanumeric);
    let Some(core_start) = core_start else {
        out.push(punct(seg, offset));
        return;
    };
    let last = seg
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_alphanumeric())
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(seg.len());
    if core_start > 0 {
        out.push(punct(&seg[..core_start], offset));
    }
    let word = &seg[core_start..last];
    out.push(Token {
        surface: word.to_string(),
        normalized: normalize_word(word),
        kind: TokenKind::Word,
        span: offset + core_start..offset + last,
    });
    if last < seg.len() {
        out.push(punct(&seg[last..], offset + last));
    }
}

fn punct(s: &str, offset: usize) -> Token {
    Token {
        surface: s.to_string(),
        normalized: s.to_string(),
        kind: TokenKind::Punctuation,
        span: offset..offset + s.len(),
    }
}

/// Lowercases and collapses runs of three or more identical letters to two.
pub fn normalize_word(word: &str) -> String {
    let mut out = String::with_capacity(word.len());
    let mut prev: Option<char> = None;
    let mut run = 0;
    for c in word.chars().flat_map(char::to_lowercase) {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= 2 || !c.is_alphabetic() {
            out.push(c);
        }
    }
    out
}
