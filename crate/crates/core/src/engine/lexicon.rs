//! Sentiment dictionaries and their plain-text file format.
//!
//! Every dictionary is UTF-8, one entry per line, `term<TAB>value`. Blank
//! lines and lines starting with `#` are skipped. A manifest file names the
//! four dictionaries by role, paths relative to the manifest (tab-separated):
//!
//! ```text
//! sentiment sentiment.txt
//! boosters  boosters.txt
//! emoticons emoticons.txt
//! slang     slang.txt
//! ```

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Cursor};
use std::path::{Path, PathBuf};

use thiserror::Error;

/// The four dictionary roles a lexicon is assembled from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DictionaryRole {
    Sentiment,
    Boosters,
    Emoticons,
    Slang,
}

impl DictionaryRole {
    pub const ALL: [DictionaryRole; 4] = [
        DictionaryRole::Sentiment,
        DictionaryRole::Boosters,
        DictionaryRole::Emoticons,
        DictionaryRole::Slang,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DictionaryRole::Sentiment => "sentiment",
            DictionaryRole::Boosters => "boosters",
            DictionaryRole::Emoticons => "emoticons",
            DictionaryRole::Slang => "slang",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for DictionaryRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{role} dictionary, line {line}: {reason}")]
    Malformed {
        role: DictionaryRole,
        line: usize,
        reason: String,
    },
    #[error("term {term:?} is both a sentiment term and a booster")]
    Conflict { term: String },
    #[error("manifest {path}, line {line}: {reason}")]
    Manifest {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A duplicate entry that was overridden by a later line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconWarning {
    pub role: DictionaryRole,
    pub line: usize,
    pub term: String,
}

impl fmt::Display for LexiconWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} dictionary, line {}: duplicate term {:?}, later entry wins",
            self.role, self.line, self.term
        )
    }
}

/// Sentiment terms, boosters, emoticons and slang used by the scorer.
///
/// Immutable once built; share it freely across threads.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    sentiment_terms: HashMap<String, i8>,
    boosters: HashMap<String, i8>,
    emoticons: HashMap<String, i8>,
    slang: HashMap<String, String>,
}

/// Readable sources for each dictionary. Absent sources load as empty.
pub struct LexiconSources<R> {
    pub sentiment: Option<R>,
    pub boosters: Option<R>,
    pub emoticons: Option<R>,
    pub slang: Option<R>,
}

impl<R> Default for LexiconSources<R> {
    fn default() -> Self {
        Self {
            sentiment: None,
            boosters: None,
            emoticons: None,
            slang: None,
        }
    }
}

const SEED_SENTIMENT: &str = include_str!("../../data/lexicon/sentiment.txt");
const SEED_BOOSTERS: &str = include_str!("../../data/lexicon/boosters.txt");
const SEED_EMOTICONS: &str = include_str!("../../data/lexicon/emoticons.txt");
const SEED_SLANG: &str = include_str!("../../data/lexicon/slang.txt");

impl Lexicon {
    /// The small lexicon shipped with the crate.
    pub fn seed() -> Self {
        let sources = LexiconSources {
            sentiment: Some(Cursor::new(SEED_SENTIMENT)),
            boosters: Some(Cursor::new(SEED_BOOSTERS)),
            emoticons: Some(Cursor::new(SEED_EMOTICONS)),
            slang: Some(Cursor::new(SEED_SLANG)),
        };
        let (lexicon, warnings) = load_lexicon(sources).expect("seed lexicon is valid");
        debug_assert!(warnings.is_empty());
        lexicon
    }

    /// Loads the dictionaries named by a manifest file.
    pub fn from_manifest(path: &Path) -> Result<(Self, Vec<LexiconWarning>), LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut sources: LexiconSources<BufReader<File>> = LexiconSources::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let manifest_err = |reason: String| LexiconError::Manifest {
                path: path.to_path_buf(),
                line: idx + 1,
                reason,
            };
            let (role, file) = line
                .split_once('\t')
                .ok_or_else(|| manifest_err("expected role<TAB>path".into()))?;
            let role = DictionaryRole::parse(role.trim())
                .ok_or_else(|| manifest_err(format!("unknown role {role:?}")))?;
            let file_path = base.join(file.trim());
            let reader = File::open(&file_path).map_err(|source| LexiconError::Io {
                path: file_path.clone(),
                source,
            })?;
            let slot = match role {
                DictionaryRole::Sentiment => &mut sources.sentiment,
                DictionaryRole::Boosters => &mut sources.boosters,
                DictionaryRole::Emoticons => &mut sources.emoticons,
                DictionaryRole::Slang => &mut sources.slang,
            };
            if slot.is_some() {
                return Err(manifest_err(format!("role {role} listed twice")));
            }
            *slot = Some(BufReader::new(reader));
        }
        load_lexicon(sources)
    }

    pub fn sentiment(&self, term: &str) -> Option<i8> {
        self.sentiment_terms.get(term).copied()
    }

    pub fn booster(&self, term: &str) -> Option<i8> {
        self.boosters.get(term).copied()
    }

    pub fn emoticon(&self, emoticon: &str) -> Option<i8> {
        self.emoticons.get(emoticon).copied()
    }

    /// Canonical form of a slang term, or the term itself.
    pub fn resolve_slang<'a>(&'a self, term: &'a str) -> &'a str {
        self.slang.get(term).map(String::as_str).unwrap_or(term)
    }

    pub fn emoticons(&self) -> impl Iterator<Item = (&str, i8)> {
        self.emoticons.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn sentiment_terms(&self) -> impl Iterator<Item = (&str, i8)> {
        self.sentiment_terms.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.sentiment_terms.is_empty()
            && self.boosters.is_empty()
            && self.emoticons.is_empty()
            && self.slang.is_empty()
    }

    /// Builds a lexicon from in-memory entries, checking the same
    /// invariants as the file loader.
    pub fn from_entries<'a>(
        sentiment: impl IntoIterator<Item = (&'a str, i8)>,
        boosters: impl IntoIterator<Item = (&'a str, i8)>,
        emoticons: impl IntoIterator<Item = (&'a str, i8)>,
        slang: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::default();
        for (i, (term, score)) in sentiment.into_iter().enumerate() {
            check_score(DictionaryRole::Sentiment, i + 1, score as i64)?;
            lex.sentiment_terms.insert(term.to_lowercase(), score);
        }
        for (i, (term, boost)) in boosters.into_iter().enumerate() {
            check_score(DictionaryRole::Boosters, i + 1, boost as i64)?;
            lex.boosters.insert(term.to_lowercase(), boost);
        }
        for (i, (emo, score)) in emoticons.into_iter().enumerate() {
            check_score(DictionaryRole::Emoticons, i + 1, score as i64)?;
            lex.emoticons.insert(emo.to_string(), score);
        }
        for (slang, canon) in slang {
            lex.slang.insert(slang.to_lowercase(), canon.to_lowercase());
        }
        lex.check_conflicts()?;
        Ok(lex)
    }

    fn check_conflicts(&self) -> Result<(), LexiconError> {
        let mut clash: Vec<&String> = self
            .boosters
            .keys()
            .filter(|t| self.sentiment_terms.contains_key(*t))
            .collect();
        clash.sort();
        match clash.first() {
            Some(term) => Err(LexiconError::Conflict {
                term: (*term).clone(),
            }),
            None => Ok(()),
        }
    }
}

fn check_score(role: DictionaryRole, line: usize, value: i64) -> Result<(), LexiconError> {
    let ok = match role {
        DictionaryRole::Boosters => (-2..=2).contains(&value) && value != 0,
        DictionaryRole::Sentiment | DictionaryRole::Emoticons => {
            (1..=5).contains(&value.abs())
        }
        DictionaryRole::Slang => true,
    };
    if ok {
        Ok(())
    } else {
        let reason = match role {
            DictionaryRole::Boosters => format!("boost {value} outside -2..=2 or zero"),
            _ => format!("score {value} outside -5..=-1 / 1..=5"),
        };
        Err(LexiconError::Malformed { role, line, reason })
    }
}

/// Parses one dictionary into `(line, key, value)` triples.
fn read_entries<R: BufRead>(
    role: DictionaryRole,
    reader: R,
) -> Result<Vec<(usize, String, String)>, LexiconError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| LexiconError::Malformed {
            role,
            line: line_no,
            reason: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 || cols[0].trim().is_empty() || cols[1].trim().is_empty() {
            return Err(LexiconError::Malformed {
                role,
                line: line_no,
                reason: format!("expected 2 tab-separated columns, found {}", cols.len()),
            });
        }
        out.push((line_no, cols[0].trim().to_string(), cols[1].trim().to_string()));
    }
    Ok(out)
}

fn load_scored<R: BufRead>(
    role: DictionaryRole,
    reader: Option<R>,
    lowercase: bool,
    warnings: &mut Vec<LexiconWarning>,
) -> Result<HashMap<String, i8>, LexiconError> {
    let mut map = HashMap::new();
    let Some(reader) = reader else {
        return Ok(map);
    };
    for (line, key, value) in read_entries(role, reader)? {
        let value: i64 = value.parse().map_err(|_| LexiconError::Malformed {
            role,
            line,
            reason: format!("{value:?} is not an integer"),
        })?;
        check_score(role, line, value)?;
        let key = if lowercase { key.to_lowercase() } else { key };
        if map.insert(key.clone(), value as i8).is_some() {
            log::warn!("{role} dictionary, line {line}: duplicate term {key:?}, later entry wins");
            warnings.push(LexiconWarning {
                role,
                line,
                term: key,
            });
        }
    }
    Ok(map)
}

/// Reads all four dictionaries. Duplicate terms keep the last entry and
/// produce a warning; malformed lines abort with the offending line number.
pub fn load_lexicon<R: BufRead>(
    sources: LexiconSources<R>,
) -> Result<(Lexicon, Vec<LexiconWarning>), LexiconError> {
    let mut warnings = Vec::new();
    let sentiment_terms = load_scored(
        DictionaryRole::Sentiment,
        sources.sentiment,
        true,
        &mut warnings,
    )?;
    let boosters = load_scored(DictionaryRole::Boosters, sources.boosters, true, &mut warnings)?;
    // emoticons match on surface form, so case is significant (":D" vs ":d")
    let emoticons = load_scored(
        DictionaryRole::Emoticons,
        sources.emoticons,
        false,
        &mut warnings,
    )?;

    let mut slang = HashMap::new();
    if let Some(reader) = sources.slang {
        for (line, key, value) in read_entries(DictionaryRole::Slang, reader)? {
            let key = key.to_lowercase();
            if slang.insert(key.clone(), value.to_lowercase()).is_some() {
                log::warn!("slang dictionary, line {line}: duplicate term {key:?}, later entry wins");
                warnings.push(LexiconWarning {
                    role: DictionaryRole::Slang,
                    line,
                    term: key,
                });
            }
        }
    }

    let lexicon = Lexicon {
        sentiment_terms,
        boosters,
        emoticons,
        slang,
    };
    lexicon.check_conflicts()?;
    Ok((lexicon, warnings))
}
