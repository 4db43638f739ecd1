//! English Zipf-frequency lookup (`word<TAB>zipf` tables).
//!
//! Zipf is log10 of occurrences per billion tokens, so values sit in
//! `[0, 9]`. Words missing from the table get `default_zipf`, which
//! defaults to 0 so unseen words rank as the rarest.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::num::Real;
use crate::text;

pub const MAX_ZIPF: f64 = 9.0;

#[derive(Debug, Error)]
pub enum FreqError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `word<TAB>zipf`")]
    Format { line: usize },
    #[error("line {line}: zipf value {value:?} is not a number")]
    Parse { line: usize, value: String },
    #[error("line {line}: zipf {value} outside [0, 9]")]
    Range { line: usize, value: f64 },
    #[error("default zipf {0} outside [0, 9]")]
    DefaultRange(f64),
    #[error("empty word")]
    EmptyWord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable<S: Real> {
    entries: HashMap<String, S>,
    default_zipf: S,
}

impl<S: Real> Default for FrequencyTable<S> {
    fn default() -> Self {
        Self {
            entries: HashMap::new(),
            default_zipf: S::zero(),
        }
    }
}

fn in_range<S: Real>(v: S) -> bool {
    v >= S::zero() && v <= S::lit(MAX_ZIPF)
}

impl<S: Real> FrequencyTable<S> {
    pub fn load(path: &Path) -> Result<Self, FreqError> {
        let text = fs::read_to_string(path).map_err(|source| FreqError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses TSV text; keys are case-folded and duplicate keys keep the
    /// maximum score.
    pub fn parse(text: &str) -> Result<Self, FreqError> {
        let mut table = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(word), Some(value)) = (cols.next(), cols.next()) else {
                return Err(FreqError::Format { line: line_no });
            };
            let word = word.trim();
            if word.is_empty() || word.contains(char::is_whitespace) {
                return Err(FreqError::Format { line: line_no });
            }
            let value = value.trim();
            let zipf: S = value.parse().map_err(|_| FreqError::Parse {
                line: line_no,
                value: value.to_string(),
            })?;
            if !in_range(zipf) {
                return Err(FreqError::Range {
                    line: line_no,
                    value: zipf.to_f64_lossy(),
                });
            }
            table.insert_max(word.to_lowercase(), zipf);
        }
        Ok(table)
    }

    pub fn from_pairs<'a>(
        pairs: impl IntoIterator<Item = (&'a str, S)>,
    ) -> Result<Self, FreqError> {
        let mut table = Self::default();
        for (word, zipf) in pairs {
            if word.trim().is_empty() {
                return Err(FreqError::EmptyWord);
            }
            if !in_range(zipf) {
                return Err(FreqError::DefaultRange(zipf.to_f64_lossy()));
            }
            table.insert_max(word.to_lowercase(), zipf);
        }
        Ok(table)
    }

    fn insert_max(&mut self, key: String, zipf: S) {
        self.entries
            .entry(key)
            .and_modify(|v| *v = v.max(zipf))
            .or_insert(zipf);
    }

    pub fn with_default(mut self, default_zipf: S) -> Result<Self, FreqError> {
        if !in_range(default_zipf) {
            return Err(FreqError::DefaultRange(default_zipf.to_f64_lossy()));
        }
        self.default_zipf = default_zipf;
        Ok(self)
    }

    pub fn default_zipf(&self) -> S {
        self.default_zipf
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Applies `f` to every stored score and the default. The caller is
    /// responsible for keeping results inside `[0, 9]`.
    pub fn map_scores(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), f(*v)))
                .collect(),
            default_zipf: f(self.default_zipf),
        }
    }

    /// Score of a single word: case-folded, with surrounding punctuation
    /// removed unless nothing else remains.
    pub fn zipf(&self, word: &str) -> Result<S, FreqError> {
        let word = word.trim();
        if word.is_empty() {
            return Err(FreqError::EmptyWord);
        }
        let mut key = text::normalize_token(word);
        if key.is_empty() {
            key = word.to_lowercase();
        }
        Ok(self.entries.get(&key).copied().unwrap_or(self.default_zipf))
    }

    /// A phrase is as rare as its rarest whitespace token.
    pub fn phrase_zipf(&self, phrase: &str) -> Result<S, FreqError> {
        phrase
            .split_whitespace()
            .map(|t| self.zipf(t))
            .try_fold(None, |acc: Option<S>, z| {
                let z = z?;
                Ok(Some(acc.map_or(z, |a| a.min(z))))
            })?
            .ok_or(FreqError::EmptyWord)
    }
}
