//! Per-sentence bilingual dictionaries: construction prompts, response
//! parsing, PoS tagging and the line-delimited on-disk store.

mod construct;
mod parse;
mod pos;
mod store;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::LanguagePair;

pub use construct::{join_pivot, orient_from_english, orient_into_english, DictionaryBuilder};
pub use parse::{build_dict_prompt, parse_dictionary_block, render_dictionary_line};
pub use pos::{tag_entries, PosLexicon, Upos};
pub use store::{append_dictionaries, load_dictionaries, store_dictionaries};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("response has no line starting with `dictionary:`")]
    MissingMarker,
    #[error("unbalanced parenthesis at character {offset} of dictionary line")]
    Unbalanced { offset: usize },
    #[error("entry without a surface word at character {offset} of dictionary line")]
    EmptySurface { offset: usize },
    #[error("empty gloss at character {offset} of dictionary line")]
    EmptyGloss { offset: usize },
    #[error("dictionary line contains no `surface (gloss)` entries")]
    EmptyDictionary,
    #[error("{what} must not be empty")]
    EmptyInput { what: &'static str },
    #[error("unknown part-of-speech tag {0:?}")]
    UnknownTag(String),
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: std::path::PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid dictionary: {0}")]
    Invalid(String),
}

/// One word of a sentence with its translation.
///
/// `surface` is the word as it appears in the sentence being translated and
/// `gloss` its rendering in the target language. For pairs where neither
/// side is English, `pivot` holds the English meaning the two were joined on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictEntry {
    pub surface: String,
    pub gloss: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<String>,
    pub pos: Upos,
    pub origin_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceDictionary {
    pub pair: LanguagePair,
    pub sentence_index: usize,
    pub entries: Vec<DictEntry>,
}

impl SentenceDictionary {
    pub fn new(
        pair: LanguagePair,
        sentence_index: usize,
        entries: Vec<DictEntry>,
    ) -> Result<Self, LexiconError> {
        let dict = Self {
            pair,
            sentence_index,
            entries,
        };
        dict.validate()?;
        Ok(dict)
    }

    /// Checks non-empty text fields and that origin indices are `0..len`.
    pub fn validate(&self) -> Result<(), LexiconError> {
        let mut seen = vec![false; self.entries.len()];
        for e in &self.entries {
            if e.surface.trim().is_empty() || e.gloss.trim().is_empty() {
                return Err(LexiconError::Invalid(format!(
                    "entry {} has an empty surface or gloss",
                    e.origin_index
                )));
            }
            match seen.get_mut(e.origin_index) {
                Some(s) if !*s => *s = true,
                _ => {
                    return Err(LexiconError::Invalid(format!(
                        "origin_index {} out of range or repeated",
                        e.origin_index
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The English word(s) of an entry, used for frequency and PoS lookup.
    pub fn english_side<'a>(&self, entry: &'a DictEntry) -> &'a str {
        english_side(&self.pair, entry)
    }
}

pub(crate) fn english_side<'a>(pair: &LanguagePair, entry: &'a DictEntry) -> &'a str {
    if pair.source.is_english() {
        &entry.surface
    } else if let Some(p) = &entry.pivot {
        p
    } else {
        &entry.gloss
    }
}
