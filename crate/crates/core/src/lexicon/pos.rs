use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LexiconError, SentenceDictionary};
use crate::text;

/// Universal part-of-speech tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Upos {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl Upos {
    pub const ALL: [Upos; 17] = [
        Upos::Adj,
        Upos::Adp,
        Upos::Adv,
        Upos::Aux,
        Upos::Cconj,
        Upos::Det,
        Upos::Intj,
        Upos::Noun,
        Upos::Num,
        Upos::Part,
        Upos::Pron,
        Upos::Propn,
        Upos::Punct,
        Upos::Sconj,
        Upos::Sym,
        Upos::Verb,
        Upos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::Adj => "ADJ",
            Upos::Adp => "ADP",
            Upos::Adv => "ADV",
            Upos::Aux => "AUX",
            Upos::Cconj => "CCONJ",
            Upos::Det => "DET",
            Upos::Intj => "INTJ",
            Upos::Noun => "NOUN",
            Upos::Num => "NUM",
            Upos::Part => "PART",
            Upos::Pron => "PRON",
            Upos::Propn => "PROPN",
            Upos::Punct => "PUNCT",
            Upos::Sconj => "SCONJ",
            Upos::Sym => "SYM",
            Upos::Verb => "VERB",
            Upos::X => "X",
        }
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Upos {
    type Err = LexiconError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Upos::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| LexiconError::UnknownTag(s.to_string()))
    }
}

/// Static English word → tag table (`word<TAB>TAG`, one tag per word).
#[derive(Debug, Clone, Default)]
pub struct PosLexicon {
    tags: HashMap<String, Upos>,
}

impl PosLexicon {
    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let malformed = |line: usize, message: String| LexiconError::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut tags = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line
                .split_once('\t')
                .ok_or_else(|| malformed(i + 1, "expected `word<TAB>TAG`".into()))?;
            let tag: Upos = tag
                .trim()
                .parse()
                .map_err(|e: LexiconError| malformed(i + 1, e.to_string()))?;
            // first listing wins (most-frequent tag first)
            tags.entry(word.trim().to_lowercase()).or_insert(tag);
        }
        Ok(Self { tags })
    }

    pub fn get(&self, word: &str) -> Option<Upos> {
        self.tags.get(&word.to_lowercase()).copied()
    }

    /// Tags an English word or phrase by its first token. Unknown
    /// capitalized single words are treated as proper nouns.
    pub fn tag(&self, english: &str) -> Upos {
        let mut raw = english.split_whitespace();
        let Some(first) = raw.next() else {
            return Upos::X;
        };
        let key = text::normalize_token(first);
        if let Some(t) = self.tags.get(&key) {
            return *t;
        }
        let single = raw.next().is_none();
        let capitalized = first
            .trim_matches(text::is_punctuation)
            .chars()
            .next()
            .is_some_and(char::is_uppercase);
        if single && capitalized {
            Upos::Propn
        } else {
            Upos::X
        }
    }
}

impl FromIterator<(String, Upos)> for PosLexicon {
    fn from_iter<I: IntoIterator<Item = (String, Upos)>>(iter: I) -> Self {
        let mut tags = HashMap::new();
        for (w, t) in iter {
            tags.entry(w.to_lowercase()).or_insert(t);
        }
        Self { tags }
    }
}

/// Re-tags every entry of `dict` from its English side.
pub fn tag_entries(dict: &mut SentenceDictionary, lexicon: &PosLexicon) {
    let pair = dict.pair.clone();
    for e in &mut dict.entries {
        e.pos = lexicon.tag(super::english_side(&pair, e));
    }
}
