//! FLORES-style language codes, directed pairs and display names.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const ENGLISH: &str = "eng_Latn";

#[derive(Debug, Error)]
pub enum LangError {
    #[error("invalid language code {0:?} (expected e.g. eng_Latn)")]
    InvalidCode(String),
    #[error("invalid language pair {0:?} (expected <src>:<tgt>)")]
    InvalidPair(String),
    #[error("pair {0} has the same language on both sides")]
    SameLanguage(String),
    #[error("no display name for {0}")]
    UnknownName(String),
    #[error("{path}:{line}: expected `code<TAB>display name`")]
    NamesFormat { path: PathBuf, line: usize },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Three lowercase letters, `_`, and a capitalized four-letter script tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LanguageCode(String);

impl LanguageCode {
    pub fn new(code: &str) -> Result<Self, LangError> {
        let valid = code.len() == 8 && {
            let b = code.as_bytes();
            b[..3].iter().all(u8::is_ascii_lowercase)
                && b[3] == b'_'
                && b[4].is_ascii_uppercase()
                && b[5..].iter().all(u8::is_ascii_lowercase)
        };
        if valid {
            Ok(Self(code.to_string()))
        } else {
            Err(LangError::InvalidCode(code.to_string()))
        }
    }

    pub fn english() -> Self {
        Self(ENGLISH.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_english(&self) -> bool {
        self.0 == ENGLISH
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for LanguageCode {
    type Err = LangError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl Serialize for LanguageCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for LanguageCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Translation direction class of a pair relative to English.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// From English.
    EX,
    /// Into English.
    XE,
    /// Neither side English.
    XX,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::EX => "EX",
            Direction::XE => "XE",
            Direction::XX => "XX",
        };
        f.write_str(s)
    }
}

impl FromStr for Direction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "EX" => Ok(Direction::EX),
            "XE" => Ok(Direction::XE),
            "XX" => Ok(Direction::XX),
            other => Err(format!(
                "unknown direction {other:?} (expected EX, XE or XX)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LanguagePair {
    pub source: LanguageCode,
    pub target: LanguageCode,
}

impl LanguagePair {
    pub fn new(source: LanguageCode, target: LanguageCode) -> Result<Self, LangError> {
        if source == target {
            return Err(LangError::SameLanguage(format!("{source}:{target}")));
        }
        Ok(Self { source, target })
    }

    pub fn direction(&self) -> Direction {
        if self.source.is_english() {
            Direction::EX
        } else if self.target.is_english() {
            Direction::XE
        } else {
            Direction::XX
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }
}

impl fmt::Display for LanguagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.source, self.target)
    }
}

impl FromStr for LanguagePair {
    type Err = LangError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| LangError::InvalidPair(s.to_string()))?;
        Self::new(a.trim().parse()?, b.trim().parse()?)
    }
}

impl Serialize for LanguagePair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LanguagePair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Code → display name table (`code<TAB>display name`), used in prompts.
#[derive(Debug, Clone, Default)]
pub struct LanguageNames {
    names: BTreeMap<LanguageCode, String>,
}

impl LanguageNames {
    pub fn load(path: &Path) -> Result<Self, LangError> {
        let text = fs::read_to_string(path).map_err(|source| LangError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut names = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fmt_err = || LangError::NamesFormat {
                path: path.to_path_buf(),
                line: i + 1,
            };
            let (code, name) = line.split_once('\t').ok_or_else(fmt_err)?;
            let name = name.trim();
            if name.is_empty() {
                return Err(fmt_err());
            }
            names.insert(LanguageCode::new(code.trim())?, name.to_string());
        }
        Ok(Self { names })
    }

    pub fn insert(&mut self, code: LanguageCode, name: impl Into<String>) {
        self.names.insert(code, name.into());
    }

    pub fn name(&self, code: &LanguageCode) -> Result<&str, LangError> {
        self.names
            .get(code)
            .map(String::as_str)
            .ok_or_else(|| LangError::UnknownName(code.to_string()))
    }
}

impl FromIterator<(LanguageCode, String)> for LanguageNames {
    fn from_iter<I: IntoIterator<Item = (LanguageCode, String)>>(iter: I) -> Self {
        Self {
            names: iter.into_iter().collect(),
        }
    }
}
