//! Line-aligned parallel corpora in the FLORES `<code>.devtest` layout.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lang::LanguageCode;

pub const FILE_SUFFIX: &str = "devtest";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing corpus file for {code}: {path}")]
    MissingFile { code: LanguageCode, path: PathBuf },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: empty sentence")]
    BlankLine { path: PathBuf, line: usize },
    #[error("alignment error: {left} has {left_len} lines but {right} has {right_len}")]
    Unaligned {
        left: PathBuf,
        left_len: usize,
        right: PathBuf,
        right_len: usize,
    },
    #[error("cannot sample {requested} sentences from a corpus of {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("language {0} not loaded in corpus")]
    UnknownLanguage(LanguageCode),
    #[error("no languages requested")]
    NoLanguages,
}

/// Sentences of several languages aligned by line. `indices[k]` is the
/// original line number of row `k`, so sampled corpora keep stable ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    sentences: BTreeMap<LanguageCode, Vec<String>>,
    indices: Vec<usize>,
    provenance: PathBuf,
}

impl ParallelCorpus {
    /// Builds a corpus from in-memory columns, enforcing the same alignment
    /// and non-empty rules as [`load_corpus`].
    pub fn from_columns(
        columns: BTreeMap<LanguageCode, Vec<String>>,
        provenance: impl Into<PathBuf>,
    ) -> Result<Self, CorpusError> {
        let provenance = provenance.into();
        let mut len = None;
        let mut first: Option<&LanguageCode> = None;
        for (code, lines) in &columns {
            if let Some(l) = lines.iter().position(|s| s.trim().is_empty()) {
                return Err(CorpusError::BlankLine {
                    path: provenance.join(format!("{code}.{FILE_SUFFIX}")),
                    line: l + 1,
                });
            }
            match (len, first) {
                (Some(n), Some(f)) if n != lines.len() => {
                    return Err(CorpusError::Unaligned {
                        left: provenance.join(format!("{f}.{FILE_SUFFIX}")),
                        left_len: n,
                        right: provenance.join(format!("{code}.{FILE_SUFFIX}")),
                        right_len: lines.len(),
                    })
                }
                _ => {
                    len = Some(lines.len());
                    first = Some(code);
                }
            }
        }
        let n = len.unwrap_or(0);
        Ok(Self {
            sentences: columns,
            indices: (0..n).collect(),
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn languages(&self) -> impl Iterator<Item = &LanguageCode> {
        self.sentences.keys()
    }

    pub fn provenance(&self) -> &Path {
        &self.provenance
    }

    /// Original line numbers of the rows.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn sentences(&self, code: &LanguageCode) -> Result<&[String], CorpusError> {
        self.sentences
            .get(code)
            .map(Vec::as_slice)
            .ok_or_else(|| CorpusError::UnknownLanguage(code.clone()))
    }

    /// Row `row` of language `code`.
    pub fn sentence(&self, code: &LanguageCode, row: usize) -> Result<&str, CorpusError> {
        Ok(&self.sentences(code)?[row])
    }

    /// Draws `n` rows without replacement (seeded), keeping original order.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Self, CorpusError> {
        if n > self.len() {
            return Err(CorpusError::SampleTooLarge {
                requested: n,
                available: self.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = index::sample(&mut rng, self.len(), n).into_vec();
        rows.sort_unstable();
        Ok(self.select_rows(&rows))
    }

    fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            sentences: self
                .sentences
                .iter()
                .map(|(code, lines)| {
                    (
                        code.clone(),
                        rows.iter().map(|&r| lines[r].clone()).collect(),
                    )
                })
                .collect(),
            indices: rows.iter().map(|&r| self.indices[r]).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Loads `<dir>/<code>.devtest` for every requested language.
pub fn load_corpus(dir: &Path, langs: &[LanguageCode]) -> Result<ParallelCorpus, CorpusError> {
    load_corpus_with(dir, langs, &BTreeMap::new())
}

/// Like [`load_corpus`], with `overrides` mapping codes to file names
/// relative to `dir`.
pub fn load_corpus_with(
    dir: &Path,
    langs: &[LanguageCode],
    overrides: &BTreeMap<LanguageCode, String>,
) -> Result<ParallelCorpus, CorpusError> {
    if langs.is_empty() {
        return Err(CorpusError::NoLanguages);
    }
    let mut columns = BTreeMap::new();
    let mut first: Option<(PathBuf, usize)> = None;
    for code in langs {
        let path = match overrides.get(code) {
            Some(name) => dir.join(name),
            None => dir.join(format!("{code}.{FILE_SUFFIX}")),
        };
        if !path.is_file() {
            return Err(CorpusError::MissingFile {
                code: code.clone(),
                path,
            });
        }
        let lines = read_sentences(&path)?;
        match &first {
            Some((p, n)) if *n != lines.len() => {
                return Err(CorpusError::Unaligned {
                    left: p.clone(),
                    left_len: *n,
                    right: path,
                    right_len: lines.len(),
                })
            }
            Some(_) => {}
            None => first = Some((path.clone(), lines.len())),
        }
        columns.insert(code.clone(), lines);
    }
    ParallelCorpus::from_columns(columns, dir)
}

fn read_sentences(path: &Path) -> Result<Vec<String>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let body = text.strip_suffix('\n').unwrap_or(&text);
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split('\n')
        .enumerate()
        .map(|(i, line)| {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.trim().is_empty() {
                Err(CorpusError::BlankLine {
                    path: path.to_path_buf(),
                    line: i + 1,
                })
            } else {
                Ok(line.to_string())
            }
        })
        .collect()
}
