//! Corpus BLEU and chrF scorers that reproduce sacreBLEU's defaults, plus
//! ingestion of externally computed per-segment scores (e.g. COMET).

mod bleu;
mod chrf;
mod tokenize;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::num::Real;

pub use bleu::{bleu_corpus, BleuScore, MAX_NGRAM_ORDER};
pub use chrf::{chrf_corpus, chrf_corpus_with, ChrfScore, DEFAULT_BETA, DEFAULT_CHAR_ORDER};
pub use tokenize::{is_py_whitespace, tokenize_13a};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("{hyps} hypotheses but {refs} references")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("{path}:{line}: {value:?} is not a number")]
    Parse {
        path: PathBuf,
        line: usize,
        value: String,
    },
    #[error("{path}: {got} scores but the run has {expected} segments")]
    SegmentCount {
        path: PathBuf,
        expected: usize,
        got: usize,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn check_lengths(hyps: usize, refs: usize) -> Result<(), MetricsError> {
    if hyps != refs {
        return Err(MetricsError::LengthMismatch { hyps, refs });
    }
    if hyps == 0 {
        return Err(MetricsError::EmptyCorpus);
    }
    Ok(())
}

/// Reads one segment per line; a single trailing newline is not a segment.
pub fn read_segments(path: &Path) -> Result<Vec<String>, MetricsError> {
    let text = fs::read_to_string(path).map_err(|source| MetricsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let body = text.strip_suffix('\n').unwrap_or(&text);
    if body.is_empty() && text.is_empty() {
        return Ok(Vec::new());
    }
    Ok(body
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect())
}

/// Externally computed per-segment scores, aligned with the sample order.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentScores<S: Real> {
    pub scores: Vec<S>,
    pub provenance: PathBuf,
}

impl<S: Real> SegmentScores<S> {
    pub fn mean(&self) -> Option<S> {
        if self.scores.is_empty() {
            return None;
        }
        Some(self.scores.iter().copied().sum::<S>() / S::from_count(self.scores.len()))
    }
}

/// Parses one real per line. With `expected`, the count must match.
pub fn ingest_segment_scores<S: Real>(
    path: &Path,
    expected: Option<usize>,
) -> Result<SegmentScores<S>, MetricsError> {
    let lines = read_segments(path)?;
    let scores = lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            l.trim().parse::<S>().map_err(|_| MetricsError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                value: l.clone(),
            })
        })
        .collect::<Result<Vec<S>, _>>()?;
    if let Some(n) = expected {
        if n != scores.len() {
            return Err(MetricsError::SegmentCount {
                path: path.to_path_buf(),
                expected: n,
                got: scores.len(),
            });
        }
    }
    Ok(SegmentScores {
        scores,
        provenance: path.to_path_buf(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ingest() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("comet.txt");
        fs::write(&p, "0.5\n0.7\n").unwrap();
        let s = ingest_segment_scores::<f64>(&p, Some(2)).unwrap();
        assert!((s.mean().unwrap() - 0.6).abs() < 1e-12);

        fs::write(&p, "0.5\n0.7\n0.9\n").unwrap();
        assert!(matches!(
            ingest_segment_scores::<f64>(&p, Some(2)),
            Err(MetricsError::SegmentCount {
                expected: 2,
                got: 3,
                ..
            })
        ));

        fs::write(&p, "0.5\nabc\n").unwrap();
        assert!(matches!(
            ingest_segment_scores::<f32>(&p, None),
            Err(MetricsError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn segment_reader() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.txt");
        fs::write(&p, "a\r\n\nb\n").unwrap();
        assert_eq!(read_segments(&p).unwrap(), ["a", "", "b"]);
        fs::write(&p, "").unwrap();
        assert!(read_segments(&p).unwrap().is_empty());
    }
}
