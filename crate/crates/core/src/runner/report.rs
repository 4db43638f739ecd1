use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{io_err, ImprovementStats, RunnerError};
use crate::lang::{Direction, LanguagePair};
use crate::num::Real;
use crate::select::Strategy;

/// One translated sentence of one arm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub pair: LanguagePair,
    pub strategy: Strategy,
    pub sentence_index: usize,
    /// Number of dictionary entries placed in the prompt.
    pub v: usize,
    /// Budget the strategy was held to, when it had one.
    pub budget: Option<usize>,
    /// Cache key of the prompt under the run's model.
    pub prompt_hash: String,
    pub translation: Option<String>,
    /// The response lacked the answer marker.
    pub unmarked: bool,
    pub error: Option<String>,
}

/// Corpus scores of one arm on one pair. Scores are `None` when the pair
/// was marked invalid (or, for COMET, when no scores were supplied).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow<S: Real> {
    pub pair: LanguagePair,
    pub direction: Direction,
    pub strategy: Strategy,
    pub bleu: Option<S>,
    pub chrf: Option<S>,
    pub comet: Option<S>,
    pub mean_v: S,
    pub full_dict_size: S,
    pub sentences: usize,
    pub failed: usize,
    pub valid: bool,
}

const REPORT_HEADER: [&str; 11] = [
    "pair",
    "direction",
    "strategy",
    "bleu",
    "chrf",
    "comet",
    "mean_v",
    "full_dict_size",
    "sentences",
    "failed",
    "valid",
];

/// File holding the per-segment COMET scores of one arm.
pub fn comet_file_name(pair: &LanguagePair, strategy: &Strategy) -> String {
    let slug = strategy.to_string().replace(':', "_").replace(',', "+");
    format!("{}-{}.{slug}.comet", pair.source, pair.target)
}

fn opt<S: Real>(v: Option<S>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn render_report_tsv<S: Real>(rows: &[ReportRow<S>]) -> String {
    let mut out = REPORT_HEADER.join("\t");
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.pair,
            r.direction,
            r.strategy,
            opt(r.bleu),
            opt(r.chrf),
            opt(r.comet),
            r.mean_v,
            r.full_dict_size,
            r.sentences,
            r.failed,
            r.valid
        );
    }
    out
}

pub fn render_stats_tsv<S: Real>(stats: &[ImprovementStats<S>]) -> String {
    let mut out = String::new();
    for s in stats {
        let mut header: Vec<String> = [
            "metric",
            "baseline",
            "candidate",
            "pairs",
            "improved_total",
            "degraded_total",
            "ties",
            "skipped",
        ]
        .map(String::from)
        .to_vec();
        header.extend(s.thresholds.iter().map(|t| format!("improved_gt_{t}")));
        header.extend(s.thresholds.iter().map(|t| format!("degraded_gt_{t}")));
        let mut line = vec![
            s.metric.to_string(),
            s.baseline.to_string(),
            s.candidate.to_string(),
            s.pairs.to_string(),
            s.improved_total.to_string(),
            s.degraded_total.to_string(),
            s.ties.to_string(),
            s.skipped.to_string(),
        ];
        line.extend(s.improved_gt.iter().map(|c| c.to_string()));
        line.extend(s.degraded_gt.iter().map(|c| c.to_string()));
        let _ = writeln!(out, "{}\n{}", header.join("\t"), line.join("\t"));
    }
    out
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), RunnerError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| RunnerError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

pub(crate) fn render_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("report types serialize"));
        out.push('\n');
    }
    out
}

pub(crate) fn write_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<(), RunnerError> {
    write_atomic(path, render_jsonl(items).as_bytes())
}

pub(crate) fn write_text(text: &str, path: &Path) -> Result<(), RunnerError> {
    write_atomic(path, text.as_bytes())
}

pub fn write_report_tsv<S: Real>(rows: &[ReportRow<S>], path: &Path) -> Result<(), RunnerError> {
    write_text(&render_report_tsv(rows), path)
}

pub fn write_report_jsonl<S: Real + Serialize>(
    rows: &[ReportRow<S>],
    path: &Path,
) -> Result<(), RunnerError> {
    write_jsonl(rows, path)
}

pub fn write_stats_tsv<S: Real>(
    stats: &[ImprovementStats<S>],
    path: &Path,
) -> Result<(), RunnerError> {
    write_text(&render_stats_tsv(stats), path)
}

fn read_to_string(path: &Path) -> Result<String, RunnerError> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

/// Reads a report written by [`write_report_tsv`].
pub fn read_report_tsv<S: Real>(path: &Path) -> Result<Vec<ReportRow<S>>, RunnerError> {
    let text = read_to_string(path)?;
    let malformed = |line: usize, message: String| RunnerError::Malformed {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.split('\t').eq(REPORT_HEADER) => {}
        _ => {
            return Err(malformed(
                1,
                format!("expected header `{}`", REPORT_HEADER.join(" ")),
            ))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != REPORT_HEADER.len() {
            return Err(malformed(
                n,
                format!("expected {} fields, found {}", REPORT_HEADER.len(), f.len()),
            ));
        }
        let real = |k: usize| {
            f[k].parse::<S>().map_err(|_| {
                malformed(n, format!("{}: not a number: {:?}", REPORT_HEADER[k], f[k]))
            })
        };
        let maybe = |k: usize| {
            if f[k].is_empty() {
                Ok(None)
            } else {
                real(k).map(Some)
            }
        };
        let count = |k: usize| {
            f[k].parse::<usize>()
                .map_err(|_| malformed(n, format!("{}: not a count: {:?}", REPORT_HEADER[k], f[k])))
        };
        rows.push(ReportRow {
            pair: f[0]
                .parse::<LanguagePair>()
                .map_err(|e| malformed(n, e.to_string()))?,
            direction: f[1]
                .parse::<Direction>()
                .map_err(|e| malformed(n, e.to_string()))?,
            strategy: f[2]
                .parse::<Strategy>()
                .map_err(|e| malformed(n, e.to_string()))?,
            bleu: maybe(3)?,
            chrf: maybe(4)?,
            comet: maybe(5)?,
            mean_v: real(6)?,
            full_dict_size: real(7)?,
            sentences: count(8)?,
            failed: count(9)?,
            valid: f[10]
                .parse()
                .map_err(|_| malformed(n, format!("valid: not a boolean: {:?}", f[10])))?,
        });
    }
    Ok(rows)
}

pub(crate) fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, RunnerError> {
    let text = read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| RunnerError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_report_jsonl<S: Real + DeserializeOwned>(
    path: &Path,
) -> Result<Vec<ReportRow<S>>, RunnerError> {
    read_jsonl(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ReportRow<f64>> {
        let pair: LanguagePair = "zsm_Latn:pbt_Arab".parse().unwrap();
        vec![
            ReportRow {
                direction: pair.direction(),
                pair: pair.clone(),
                strategy: "pos:NOUN,ADJ".parse().unwrap(),
                bleu: Some(12.345678901234567),
                chrf: Some(40.1),
                comet: None,
                mean_v: 2.2,
                full_dict_size: 7.0 / 3.0,
                sentences: 5,
                failed: 0,
                valid: true,
            },
            ReportRow {
                direction: pair.direction(),
                pair,
                strategy: Strategy::Slow,
                bleu: None,
                chrf: None,
                comet: Some(0.8),
                mean_v: 0.0,
                full_dict_size: 0.0,
                sentences: 5,
                failed: 3,
                valid: false,
            },
        ]
    }

    #[test]
    fn tsv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.tsv");
        let rows = sample();
        write_report_tsv(&rows, &path).unwrap();
        assert_eq!(read_report_tsv::<f64>(&path).unwrap(), rows);
        let json = dir.path().join("report.jsonl");
        write_report_jsonl(&rows, &json).unwrap();
        assert_eq!(read_report_jsonl::<f64>(&json).unwrap(), rows);
    }

    #[test]
    fn empty_report_is_header_only() {
        let text = render_report_tsv::<f64>(&[]);
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("pair\tdirection\tstrategy"));
    }

    #[test]
    fn comet_names_are_file_safe() {
        let pair: LanguagePair = "zsm_Latn:eng_Latn".parse().unwrap();
        let s: Strategy = "pos:NOUN,VERB".parse().unwrap();
        assert_eq!(
            comet_file_name(&pair, &s),
            "zsm_Latn-eng_Latn.pos_NOUN+VERB.comet"
        );
    }
}
