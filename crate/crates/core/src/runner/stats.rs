use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ReportRow, RunnerError};
use crate::lang::{Direction, LanguagePair};
use crate::num::Real;
use crate::select::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Bleu,
    Chrf,
    Comet,
}

impl Metric {
    pub fn value<S: Real>(self, row: &ReportRow<S>) -> Option<S> {
        match self {
            Metric::Bleu => row.bleu,
            Metric::Chrf => row.chrf,
            Metric::Comet => row.comet,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Bleu => "bleu",
            Metric::Chrf => "chrf",
            Metric::Comet => "comet",
        })
    }
}

impl FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bleu" => Ok(Metric::Bleu),
            "chrf" => Ok(Metric::Chrf),
            "comet" => Ok(Metric::Comet),
            other => Err(format!(
                "unknown metric {other:?} (expected bleu, chrf or comet)"
            )),
        }
    }
}

/// Candidate-minus-baseline counts over pairs. `improved_gt[i]` counts
/// improvements whose delta exceeds `thresholds[i]`; likewise for degradations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementStats<S: Real> {
    pub metric: Metric,
    pub baseline: Strategy,
    pub candidate: Strategy,
    pub thresholds: Vec<S>,
    pub pairs: usize,
    pub improved_total: usize,
    pub improved_gt: Vec<usize>,
    pub degraded_total: usize,
    pub degraded_gt: Vec<usize>,
    pub ties: usize,
    /// Pairs left out because one of the two rows was marked invalid.
    pub skipped: usize,
}

fn row_for<'a, S: Real>(
    rows: &'a [ReportRow<S>],
    pair: &LanguagePair,
    strategy: &Strategy,
) -> Result<&'a ReportRow<S>, RunnerError> {
    rows.iter()
        .find(|r| &r.pair == pair && &r.strategy == strategy)
        .ok_or_else(|| RunnerError::MissingStrategy {
            pair: pair.clone(),
            strategy: strategy.clone(),
        })
}

/// Compares `candidate` against `baseline` on every pair of `rows`.
pub fn improvement_stats<S: Real>(
    rows: &[ReportRow<S>],
    baseline: &Strategy,
    candidate: &Strategy,
    metric: Metric,
    thresholds: &[S],
) -> Result<ImprovementStats<S>, RunnerError> {
    let mut pairs: Vec<&LanguagePair> = rows.iter().map(|r| &r.pair).collect();
    pairs.sort();
    pairs.dedup();
    let mut stats = ImprovementStats {
        metric,
        baseline: baseline.clone(),
        candidate: candidate.clone(),
        thresholds: thresholds.to_vec(),
        pairs: 0,
        improved_total: 0,
        improved_gt: vec![0; thresholds.len()],
        degraded_total: 0,
        degraded_gt: vec![0; thresholds.len()],
        ties: 0,
        skipped: 0,
    };
    for pair in pairs {
        let b = row_for(rows, pair, baseline)?;
        let c = row_for(rows, pair, candidate)?;
        if !(b.valid && c.valid) {
            stats.skipped += 1;
            continue;
        }
        let score = |row: &ReportRow<S>| {
            metric.value(row).ok_or_else(|| RunnerError::MissingMetric {
                pair: pair.clone(),
                strategy: row.strategy.clone(),
                metric,
            })
        };
        let delta = score(c)? - score(b)?;
        stats.pairs += 1;
        let (total, buckets) = if delta > S::zero() {
            (&mut stats.improved_total, &mut stats.improved_gt)
        } else if delta < S::zero() {
            (&mut stats.degraded_total, &mut stats.degraded_gt)
        } else {
            stats.ties += 1;
            continue;
        };
        *total += 1;
        for (count, t) in buckets.iter_mut().zip(thresholds) {
            if delta.abs() > *t {
                *count += 1;
            }
        }
    }
    Ok(stats)
}

/// Per direction, total selected words over total dictionary words.
pub fn budget_ratio<S: Real>(rows: &[ReportRow<S>]) -> Result<BTreeMap<Direction, S>, RunnerError> {
    let mut sums: BTreeMap<Direction, (S, S)> = BTreeMap::new();
    for r in rows {
        let e = sums.entry(r.direction).or_insert((S::zero(), S::zero()));
        e.0 = e.0 + r.mean_v;
        e.1 = e.1 + r.full_dict_size;
    }
    sums.into_iter()
        .map(|(d, (v, full))| {
            if full == S::zero() {
                Err(RunnerError::ZeroDictionary(d))
            } else {
                Ok((d, v / full))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(pair: &str, strategy: Strategy, chrf: f64, mean_v: f64, full: f64) -> ReportRow<f64> {
        let pair: LanguagePair = pair.parse().unwrap();
        ReportRow {
            direction: pair.direction(),
            pair,
            strategy,
            bleu: Some(chrf),
            chrf: Some(chrf),
            comet: None,
            mean_v,
            full_dict_size: full,
            sentences: 5,
            failed: 0,
            valid: true,
        }
    }

    fn table(deltas: &[f64]) -> Vec<ReportRow<f64>> {
        let langs = ["fra_Latn", "deu_Latn", "zsm_Latn", "pbt_Arab"];
        let mut rows = Vec::new();
        for (d, l) in deltas.iter().zip(langs) {
            let pair = format!("{l}:eng_Latn");
            rows.push(row(&pair, Strategy::DifferRoundTrip, 50.0, 3.0, 6.0));
            rows.push(row(&pair, Strategy::Slow, 50.0 + d, 3.0, 6.0));
        }
        rows
    }

    #[test]
    fn buckets_by_sign() {
        let rows = table(&[6.0, 1.0, -3.0]);
        let s = improvement_stats(
            &rows,
            &Strategy::DifferRoundTrip,
            &Strategy::Slow,
            Metric::Chrf,
            &[5.0],
        )
        .unwrap();
        assert_eq!((s.improved_total, s.improved_gt.clone()), (2, vec![1]));
        assert_eq!((s.degraded_total, s.degraded_gt.clone()), (1, vec![0]));
        assert_eq!((s.ties, s.pairs), (0, 3));
    }

    #[test]
    fn identical_columns_are_ties() {
        let rows = table(&[0.0, 0.0]);
        let s = improvement_stats(
            &rows,
            &Strategy::DifferRoundTrip,
            &Strategy::Slow,
            Metric::Chrf,
            &[5.0],
        )
        .unwrap();
        assert_eq!((s.improved_total, s.degraded_total, s.ties), (0, 0, 2));
    }

    #[test]
    fn missing_strategy_is_an_error() {
        let rows = table(&[1.0]);
        let err = improvement_stats(&rows, &Strategy::Full, &Strategy::Slow, Metric::Chrf, &[])
            .unwrap_err();
        assert!(matches!(err, RunnerError::MissingStrategy { .. }));
        let err = improvement_stats(
            &rows,
            &Strategy::DifferRoundTrip,
            &Strategy::Slow,
            Metric::Comet,
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, RunnerError::MissingMetric { .. }));
    }

    #[test]
    fn ratio_examples() {
        let rows = vec![row("fra_Latn:eng_Latn", Strategy::Slow, 1.0, 5.0, 10.0)];
        assert_eq!(budget_ratio(&rows).unwrap()[&Direction::XE], 0.5);
        let rows = vec![row("fra_Latn:eng_Latn", Strategy::Vanilla, 1.0, 0.0, 10.0)];
        assert_eq!(budget_ratio(&rows).unwrap()[&Direction::XE], 0.0);
        let rows = vec![row("fra_Latn:eng_Latn", Strategy::Slow, 1.0, 0.0, 0.0)];
        assert!(matches!(
            budget_ratio(&rows),
            Err(RunnerError::ZeroDictionary(Direction::XE))
        ));
    }
}
