use std::collections::HashMap;

use serde::Serialize;

use super::{check_lengths, is_py_whitespace, MetricsError};
use crate::num::Real;

pub const DEFAULT_CHAR_ORDER: usize = 6;
pub const DEFAULT_BETA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChrfScore<S: Real> {
    pub score: S,
    pub char_order: usize,
    pub beta: S,
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], u64> {
    let mut m = HashMap::new();
    for w in chars.windows(n) {
        *m.entry(w).or_insert(0) += 1;
    }
    m
}

/// Corpus chrF with the default character order 6 and beta 2.
pub fn chrf_corpus<S: Real, H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
) -> Result<ChrfScore<S>, MetricsError> {
    chrf_corpus_with(hyps, refs, DEFAULT_CHAR_ORDER, S::lit(DEFAULT_BETA))
}

/// Character n-gram F-beta. Whitespace is removed, per-order
/// `[hyp, ref, match]` counts are summed over the corpus, precision and
/// recall are averaged over the orders present on both sides, and the
/// F-score is taken from those averages.
pub fn chrf_corpus_with<S: Real, H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
    char_order: usize,
    beta: S,
) -> Result<ChrfScore<S>, MetricsError> {
    check_lengths(hyps.len(), refs.len())?;
    let mut stats = vec![[0u64; 3]; char_order];
    for (h, r) in hyps.iter().zip(refs) {
        let h: Vec<char> = h
            .as_ref()
            .chars()
            .filter(|c| !is_py_whitespace(*c))
            .collect();
        let r: Vec<char> = r
            .as_ref()
            .chars()
            .filter(|c| !is_py_whitespace(*c))
            .collect();
        for (n, slot) in (1..=char_order).zip(stats.iter_mut()) {
            let hg = char_ngrams(&h, n);
            let rg = char_ngrams(&r, n);
            let mut hyp_count = 0;
            let mut matched = 0;
            for (g, c) in &hg {
                hyp_count += c;
                if let Some(rc) = rg.get(g) {
                    matched += (*c).min(*rc);
                }
            }
            // hypothesis n-grams only count when the reference has some
            slot[0] += if rg.is_empty() { 0 } else { hyp_count };
            slot[1] += rg.values().sum::<u64>();
            slot[2] += matched;
        }
    }
    Ok(ChrfScore {
        score: f_score(&stats, beta),
        char_order,
        beta,
    })
}

fn f_score<S: Real>(stats: &[[u64; 3]], beta: S) -> S {
    let factor = beta * beta;
    let (mut avg_prec, mut avg_rec) = (S::zero(), S::zero());
    let mut effective = 0usize;
    for &[hyp, reference, matched] in stats {
        if hyp > 0 && reference > 0 {
            let m = S::from_u64(matched).expect("count fits scalar");
            avg_prec = avg_prec + m / S::from_u64(hyp).expect("count fits scalar");
            avg_rec = avg_rec + m / S::from_u64(reference).expect("count fits scalar");
            effective += 1;
        }
    }
    if effective == 0 {
        return S::zero();
    }
    avg_prec = avg_prec / S::from_count(effective);
    avg_rec = avg_rec / S::from_count(effective);
    if avg_prec + avg_rec == S::zero() {
        return S::zero();
    }
    S::lit(100.0) * (S::one() + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_is_100() {
        let h = ["abc def", "x"];
        assert_eq!(chrf_corpus::<f64, _, _>(&h, &h).unwrap().score, 100.0);
        assert_eq!(chrf_corpus::<f32, _, _>(&h, &h).unwrap().score, 100.0);
    }

    #[test]
    fn disjoint_is_zero() {
        assert_eq!(
            chrf_corpus::<f64, _, _>(&["abc"], &["xyz"]).unwrap().score,
            0.0
        );
    }

    #[test]
    fn whitespace_is_ignored() {
        let a = chrf_corpus::<f64, _, _>(&["a b c"], &["abc"])
            .unwrap()
            .score;
        assert_eq!(a, 100.0);
    }

    #[test]
    fn mismatch() {
        assert!(chrf_corpus::<f64, _, _>(&["a"], &["a", "b"]).is_err());
    }
}
