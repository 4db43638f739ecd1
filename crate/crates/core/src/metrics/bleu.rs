use std::collections::HashMap;

use serde::Serialize;

use super::{check_lengths, is_py_whitespace, tokenize_13a, MetricsError};
use crate::num::Real;

pub const MAX_NGRAM_ORDER: usize = 4;

/// Corpus BLEU on the 0–100 scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BleuScore<S: Real> {
    pub score: S,
    pub precisions: [S; MAX_NGRAM_ORDER],
    pub brevity_penalty: S,
    pub hyp_len: usize,
    pub ref_len: usize,
}

fn ngram_counts(tokens: &[String]) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for n in 1..=MAX_NGRAM_ORDER {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

#[derive(Default)]
struct Stats {
    hyp_len: usize,
    ref_len: usize,
    correct: [u64; MAX_NGRAM_ORDER],
    total: [u64; MAX_NGRAM_ORDER],
}

fn prepare(s: &str) -> Vec<String> {
    tokenize_13a(s.trim_end_matches(is_py_whitespace))
}

/// 13a-tokenized, case-sensitive corpus BLEU with clipped n-gram counts,
/// the brevity penalty `exp(1 - r/c)` for `c < r`, and exponential
/// smoothing: the k-th zero-match order gets precision `100 / (2^k * total)`.
pub fn bleu_corpus<S: Real, H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
) -> Result<BleuScore<S>, MetricsError> {
    check_lengths(hyps.len(), refs.len())?;
    let mut st = Stats::default();
    for (h, r) in hyps.iter().zip(refs) {
        let h = prepare(h.as_ref());
        let r = prepare(r.as_ref());
        st.hyp_len += h.len();
        st.ref_len += r.len();
        let ref_counts = ngram_counts(&r);
        for (gram, count) in ngram_counts(&h) {
            let n = gram.len() - 1;
            st.total[n] += count as u64;
            if let Some(&rc) = ref_counts.get(gram) {
                st.correct[n] += count.min(rc) as u64;
            }
        }
    }
    Ok(score_from_stats(&st))
}

fn score_from_stats<S: Real>(st: &Stats) -> BleuScore<S> {
    let hundred = S::lit(100.0);
    let brevity_penalty = if st.hyp_len < st.ref_len {
        if st.hyp_len > 0 {
            (S::one() - S::from_count(st.ref_len) / S::from_count(st.hyp_len)).exp()
        } else {
            S::zero()
        }
    } else {
        S::one()
    };
    let mut precisions = [S::zero(); MAX_NGRAM_ORDER];
    let done = |score, precisions| BleuScore {
        score,
        precisions,
        brevity_penalty,
        hyp_len: st.hyp_len,
        ref_len: st.ref_len,
    };
    if st.correct.iter().all(|&c| c == 0) {
        return done(S::zero(), precisions);
    }
    let mut smooth = S::one();
    for ((p, &total), &correct) in precisions.iter_mut().zip(&st.total).zip(&st.correct) {
        if total == 0 {
            break;
        }
        let total = S::from_u64(total).expect("count fits scalar");
        *p = if correct == 0 {
            smooth = smooth + smooth;
            hundred / (smooth * total)
        } else {
            hundred * S::from_u64(correct).expect("count fits scalar") / total
        };
    }
    if precisions.iter().any(|p| *p <= S::zero()) {
        return done(S::zero(), precisions);
    }
    // geometric mean taken on the 0–1 scale so perfect matches give exactly 100
    let mean_log =
        precisions.iter().map(|p| (*p / hundred).ln()).sum::<S>() / S::from_count(MAX_NGRAM_ORDER);
    done(brevity_penalty * hundred * mean_log.exp(), precisions)
}
