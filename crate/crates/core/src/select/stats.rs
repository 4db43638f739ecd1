use std::collections::BTreeMap;

use serde::Serialize;

use super::{SelectError, Selection};
use crate::lexicon::{SentenceDictionary, Upos};
use crate::num::Real;

/// Share of the selection taken by a tag (`percentage`), and share of that
/// tag's dictionary entries that were selected (`coverage`), both in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosStat<S: Real> {
    pub selected: usize,
    pub total: usize,
    pub percentage: S,
    pub coverage: S,
}

pub fn compute_pos_stats<S: Real>(
    selections: &[Selection],
    dicts: &[SentenceDictionary],
) -> Result<BTreeMap<Upos, PosStat<S>>, SelectError> {
    if selections.len() != dicts.len() {
        return Err(SelectError::Misaligned {
            selections: selections.len(),
            dicts: dicts.len(),
        });
    }
    let mut selected: BTreeMap<Upos, usize> = BTreeMap::new();
    let mut total: BTreeMap<Upos, usize> = BTreeMap::new();
    for e in selections.iter().flat_map(|s| &s.entries) {
        *selected.entry(e.pos).or_default() += 1;
    }
    for e in dicts.iter().flat_map(|d| &d.entries) {
        *total.entry(e.pos).or_default() += 1;
    }
    let all_selected: usize = selected.values().sum();
    let hundred = S::lit(100.0);
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            S::zero()
        } else {
            hundred * S::from_count(num) / S::from_count(den)
        }
    };
    Ok(Upos::ALL
        .iter()
        .map(|&tag| {
            let s = selected.get(&tag).copied().unwrap_or(0);
            let t = total.get(&tag).copied().unwrap_or(0);
            (
                tag,
                PosStat {
                    selected: s,
                    total: t,
                    percentage: ratio(s, all_selected),
                    coverage: ratio(s, t),
                },
            )
        })
        .collect())
}
