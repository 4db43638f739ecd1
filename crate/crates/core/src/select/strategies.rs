use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Selection, Strategy};
use crate::freq::{FreqError, FrequencyTable};
use crate::lexicon::{DictEntry, SentenceDictionary, Upos};
use crate::num::Real;
use crate::text;

fn ranked<'d, S: Real>(
    dict: &'d SentenceDictionary,
    table: &FrequencyTable<S>,
) -> Result<Vec<(S, &'d DictEntry)>, FreqError> {
    dict.entries
        .iter()
        .map(|e| Ok((table.phrase_zipf(dict.english_side(e))?, e)))
        .collect()
}

fn take_sorted<S: Real>(
    mut scored: Vec<(S, &DictEntry)>,
    v: usize,
    strategy: Strategy,
    descending: bool,
) -> Selection {
    scored.sort_by(|a, b| {
        let by_score = a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal);
        let by_score = if descending {
            by_score.reverse()
        } else {
            by_score
        };
        by_score.then(a.1.origin_index.cmp(&b.1.origin_index))
    });
    let entries = scored.into_iter().take(v).map(|(_, e)| e.clone()).collect();
    Selection::new(strategy, entries)
}

/// The `v` entries with the lowest English Zipf score, rarest first; ties
/// go to the earlier word.
pub fn slow_select<S: Real>(
    dict: &SentenceDictionary,
    table: &FrequencyTable<S>,
    v: usize,
) -> Result<Selection, FreqError> {
    Ok(take_sorted(ranked(dict, table)?, v, Strategy::Slow, false))
}

/// The `v` most frequent entries, most frequent first.
pub fn high_freq_select<S: Real>(
    dict: &SentenceDictionary,
    table: &FrequencyTable<S>,
    v: usize,
) -> Result<Selection, FreqError> {
    Ok(take_sorted(
        ranked(dict, table)?,
        v,
        Strategy::HighFreq,
        true,
    ))
}

/// Entries whose tag is in `tags`, then padded or dropped to `v`.
pub fn pos_select(
    dict: &SentenceDictionary,
    tags: &BTreeSet<Upos>,
    v: usize,
    seed: u64,
) -> Selection {
    let filtered = dict
        .entries
        .iter()
        .filter(|e| tags.contains(&e.pos))
        .cloned()
        .collect();
    Selection::new(
        Strategy::Pos(tags.clone()),
        align_budget(filtered, dict, v, seed),
    )
}

/// `v` entries drawn uniformly (seeded), in sentence order.
pub fn random_select(dict: &SentenceDictionary, v: usize, seed: u64) -> Selection {
    Selection::new(Strategy::Random, align_budget(Vec::new(), dict, v, seed))
}

/// Entries whose surface occurs in the source sentence but not in its
/// round-trip translation. The count is the sentence's measured budget.
pub fn differ_roundtrip_select(
    source: &str,
    roundtrip: &str,
    dict: &SentenceDictionary,
) -> Selection {
    let src = text::token_set(source);
    let back = text::token_set(roundtrip);
    let entries = dict
        .entries
        .iter()
        .filter(|e| text::phrase_in(&e.surface, &src) && !text::phrase_in(&e.surface, &back))
        .cloned()
        .collect();
    Selection::new(Strategy::DifferRoundTrip, entries)
}

/// Entries whose rendering occurs in the reference but not in the model's
/// translation. Not budget-aligned.
pub fn differ_translation_select(
    translation: &str,
    reference: &str,
    dict: &SentenceDictionary,
) -> Selection {
    let hyp = text::token_set(translation);
    let reference = text::token_set(reference);
    let entries = dict
        .entries
        .iter()
        .filter(|e| text::phrase_in(&e.gloss, &reference) && !text::phrase_in(&e.gloss, &hyp))
        .cloned()
        .collect();
    Selection::new(Strategy::DifferTranslation, entries)
}

/// Brings `selected` (a subset of `dict`) to exactly `min(v, |dict|)`
/// entries: random drops when too many, random pads from the unselected
/// entries when too few. Result is in sentence order.
pub fn align_budget(
    selected: Vec<DictEntry>,
    dict: &SentenceDictionary,
    v: usize,
    seed: u64,
) -> Vec<DictEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = if selected.len() > v {
        let mut keep = index::sample(&mut rng, selected.len(), v).into_vec();
        keep.sort_unstable();
        keep.into_iter().map(|i| selected[i].clone()).collect()
    } else {
        let target = v.min(dict.len());
        let taken: HashSet<usize> = selected.iter().map(|e| e.origin_index).collect();
        let rest: Vec<&DictEntry> = dict
            .entries
            .iter()
            .filter(|e| !taken.contains(&e.origin_index))
            .collect();
        let need = target.saturating_sub(selected.len()).min(rest.len());
        let mut out = selected;
        out.extend(
            index::sample(&mut rng, rest.len(), need)
                .into_iter()
                .map(|i| rest[i].clone()),
        );
        out
    };
    out.sort_by_key(|e| e.origin_index);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::LanguagePair;

    fn pair() -> LanguagePair {
        "zsm_Latn:eng_Latn".parse().unwrap()
    }

    fn dict_of(items: &[(&str, &str, Upos)]) -> SentenceDictionary {
        let entries = items
            .iter()
            .enumerate()
            .map(|(i, (s, g, p))| DictEntry {
                surface: s.to_string(),
                gloss: g.to_string(),
                pivot: None,
                pos: *p,
                origin_index: i,
            })
            .collect();
        SentenceDictionary::new(pair(), 0, entries).unwrap()
    }

    fn glosses(sel: &Selection) -> Vec<&str> {
        sel.entries.iter().map(|e| e.gloss.as_str()).collect()
    }

    fn abc() -> (SentenceDictionary, FrequencyTable<f64>) {
        let d = dict_of(&[
            ("x", "a", Upos::Noun),
            ("y", "b", Upos::Verb),
            ("z", "c", Upos::Noun),
        ]);
        let t = FrequencyTable::from_pairs([("a", 5.1), ("b", 2.3), ("c", 3.7)]).unwrap();
        (d, t)
    }

    #[test]
    fn slow_takes_rarest() {
        let (d, t) = abc();
        assert_eq!(glosses(&slow_select(&d, &t, 2).unwrap()), ["b", "c"]);
        assert!(slow_select(&d, &t, 0).unwrap().is_empty());
        assert_eq!(glosses(&slow_select(&d, &t, 10).unwrap()), ["b", "c", "a"]);
    }

    #[test]
    fn high_freq_takes_commonest() {
        let (d, t) = abc();
        assert_eq!(glosses(&high_freq_select(&d, &t, 2).unwrap()), ["a", "c"]);
        assert!(high_freq_select(&d, &t, 0).unwrap().is_empty());
        let all = slow_select(&d, &t, 3).unwrap();
        let mut slow = glosses(&all);
        slow.reverse();
        assert_eq!(glosses(&high_freq_select(&d, &t, 3).unwrap()), slow);
    }

    #[test]
    fn ties_break_by_origin() {
        let d = dict_of(&[
            ("x", "p", Upos::X),
            ("y", "q", Upos::X),
            ("z", "r", Upos::X),
        ]);
        let t = FrequencyTable::<f64>::default();
        assert_eq!(glosses(&slow_select(&d, &t, 2).unwrap()), ["p", "q"]);
        assert_eq!(glosses(&high_freq_select(&d, &t, 2).unwrap()), ["p", "q"]);
    }

    #[test]
    fn pos_filter_and_padding() {
        let d = dict_of(&[
            ("a", "a", Upos::Noun),
            ("b", "b", Upos::Verb),
            ("c", "c", Upos::Noun),
            ("d", "d", Upos::Adj),
        ]);
        let nouns: BTreeSet<_> = [Upos::Noun].into();
        assert_eq!(glosses(&pos_select(&d, &nouns, 2, 1)), ["a", "c"]);
        let intj: BTreeSet<_> = [Upos::Intj].into();
        let padded = pos_select(&d, &intj, 2, 1);
        assert_eq!(padded.len(), 2);
        assert!(padded.entries.iter().all(|e| e.pos != Upos::Intj));
        assert_eq!(pos_select(&d, &intj, 2, 1), padded);
    }

    #[test]
    fn round_trip_difference() {
        let d = dict_of(&[
            ("a", "A", Upos::X),
            ("b", "B", Upos::X),
            ("c", "C", Upos::X),
        ]);
        assert!(differ_roundtrip_select("a b c", "a b c", &d).is_empty());
        let sel = differ_roundtrip_select("a b c", "a c", &d);
        assert_eq!(glosses(&sel), ["B"]);
        assert_eq!(sel.budget_used, 1);
        // case and punctuation are ignored
        assert!(differ_roundtrip_select("A, b. C!", "a B c", &d).is_empty());
        // words outside the dictionary never appear
        let sel = differ_roundtrip_select("a b c q", "", &d);
        assert_eq!(sel.len(), 3);
    }

    #[test]
    fn translation_difference() {
        let d = dict_of(&[
            ("memperkenalkan", "presented", Upos::Verb),
            ("undang", "law", Upos::Noun),
        ]);
        let sel = differ_translation_select(
            "The president introduced the new law.",
            "The president presented the new law.",
            &d,
        );
        assert_eq!(glosses(&sel), ["presented"]);
        assert!(differ_translation_select("same text", "same text", &d).is_empty());
        assert!(differ_translation_select("presented law", "presented the law", &d).is_empty());
    }

    #[test]
    fn align_budget_cases() {
        let d = dict_of(&[
            ("a", "a", Upos::X),
            ("b", "b", Upos::X),
            ("c", "c", Upos::X),
            ("d", "d", Upos::X),
            ("e", "e", Upos::X),
            ("f", "f", Upos::X),
            ("g", "g", Upos::X),
        ]);
        let five: Vec<_> = d.entries[..5].to_vec();
        assert_eq!(align_budget(five.clone(), &d, 5, 9), five);

        let dropped = align_budget(d.entries.clone(), &d, 5, 9);
        assert_eq!(dropped.len(), 5);
        assert!(dropped.iter().all(|e| d.entries.contains(e)));
        assert!(dropped
            .windows(2)
            .all(|w| w[0].origin_index < w[1].origin_index));

        let small = dict_of(&[
            ("a", "a", Upos::X),
            ("b", "b", Upos::X),
            ("c", "c", Upos::X),
            ("d", "d", Upos::X),
        ]);
        let two = small.entries[..2].to_vec();
        assert_eq!(align_budget(two, &small, 5, 9).len(), 4);
    }
}
