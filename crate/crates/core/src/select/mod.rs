//! Dictionary selection strategies under a per-sentence word budget.

mod stats;
mod strategies;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::freq::{FreqError, FrequencyTable};
use crate::lexicon::{DictEntry, SentenceDictionary, Upos};
use crate::num::Real;

pub use stats::{compute_pos_stats, PosStat};
pub use strategies::{
    align_budget, differ_roundtrip_select, differ_translation_select, high_freq_select, pos_select,
    random_select, slow_select,
};

#[derive(Debug, Error)]
pub enum SelectError {
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("invalid PoS tag {0:?} in strategy")]
    InvalidTag(String),
    #[error("PoS strategy needs at least one tag")]
    EmptyTagset,
    #[error("strategy {strategy} needs the {what}")]
    MissingContext {
        strategy: Strategy,
        what: &'static str,
    },
    #[error("{selections} selections but {dicts} dictionaries")]
    Misaligned { selections: usize, dicts: usize },
    #[error(transparent)]
    Freq(#[from] FreqError),
}

/// A selection function over one sentence's dictionary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    /// No dictionary at all.
    Vanilla,
    /// Every entry.
    Full,
    /// Lowest English Zipf frequency first.
    Slow,
    /// Highest English Zipf frequency first.
    HighFreq,
    /// Entries with these tags, padded or dropped to the budget.
    Pos(BTreeSet<Upos>),
    /// Source words lost in a dictionary-free round trip; also measures the budget.
    DifferRoundTrip,
    /// Reference words missing from a dictionary-free translation.
    DifferTranslation,
    /// Uniform random sample (not one of the published baselines).
    Random,
}

impl Strategy {
    pub fn pos(tags: impl IntoIterator<Item = Upos>) -> Result<Self, SelectError> {
        let set: BTreeSet<Upos> = tags.into_iter().collect();
        if set.is_empty() {
            return Err(SelectError::EmptyTagset);
        }
        Ok(Strategy::Pos(set))
    }

    /// Whether the selection size is held to the sentence budget.
    pub fn is_budgeted(&self) -> bool {
        !matches!(self, Strategy::Vanilla | Strategy::Full)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Vanilla => f.write_str("vanilla"),
            Strategy::Full => f.write_str("full"),
            Strategy::Slow => f.write_str("slow"),
            Strategy::HighFreq => f.write_str("highfreq"),
            Strategy::Pos(tags) => {
                let tags: Vec<&str> = tags.iter().map(|t| t.as_str()).collect();
                write!(f, "pos:{}", tags.join(","))
            }
            Strategy::DifferRoundTrip => f.write_str("differ-rt"),
            Strategy::DifferTranslation => f.write_str("differ-tr"),
            Strategy::Random => f.write_str("random"),
        }
    }
}

impl FromStr for Strategy {
    type Err = SelectError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(tags) = s.strip_prefix("pos:") {
            let tags = tags
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<Upos>()
                        .map_err(|_| SelectError::InvalidTag(t.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Strategy::pos(tags);
        }
        Ok(match s {
            "vanilla" => Strategy::Vanilla,
            "full" => Strategy::Full,
            "slow" => Strategy::Slow,
            "highfreq" => Strategy::HighFreq,
            "differ-rt" => Strategy::DifferRoundTrip,
            "differ-tr" => Strategy::DifferTranslation,
            "random" => Strategy::Random,
            _ => return Err(SelectError::UnknownStrategy(s.to_string())),
        })
    }
}

impl Serialize for Strategy {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetSource {
    /// Word count of the round-trip difference for the sentence.
    Measured,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub v: usize,
    pub source: BudgetSource,
}

impl Budget {
    pub fn fixed(v: usize) -> Self {
        Self {
            v,
            source: BudgetSource::Fixed(v),
        }
    }

    pub fn measured(v: usize) -> Self {
        Self {
            v,
            source: BudgetSource::Measured,
        }
    }
}

/// The entries chosen for one sentence, in prompt order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub entries: Vec<DictEntry>,
    pub strategy: Strategy,
    pub budget_used: usize,
}

impl Selection {
    pub fn new(strategy: Strategy, entries: Vec<DictEntry>) -> Self {
        Self {
            budget_used: entries.len(),
            entries,
            strategy,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// Per-sentence seed derived from a run seed (SplitMix64 finalizer).
pub fn sentence_seed(seed: u64, sentence_index: usize) -> u64 {
    let mut z = seed ^ (sentence_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything a strategy may look at for one sentence. The text fields are
/// only required by the difference-based strategies.
#[derive(Debug, Clone, Copy)]
pub struct SelectContext<'a, S: Real> {
    pub dict: &'a SentenceDictionary,
    pub table: &'a FrequencyTable<S>,
    pub v: usize,
    pub seed: u64,
    pub source: Option<&'a str>,
    pub roundtrip: Option<&'a str>,
    pub translation: Option<&'a str>,
    pub reference: Option<&'a str>,
}

impl<'a, S: Real> SelectContext<'a, S> {
    pub fn new(
        dict: &'a SentenceDictionary,
        table: &'a FrequencyTable<S>,
        v: usize,
        seed: u64,
    ) -> Self {
        Self {
            dict,
            table,
            v,
            seed,
            source: None,
            roundtrip: None,
            translation: None,
            reference: None,
        }
    }
}

/// Applies `strategy` to one sentence.
pub fn select<S: Real>(
    strategy: &Strategy,
    ctx: &SelectContext<'_, S>,
) -> Result<Selection, SelectError> {
    let missing = |what| SelectError::MissingContext {
        strategy: strategy.clone(),
        what,
    };
    Ok(match strategy {
        Strategy::Vanilla => Selection::new(Strategy::Vanilla, Vec::new()),
        Strategy::Full => Selection::new(Strategy::Full, ctx.dict.entries.clone()),
        Strategy::Slow => slow_select(ctx.dict, ctx.table, ctx.v)?,
        Strategy::HighFreq => high_freq_select(ctx.dict, ctx.table, ctx.v)?,
        Strategy::Pos(tags) => pos_select(ctx.dict, tags, ctx.v, ctx.seed),
        Strategy::Random => random_select(ctx.dict, ctx.v, ctx.seed),
        Strategy::DifferRoundTrip => differ_roundtrip_select(
            ctx.source.ok_or_else(|| missing("source sentence"))?,
            ctx.roundtrip
                .ok_or_else(|| missing("round-trip translation"))?,
            ctx.dict,
        ),
        Strategy::DifferTranslation => {
            let raw = differ_translation_select(
                ctx.translation
                    .ok_or_else(|| missing("model translation"))?,
                ctx.reference
                    .ok_or_else(|| missing("reference translation"))?,
                ctx.dict,
            );
            let entries = align_budget(raw.entries, ctx.dict, ctx.v, ctx.seed);
            Selection::new(Strategy::DifferTranslation, entries)
        }
    })
}
