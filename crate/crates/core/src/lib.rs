//! Budgeted bilingual dictionary selection for LLM translation prompts.
//!
//! The pipeline builds a per-sentence word-for-word dictionary with an LLM,
//! picks a subset of its entries under a word budget (lowest English Zipf
//! frequency first, or one of the baseline strategies), renders translation
//! prompts, and scores the results with corpus BLEU and chrF.
//!
//! Numeric code is generic over [`Real`]; the aliases below fix it to `f64`
//! (or `f32`) for ordinary use.

pub mod corpus;
pub mod freq;
pub mod lang;
pub mod lexicon;
pub mod llm;
pub mod metrics;
pub mod num;
pub mod prompt;
pub mod runner;
pub mod select;
pub mod text;

mod error;

pub use error::Error;
pub use num::Real;

pub use corpus::ParallelCorpus;
pub use lang::{Direction, LanguageCode, LanguageNames, LanguagePair};
pub use lexicon::{DictEntry, PosLexicon, SentenceDictionary, Upos};
pub use select::{Budget, BudgetSource, Selection, Strategy};

pub type FreqTable = freq::FrequencyTable<f64>;
pub type FreqTable32 = freq::FrequencyTable<f32>;
pub type Bleu = metrics::BleuScore<f64>;
pub type Bleu32 = metrics::BleuScore<f32>;
pub type Chrf = metrics::ChrfScore<f64>;
pub type Chrf32 = metrics::ChrfScore<f32>;
pub type SegmentScores = metrics::SegmentScores<f64>;
pub type ReportRow = runner::ReportRow<f64>;
pub type ImprovementStats = runner::ImprovementStats<f64>;
