//! Experiment orchestration: pairs × strategies, budget measurement,
//! scoring, reports and improvement statistics.

mod config;
mod experiment;
mod report;
mod stats;

use std::path::PathBuf;

use thiserror::Error;

use crate::lang::{Direction, LanguagePair};
use crate::select::Strategy;
use crate::{corpus, freq, lang, lexicon, llm, metrics, prompt, select};

pub use config::{ExperimentConfig, MetricChoice, Paths};
pub use experiment::{
    client_for, run_experiment, run_from_file, write_outputs, DictFailure, RunOutput,
};
pub use report::{
    comet_file_name, read_report_jsonl, read_report_tsv, render_report_tsv, render_stats_tsv,
    write_report_jsonl, write_report_tsv, write_stats_tsv, ReportRow, TranslationRecord,
};
pub use stats::{budget_ratio, improvement_stats, ImprovementStats, Metric};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("config file {path}: {source}")]
    ConfigIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config file {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("pair {pair} has no {strategy} row")]
    MissingStrategy {
        pair: LanguagePair,
        strategy: Strategy,
    },
    #[error("pair {pair}, strategy {strategy}: no {metric} score")]
    MissingMetric {
        pair: LanguagePair,
        strategy: Strategy,
        metric: Metric,
    },
    #[error("direction {0} has a total full dictionary size of zero")]
    ZeroDictionary(Direction),
    #[error("{path}: no dictionary for {pair} sentence {sentence_index}")]
    MissingDictionary {
        pair: LanguagePair,
        sentence_index: usize,
        path: PathBuf,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lang(#[from] lang::LangError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Freq(#[from] freq::FreqError),
    #[error(transparent)]
    Lexicon(#[from] lexicon::LexiconError),
    #[error(transparent)]
    Select(#[from] select::SelectError),
    #[error(transparent)]
    Prompt(#[from] prompt::PromptError),
    #[error(transparent)]
    Llm(#[from] llm::LlmError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> RunnerError {
    let path = path.into();
    move |source| RunnerError::Io { path, source }
}
