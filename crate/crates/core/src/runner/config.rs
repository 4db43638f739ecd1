use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Metric, RunnerError};
use crate::lang::{Direction, LanguageCode, LanguagePair};
use crate::llm::LlmConfig;
use crate::select::{BudgetSource, Strategy};

/// Input and output locations. Relative paths are resolved against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// Directory of `<code>.devtest` files.
    pub corpus: PathBuf,
    /// Per-language file names overriding `<code>.devtest`.
    #[serde(default)]
    pub corpus_files: BTreeMap<LanguageCode, String>,
    /// Prebuilt dictionary store; when absent, dictionaries are built.
    #[serde(default)]
    pub dicts: Option<PathBuf>,
    pub freq: PathBuf,
    #[serde(default)]
    pub pos_lexicon: Option<PathBuf>,
    pub names: PathBuf,
    #[serde(default)]
    pub cache: Option<PathBuf>,
    pub out: PathBuf,
    /// Directory of per-segment COMET score files.
    #[serde(default)]
    pub comet: Option<PathBuf>,
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.corpus);
        fix(&mut self.freq);
        fix(&mut self.names);
        fix(&mut self.out);
        for p in [
            &mut self.dicts,
            &mut self.pos_lexicon,
            &mut self.cache,
            &mut self.comet,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }
}

/// Which score column the improvement statistics compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricChoice {
    /// COMET when every row has it, otherwise chrF.
    #[default]
    Auto,
    Fixed(Metric),
}

impl fmt::Display for MetricChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricChoice::Auto => f.write_str("auto"),
            MetricChoice::Fixed(m) => m.fmt(f),
        }
    }
}

impl FromStr for MetricChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(MetricChoice::Auto),
            other => other.parse().map(MetricChoice::Fixed),
        }
    }
}

impl Serialize for MetricChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MetricChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

fn default_thresholds() -> Vec<f64> {
    vec![5.0, 10.0, 20.0]
}

fn default_baseline() -> Strategy {
    Strategy::DifferRoundTrip
}

fn default_candidate() -> Strategy {
    Strategy::Slow
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub direction: Direction,
    pub pairs: Vec<LanguagePair>,
    pub strategies: Vec<Strategy>,
    pub sample_n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Fixed per-sentence budget; when absent the budget is measured.
    #[serde(default)]
    pub fixed_v: Option<usize>,
    /// Zipf value for words missing from the frequency table.
    #[serde(default)]
    pub default_zipf: f64,
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
    #[serde(default = "default_baseline")]
    pub stats_baseline: Strategy,
    #[serde(default = "default_candidate")]
    pub stats_candidate: Strategy,
    #[serde(default)]
    pub stats_metric: MetricChoice,
    pub paths: Paths,
    #[serde(default)]
    pub llm: LlmConfig,
}

impl ExperimentConfig {
    /// Reads and validates a TOML config.
    pub fn load(path: &Path) -> Result<Self, RunnerError> {
        let text = std::fs::read_to_string(path).map_err(|source| RunnerError::ConfigIo {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: Self = toml::from_str(&text).map_err(|e| RunnerError::ConfigParse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.paths.resolve(&base);
        config.validate()?;
        Ok(config)
    }

    pub fn budget_source(&self) -> BudgetSource {
        match self.fixed_v {
            Some(v) => BudgetSource::Fixed(v),
            None => BudgetSource::Measured,
        }
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        let bad = |m: String| Err(RunnerError::Config(m));
        if self.pairs.is_empty() {
            return bad("no language pairs".into());
        }
        for pair in &self.pairs {
            if pair.direction() != self.direction {
                return bad(format!(
                    "pair {pair} is {}, not {}",
                    pair.direction(),
                    self.direction
                ));
            }
        }
        for (i, p) in self.pairs.iter().enumerate() {
            if self.pairs[..i].contains(p) {
                return bad(format!("pair {p} listed twice"));
            }
        }
        if self.strategies.is_empty() {
            return bad("no strategies".into());
        }
        for (i, s) in self.strategies.iter().enumerate() {
            if self.strategies[..i].contains(s) {
                return bad(format!("strategy {s} listed twice"));
            }
        }
        if self.sample_n == 0 {
            return bad("sample_n must be at least 1".into());
        }
        if !self.default_zipf.is_finite() {
            return bad("default_zipf must be finite".into());
        }
        if self.thresholds.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return bad("thresholds must be finite and non-negative".into());
        }
        self.llm.validate()?;
        Ok(())
    }

    /// Languages the corpus must provide: every pair side plus English.
    pub fn languages(&self) -> Vec<LanguageCode> {
        let mut langs = vec![LanguageCode::english()];
        for p in &self.pairs {
            for c in [&p.source, &p.target] {
                if !langs.contains(c) {
                    langs.push(c.clone());
                }
            }
        }
        langs.sort();
        langs
    }
}
