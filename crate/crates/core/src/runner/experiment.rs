use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use super::report::{write_jsonl, write_text};
use super::{
    budget_ratio, comet_file_name, improvement_stats, io_err, render_report_tsv, render_stats_tsv,
    ExperimentConfig, ImprovementStats, Metric, MetricChoice, ReportRow, RunnerError,
    TranslationRecord,
};
use crate::corpus::{load_corpus_with, ParallelCorpus};
use crate::freq::FrequencyTable;
use crate::lang::{Direction, LanguageNames, LanguagePair};
use crate::lexicon::{
    load_dictionaries, store_dictionaries, DictionaryBuilder, PosLexicon, SentenceDictionary, Upos,
};
use crate::llm::{backend_from_config, cache_key, Backend, LlmClient, ResponseCache};
use crate::metrics::{bleu_corpus, chrf_corpus, ingest_segment_scores};
use crate::prompt::{build_translation_prompt, parse_translation_response, ParsedResponse};
use crate::select::{
    compute_pos_stats, differ_roundtrip_select, select, sentence_seed, PosStat, SelectContext,
    Selection, Strategy,
};

/// `(pair, sentence_index, message)` of a dictionary that could not be built.
pub type DictFailure = (LanguagePair, usize, String);

/// Everything an experiment produces, in deterministic order.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<TranslationRecord>,
    pub report: Vec<ReportRow<f64>>,
    /// Present when both the baseline and candidate arms were run.
    pub stats: Option<ImprovementStats<f64>>,
    /// Computed over the candidate arm's rows; directions whose dictionaries
    /// are all empty are left out.
    pub budget_ratio: BTreeMap<Direction, f64>,
    /// Selections of the candidate arm, by PoS tag.
    pub pos_stats: BTreeMap<Upos, PosStat<f64>>,
    pub dictionaries: Vec<SentenceDictionary>,
    pub dictionary_failures: Vec<DictFailure>,
}

/// Client for `backend` with the config's concurrency limit and cache.
pub fn client_for(
    config: &ExperimentConfig,
    backend: Arc<dyn Backend>,
) -> Result<LlmClient, RunnerError> {
    let client = LlmClient::new(backend, config.llm.max_in_flight);
    Ok(match &config.paths.cache {
        Some(dir) => client.with_cache(ResponseCache::open(dir)?),
        None => client,
    })
}

/// Loads `path`, runs it against the configured backend and writes the outputs.
pub fn run_from_file(path: &Path) -> Result<RunOutput, RunnerError> {
    let config = ExperimentConfig::load(path)?;
    let client = client_for(&config, backend_from_config(&config.llm)?)?;
    let output = run_experiment(&config, &client)?;
    write_outputs(&output, &config.paths.out)?;
    Ok(output)
}

struct Attempt {
    prompt: String,
    result: Result<ParsedResponse, String>,
}

struct Passes {
    forward: Attempt,
    back: Option<Attempt>,
    budget: Result<usize, String>,
}

struct Arm {
    record: TranslationRecord,
    selection: Selection,
}

struct Shared<'a> {
    config: &'a ExperimentConfig,
    client: &'a LlmClient,
    table: &'a FrequencyTable<f64>,
    pair: &'a LanguagePair,
    src_name: &'a str,
    tgt_name: &'a str,
    sources: &'a [String],
    references: &'a [String],
    dicts: &'a [SentenceDictionary],
}

fn translate(client: &LlmClient, prompt: String) -> Attempt {
    let result = client
        .cached_complete(&prompt)
        .map_err(|e| e.to_string())
        .and_then(|text| parse_translation_response(&text).map_err(|e| e.to_string()));
    Attempt { prompt, result }
}

fn ok_text(a: &Attempt) -> Option<&str> {
    a.result.as_ref().ok().map(|p| p.text.as_str())
}

fn plain(strategy: Strategy) -> Selection {
    Selection::new(strategy, Vec::new())
}

impl Shared<'_> {
    fn passes(&self, row: usize) -> Result<Passes, RunnerError> {
        let src = &self.sources[row];
        let prompt =
            build_translation_prompt(self.src_name, self.tgt_name, src, &plain(Strategy::Vanilla))?;
        let forward = translate(self.client, prompt);
        let measured = self.config.fixed_v.is_none();
        let back = match &forward.result {
            Ok(fwd) if measured || self.config.strategies.contains(&Strategy::DifferRoundTrip) => {
                let prompt = build_translation_prompt(
                    self.tgt_name,
                    self.src_name,
                    &fwd.text,
                    &plain(Strategy::Vanilla),
                )?;
                Some(translate(self.client, prompt))
            }
            _ => None,
        };
        let budget = match (self.config.fixed_v, &back) {
            (Some(v), _) => Ok(v),
            (None, Some(Attempt { result: Ok(rt), .. })) => {
                Ok(differ_roundtrip_select(src, &rt.text, &self.dicts[row]).len())
            }
            (None, Some(Attempt { result: Err(e), .. })) => {
                Err(format!("back translation failed: {e}"))
            }
            (None, None) => Err("forward translation failed; budget unavailable".to_string()),
        };
        Ok(Passes {
            forward,
            back,
            budget,
        })
    }

    fn arm(&self, strategy: &Strategy, row: usize, passes: &Passes) -> Result<Arm, RunnerError> {
        let dict = &self.dicts[row];
        let model = self.client.model_id();
        let mut record = TranslationRecord {
            pair: self.pair.clone(),
            strategy: strategy.clone(),
            sentence_index: dict.sentence_index,
            v: 0,
            budget: None,
            prompt_hash: String::new(),
            translation: None,
            unmarked: false,
            error: None,
        };
        let fill = |record: &mut TranslationRecord, attempt: &Attempt| {
            record.prompt_hash = cache_key(model, &attempt.prompt);
            match &attempt.result {
                Ok(p) => {
                    record.translation = Some(p.text.clone());
                    record.unmarked = !p.marked;
                }
                Err(e) => record.error = Some(e.clone()),
            }
        };
        let v = if strategy.is_budgeted() {
            match &passes.budget {
                Ok(v) => *v,
                Err(e) => {
                    record.error = Some(e.clone());
                    return Ok(Arm {
                        record,
                        selection: plain(strategy.clone()),
                    });
                }
            }
        } else {
            dict.len()
        };
        if strategy.is_budgeted() {
            record.budget = Some(v);
        }
        let mut ctx = SelectContext::new(
            dict,
            self.table,
            v,
            sentence_seed(self.config.seed, dict.sentence_index),
        );
        ctx.source = Some(&self.sources[row]);
        ctx.roundtrip = passes.back.as_ref().and_then(ok_text);
        ctx.translation = ok_text(&passes.forward);
        ctx.reference = Some(&self.references[row]);
        let selection = match select(strategy, &ctx) {
            Ok(s) => s,
            Err(e) => {
                record.error = Some(e.to_string());
                return Ok(Arm {
                    record,
                    selection: plain(strategy.clone()),
                });
            }
        };
        record.v = selection.len();
        if selection.is_empty() {
            // Same prompt as the forward pass, so reuse its outcome.
            fill(&mut record, &passes.forward);
        } else {
            let prompt = build_translation_prompt(
                self.src_name,
                self.tgt_name,
                &self.sources[row],
                &selection,
            )?;
            fill(&mut record, &translate(self.client, prompt));
        }
        Ok(Arm { record, selection })
    }

    fn score(&self, strategy: &Strategy, arms: &[Arm]) -> Result<ReportRow<f64>, RunnerError> {
        let n = arms.len();
        let failed = arms
            .iter()
            .filter(|a| a.record.translation.is_none())
            .count();
        let valid = failed * 20 < n;
        let mean = |total: usize| total as f64 / n as f64;
        let mut row = ReportRow {
            pair: self.pair.clone(),
            direction: self.pair.direction(),
            strategy: strategy.clone(),
            bleu: None,
            chrf: None,
            comet: None,
            mean_v: mean(arms.iter().map(|a| a.record.v).sum()),
            full_dict_size: mean(self.dicts.iter().map(SentenceDictionary::len).sum()),
            sentences: n,
            failed,
            valid,
        };
        if !valid {
            return Ok(row);
        }
        let hyps: Vec<&str> = arms
            .iter()
            .map(|a| a.record.translation.as_deref().unwrap_or(""))
            .collect();
        row.bleu = Some(bleu_corpus::<f64, _, _>(&hyps, self.references)?.score);
        row.chrf = Some(chrf_corpus::<f64, _, _>(&hyps, self.references)?.score);
        if let Some(dir) = &self.config.paths.comet {
            let path = dir.join(comet_file_name(self.pair, strategy));
            if path.is_file() {
                row.comet = ingest_segment_scores::<f64>(&path, Some(n))?.mean();
            }
        }
        Ok(row)
    }
}

fn dictionaries_for(
    config: &ExperimentConfig,
    client: &LlmClient,
    names: &LanguageNames,
    pos: &PosLexicon,
    corpus: &ParallelCorpus,
) -> Result<(Vec<Vec<SentenceDictionary>>, Vec<DictFailure>), RunnerError> {
    let mut failures = Vec::new();
    let Some(path) = &config.paths.dicts else {
        let builder = DictionaryBuilder { client, names, pos };
        let mut all = Vec::new();
        for pair in &config.pairs {
            let built = builder.build(pair, corpus);
            failures.extend(
                built
                    .failures
                    .into_iter()
                    .map(|(i, m)| (pair.clone(), i, m)),
            );
            all.push(built.dicts);
        }
        return Ok((all, failures));
    };
    let mut stored: BTreeMap<(LanguagePair, usize), SentenceDictionary> = load_dictionaries(path)?
        .into_iter()
        .map(|d| ((d.pair.clone(), d.sentence_index), d))
        .collect();
    let all = config
        .pairs
        .iter()
        .map(|pair| {
            corpus
                .indices()
                .iter()
                .map(|&idx| {
                    stored.remove(&(pair.clone(), idx)).ok_or_else(|| {
                        RunnerError::MissingDictionary {
                            pair: pair.clone(),
                            sentence_index: idx,
                            path: path.clone(),
                        }
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((all, failures))
}

/// Runs every configured arm on every pair of the sampled corpus.
pub fn run_experiment(
    config: &ExperimentConfig,
    client: &LlmClient,
) -> Result<RunOutput, RunnerError> {
    config.validate()?;
    let paths = &config.paths;
    let names = LanguageNames::load(&paths.names)?;
    let table = FrequencyTable::<f64>::load(&paths.freq)?.with_default(config.default_zipf)?;
    let pos = match &paths.pos_lexicon {
        Some(p) => PosLexicon::load(p)?,
        None => PosLexicon::default(),
    };
    let corpus = load_corpus_with(&paths.corpus, &config.languages(), &paths.corpus_files)?
        .sample(config.sample_n, config.seed)?;
    let (dicts, dictionary_failures) = dictionaries_for(config, client, &names, &pos, &corpus)?;

    let mut records = Vec::new();
    let mut report = Vec::new();
    let mut candidate_selections = Vec::new();
    let mut candidate_dicts = Vec::new();
    for (pair, pair_dicts) in config.pairs.iter().zip(&dicts) {
        let shared = Shared {
            config,
            client,
            table: &table,
            pair,
            src_name: names.name(&pair.source)?,
            tgt_name: names.name(&pair.target)?,
            sources: corpus.sentences(&pair.source)?,
            references: corpus.sentences(&pair.target)?,
            dicts: pair_dicts,
        };
        let passes = (0..corpus.len())
            .into_par_iter()
            .map(|row| shared.passes(row))
            .collect::<Result<Vec<_>, _>>()?;
        for strategy in &config.strategies {
            let arms = passes
                .par_iter()
                .enumerate()
                .map(|(row, p)| shared.arm(strategy, row, p))
                .collect::<Result<Vec<_>, _>>()?;
            report.push(shared.score(strategy, &arms)?);
            for arm in arms {
                if strategy == &config.stats_candidate {
                    candidate_selections.push(arm.selection);
                }
                records.push(arm.record);
            }
            if strategy == &config.stats_candidate {
                candidate_dicts.extend(pair_dicts.iter().cloned());
            }
        }
    }

    let has = |s: &Strategy| config.strategies.contains(s);
    let stats = if has(&config.stats_baseline) && has(&config.stats_candidate) {
        let metric = match config.stats_metric {
            MetricChoice::Fixed(m) => m,
            MetricChoice::Auto if report.iter().filter(|r| r.valid).all(|r| r.comet.is_some()) => {
                Metric::Comet
            }
            MetricChoice::Auto => Metric::Chrf,
        };
        Some(improvement_stats(
            &report,
            &config.stats_baseline,
            &config.stats_candidate,
            metric,
            &config.thresholds,
        )?)
    } else {
        None
    };
    let candidate_rows: Vec<ReportRow<f64>> = report
        .iter()
        .filter(|r| r.strategy == config.stats_candidate)
        .cloned()
        .collect();
    let mut ratio = BTreeMap::new();
    for direction in candidate_rows.iter().map(|r| r.direction) {
        let rows: Vec<_> = candidate_rows
            .iter()
            .filter(|r| r.direction == direction)
            .cloned()
            .collect();
        if let Ok(m) = budget_ratio(&rows) {
            ratio.extend(m);
        }
    }
    let pos_stats = compute_pos_stats(&candidate_selections, &candidate_dicts)?;
    Ok(RunOutput {
        records,
        report,
        stats,
        budget_ratio: ratio,
        pos_stats,
        dictionaries: dicts.into_iter().flatten().collect(),
        dictionary_failures,
    })
}

/// Writes `report.tsv`, `report.jsonl`, `records.jsonl`, `stats.tsv`,
/// `budget_ratio.tsv`, `pos_stats.tsv` and `dicts.jsonl` into `out`.
pub fn write_outputs(output: &RunOutput, out: &Path) -> Result<(), RunnerError> {
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    write_text(&render_report_tsv(&output.report), &out.join("report.tsv"))?;
    write_jsonl(&output.report, &out.join("report.jsonl"))?;
    write_jsonl(&output.records, &out.join("records.jsonl"))?;
    let stats: Vec<_> = output.stats.iter().cloned().collect();
    write_text(&render_stats_tsv(&stats), &out.join("stats.tsv"))?;
    let mut ratio = String::from("direction\tratio\n");
    for (d, r) in &output.budget_ratio {
        ratio.push_str(&format!("{d}\t{r}\n"));
    }
    write_text(&ratio, &out.join("budget_ratio.tsv"))?;
    let mut pos = String::from("tag\tselected\ttotal\tpercentage\tcoverage\n");
    for (tag, s) in &output.pos_stats {
        pos.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            tag.as_str(),
            s.selected,
            s.total,
            s.percentage,
            s.coverage
        ));
    }
    write_text(&pos, &out.join("pos_stats.tsv"))?;
    store_dictionaries(&output.dictionaries, &out.join("dicts.jsonl"))?;
    Ok(())
}
