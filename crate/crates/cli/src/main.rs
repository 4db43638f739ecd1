use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use slow_ads::corpus::load_corpus;
use slow_ads::lexicon::{
    load_dictionaries, orient_into_english, parse_dictionary_block, store_dictionaries,
    DictionaryBuilder,
};
use slow_ads::llm::{backend_from_config, BackendKind, LlmClient, LlmConfig, ResponseCache};
use slow_ads::metrics::{bleu_corpus, chrf_corpus, read_segments};
use slow_ads::prompt::build_translation_prompt;
use slow_ads::runner::{
    client_for, improvement_stats, read_report_jsonl, read_report_tsv, render_report_tsv,
    render_stats_tsv, run_experiment, write_outputs, ExperimentConfig, Metric,
};
use slow_ads::select::{select, sentence_seed, SelectContext};
use slow_ads::{
    DictEntry, FreqTable, LanguageCode, LanguageNames, LanguagePair, PosLexicon, Selection,
    SentenceDictionary, Strategy,
};

#[derive(Parser)]
#[command(
    name = "slow-ads",
    version,
    about = "Budgeted dictionary selection for LLM translation prompts"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Progress and counters on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Replaces the config seed everywhere.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replaces the config response-cache directory.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScoreMetric {
    Bleu,
    Chrf,
}

#[derive(Subcommand)]
enum Command {
    /// Parallel corpus checks.
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Zipf frequency lookups.
    #[command(subcommand)]
    Freq(FreqCmd),
    /// Builds per-sentence dictionaries for one pair with the configured model.
    BuildDict {
        #[arg(long)]
        pair: LanguagePair,
        /// Output store; defaults to the config's `dicts` path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Applies a selection strategy to stored dictionaries.
    Select(SelectArgs),
    /// Prompt rendering.
    #[command(subcommand)]
    Prompt(PromptCmd),
    /// Model connectivity and cache inspection.
    #[command(subcommand)]
    Llm(LlmCmd),
    /// Corpus BLEU or chrF of a hypothesis file against a reference file.
    Score {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, value_enum)]
        metric: ScoreMetric,
        /// Prints the full score record instead of the number.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Runs the experiment described by `--config`.
    Run {
        /// Allows the HTTP backend (paid API calls).
        #[arg(long)]
        live: bool,
    },
    /// Improvement statistics of one arm over another from a report.
    Stats {
        /// `report.tsv` or `report.jsonl`.
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = "differ-rt", value_parser = parse_strategy)]
        baseline: Strategy,
        #[arg(long, default_value = "slow", value_parser = parse_strategy)]
        candidate: Strategy,
        #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
        thresholds: Vec<f64>,
        #[arg(long, default_value = "chrf", value_parser = parse_metric)]
        metric: Metric,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Checks that every language file exists, is aligned and has no blank lines.
    Validate {
        /// Corpus directory; defaults to the config's.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Language codes; defaults to the config's pairs plus English.
        #[arg(long, value_delimiter = ',')]
        langs: Vec<LanguageCode>,
        /// Also prints the indices a seeded sample of this size would use.
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Subcommand)]
enum FreqCmd {
    /// Prints `word<TAB>zipf` for each word (phrases take their rarest token).
    Lookup {
        /// Frequency TSV; defaults to the config's.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        default_zipf: f64,
        #[arg(required = true)]
        words: Vec<String>,
    },
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    /// Dictionary store; defaults to the config's.
    #[arg(long)]
    dicts: Option<PathBuf>,
    /// Frequency TSV; defaults to the config's.
    #[arg(long)]
    freq: Option<PathBuf>,
    /// Budget per sentence.
    #[arg(long, default_value_t = 0)]
    v: usize,
    #[arg(long)]
    pair: Option<LanguagePair>,
    #[arg(long)]
    sentence: Option<usize>,
    /// Source sentence, for differ-rt.
    #[arg(long)]
    source: Option<String>,
    /// Round-trip translation, for differ-rt.
    #[arg(long)]
    roundtrip: Option<String>,
    /// Dictionary-free translation, for differ-tr.
    #[arg(long)]
    translation: Option<String>,
    /// Reference translation, for differ-tr.
    #[arg(long)]
    reference: Option<String>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
}

#[derive(Subcommand)]
enum PromptCmd {
    /// Prints the translation prompt for one sentence.
    Preview {
        #[arg(long)]
        pair: LanguagePair,
        /// Language names TSV; defaults to the config's.
        #[arg(long)]
        names: Option<PathBuf>,
        #[arg(long)]
        sentence: String,
        /// Entries as a `dictionary: word (gloss) ...` line; none gives the plain prompt.
        #[arg(long)]
        entries: Option<String>,
    },
}

#[derive(Subcommand)]
enum LlmCmd {
    /// Sends one prompt through the configured backend (bypassing the cache).
    Ping {
        #[arg(
            long,
            default_value = "Translate the following sentence from French into English: Bonjour."
        )]
        prompt: String,
        /// Allows the HTTP backend.
        #[arg(long)]
        live: bool,
    },
    /// Summarizes the response cache.
    Stats,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
        .map_err(|e: slow_ads::select::SelectError| e.to_string())
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse()
}

struct Ctx {
    global: Global,
}

impl Ctx {
    fn config(&self) -> Result<ExperimentConfig> {
        let path = self
            .global
            .config
            .as_deref()
            .context("this command needs --config")?;
        let mut config = ExperimentConfig::load(path)?;
        if let Some(seed) = self.global.seed {
            config.seed = seed;
        }
        if let Some(dir) = &self.global.cache_dir {
            config.paths.cache = Some(dir.clone());
        }
        Ok(config)
    }

    fn path_or(
        &self,
        given: Option<PathBuf>,
        from_config: impl FnOnce(ExperimentConfig) -> Option<PathBuf>,
        what: &str,
    ) -> Result<PathBuf> {
        match given {
            Some(p) => Ok(p),
            None => from_config(self.config().with_context(|| format!("no {what} given"))?)
                .with_context(|| format!("the config has no {what}")),
        }
    }

    fn info(&self, msg: impl FnOnce() -> String) {
        if self.global.verbose > 0 {
            eprintln!("{}", msg());
        }
    }
}

fn guard_live(llm: &LlmConfig, live: bool) -> Result<()> {
    if llm.backend == BackendKind::Http && !live {
        bail!("config uses the HTTP backend; pass --live to allow paid API calls");
    }
    Ok(())
}

fn client(config: &ExperimentConfig) -> Result<LlmClient> {
    Ok(client_for(config, backend_from_config(&config.llm)?)?)
}

fn corpus_validate(
    ctx: &Ctx,
    dir: Option<PathBuf>,
    langs: Vec<LanguageCode>,
    sample: Option<usize>,
) -> Result<()> {
    let (dir, langs, seed) = match (dir, langs.is_empty()) {
        (Some(d), false) => (d, langs, ctx.global.seed.unwrap_or(0)),
        (dir, _) => {
            let config = ctx.config()?;
            let l = if langs.is_empty() {
                config.languages()
            } else {
                langs
            };
            (dir.unwrap_or(config.paths.corpus.clone()), l, config.seed)
        }
    };
    let corpus = load_corpus(&dir, &langs)?;
    println!(
        "{}\t{} sentences\t{} languages",
        dir.display(),
        corpus.len(),
        langs.len()
    );
    if let Some(n) = sample {
        let s = corpus.sample(n, seed)?;
        let ids: Vec<String> = s.indices().iter().map(|i| i.to_string()).collect();
        println!("{}", ids.join(" "));
    }
    Ok(())
}

fn freq_lookup(
    ctx: &Ctx,
    table: Option<PathBuf>,
    default_zipf: f64,
    words: &[String],
) -> Result<()> {
    let path = ctx.path_or(table, |c| Some(c.paths.freq), "frequency table")?;
    let table = FreqTable::load(&path)?.with_default(default_zipf)?;
    for w in words {
        println!("{w}\t{}", table.phrase_zipf(w)?);
    }
    Ok(())
}

fn build_dict(ctx: &Ctx, pair: LanguagePair, out: Option<PathBuf>) -> Result<()> {
    let config = ctx.config()?;
    let out = out
        .or(config.paths.dicts.clone())
        .context("no --out given and the config has no dicts path")?;
    let names = LanguageNames::load(&config.paths.names)?;
    let pos = match &config.paths.pos_lexicon {
        Some(p) => PosLexicon::load(p)?,
        None => PosLexicon::default(),
    };
    let langs = [
        LanguageCode::english(),
        pair.source.clone(),
        pair.target.clone(),
    ];
    let corpus = load_corpus(&config.paths.corpus, &langs)?.sample(config.sample_n, config.seed)?;
    let client = client(&config)?;
    let built = DictionaryBuilder {
        client: &client,
        names: &names,
        pos: &pos,
    }
    .build(&pair, &corpus);
    for (idx, why) in &built.failures {
        eprintln!("sentence {idx}: {why}");
    }
    store_dictionaries(&built.dicts, &out)?;
    let c = client.counters();
    ctx.info(|| {
        format!(
            "cache hits {}, backend calls {}",
            c.cache_hits, c.backend_calls
        )
    });
    println!(
        "{}\t{} dictionaries\t{} failed",
        out.display(),
        built.dicts.len(),
        built.failures.len()
    );
    Ok(())
}

fn select_cmd(ctx: &Ctx, a: SelectArgs) -> Result<()> {
    let dicts_path = ctx.path_or(a.dicts, |c| c.paths.dicts, "dictionary store")?;
    let freq_path = ctx.path_or(a.freq, |c| Some(c.paths.freq), "frequency table")?;
    let seed = match (ctx.global.seed, &ctx.global.config) {
        (Some(s), _) => s,
        (None, Some(_)) => ctx.config()?.seed,
        (None, None) => 0,
    };
    let table = FreqTable::load(&freq_path)?;
    let dicts: Vec<SentenceDictionary> = load_dictionaries(&dicts_path)?
        .into_iter()
        .filter(|d| a.pair.as_ref().is_none_or(|p| &d.pair == p))
        .filter(|d| a.sentence.is_none_or(|s| d.sentence_index == s))
        .collect();
    if dicts.is_empty() {
        bail!("no dictionaries match in {}", dicts_path.display());
    }
    for d in &dicts {
        let mut sc = SelectContext::new(d, &table, a.v, sentence_seed(seed, d.sentence_index));
        sc.source = a.source.as_deref();
        sc.roundtrip = a.roundtrip.as_deref();
        sc.translation = a.translation.as_deref();
        sc.reference = a.reference.as_deref();
        let sel = select(&a.strategy, &sc)?;
        match a.format {
            Format::Jsonl => println!(
                "{}",
                serde_json::json!({
                    "pair": d.pair, "sentence_index": d.sentence_index, "selection": sel,
                })
            ),
            Format::Tsv => {
                let entries: Vec<String> = sel
                    .entries
                    .iter()
                    .map(|e| format!("{} ({})", e.surface, e.gloss))
                    .collect();
                println!(
                    "{}\t{}\t{}\t{}",
                    d.pair,
                    d.sentence_index,
                    sel.len(),
                    entries.join("; ")
                );
            }
        }
    }
    Ok(())
}

fn prompt_preview(
    ctx: &Ctx,
    pair: LanguagePair,
    names: Option<PathBuf>,
    sentence: &str,
    entries: Option<String>,
) -> Result<()> {
    let names_path = ctx.path_or(names, |c| Some(c.paths.names), "language names")?;
    let names = LanguageNames::load(&names_path)?;
    let selection = match entries {
        None => Selection::new(Strategy::Vanilla, Vec::new()),
        Some(line) => {
            let text = if line.trim_start().to_lowercase().starts_with("dictionary:") {
                line
            } else {
                format!("dictionary: {line}")
            };
            let entries: Vec<DictEntry> = orient_into_english(&parse_dictionary_block(&text)?);
            Selection::new(Strategy::Full, entries)
        }
    };
    println!(
        "{}",
        build_translation_prompt(
            names.name(&pair.source)?,
            names.name(&pair.target)?,
            sentence,
            &selection
        )?
    );
    Ok(())
}

fn llm_ping(ctx: &Ctx, prompt: &str, live: bool) -> Result<()> {
    let llm = match &ctx.global.config {
        Some(_) => ctx.config()?.llm,
        None => LlmConfig {
            mock_preset: Some(slow_ads::llm::ECHO_AFTER_MARKER.into()),
            ..LlmConfig::mock()
        },
    };
    guard_live(&llm, live)?;
    let backend = backend_from_config(&llm)?;
    let completion = LlmClient::new(backend, 1).complete(prompt)?;
    ctx.info(|| format!("{} attempt(s)", completion.attempts));
    println!("{}", completion.text);
    Ok(())
}

fn llm_stats(ctx: &Ctx) -> Result<()> {
    let dir = match &ctx.global.cache_dir {
        Some(d) => d.clone(),
        None => ctx
            .config()?
            .paths
            .cache
            .context("the config has no cache directory")?,
    };
    let stats = ResponseCache::open(&dir)?.stats()?;
    println!("records\t{}", stats.records);
    println!("corrupt\t{}", stats.corrupt);
    println!("bytes\t{}", stats.bytes);
    for (model, n) in &stats.per_model {
        println!("model:{model}\t{n}");
    }
    Ok(())
}

fn score(hyp: &Path, reference: &Path, metric: ScoreMetric, format: Option<Format>) -> Result<()> {
    let hyps = read_segments(hyp)?;
    let refs = read_segments(reference)?;
    match metric {
        ScoreMetric::Bleu => {
            let s = bleu_corpus::<f64, _, _>(&hyps, &refs)?;
            match format {
                Some(Format::Jsonl) => println!("{}", serde_json::to_string(&s)?),
                Some(Format::Tsv) => println!(
                    "{:?}\t{}\t{:?}\t{}\t{}",
                    s.score,
                    s.precisions.map(|p| format!("{p:?}")).join("/"),
                    s.brevity_penalty,
                    s.hyp_len,
                    s.ref_len
                ),
                None => println!("{:?}", s.score),
            }
        }
        ScoreMetric::Chrf => {
            let s = chrf_corpus::<f64, _, _>(&hyps, &refs)?;
            match format {
                Some(Format::Jsonl) => println!("{}", serde_json::to_string(&s)?),
                _ => println!("{:?}", s.score),
            }
        }
    }
    Ok(())
}

fn run(ctx: &Ctx, live: bool) -> Result<()> {
    let config = ctx.config()?;
    guard_live(&config.llm, live)?;
    let client = client(&config)?;
    let output = run_experiment(&config, &client)?;
    write_outputs(&output, &config.paths.out)?;
    for (pair, idx, why) in &output.dictionary_failures {
        eprintln!("dictionary {pair} sentence {idx}: {why}");
    }
    let c = client.counters();
    ctx.info(|| {
        format!(
            "cache hits {}, backend calls {}",
            c.cache_hits, c.backend_calls
        )
    });
    ctx.info(|| format!("outputs in {}", config.paths.out.display()));
    print!("{}", render_report_tsv(&output.report));
    Ok(())
}

fn stats(
    report: &Path,
    baseline: &Strategy,
    candidate: &Strategy,
    thresholds: &[f64],
    metric: Metric,
    format: Format,
) -> Result<()> {
    let rows = if report.extension().is_some_and(|e| e == "jsonl") {
        read_report_jsonl::<f64>(report)?
    } else {
        read_report_tsv::<f64>(report)?
    };
    let s = improvement_stats(&rows, baseline, candidate, metric, thresholds)?;
    match format {
        Format::Tsv => print!("{}", render_stats_tsv(&[s])),
        Format::Jsonl => println!("{}", serde_json::to_string(&s)?),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let ctx = Ctx { global: cli.global };
    match cli.command {
        Command::Corpus(CorpusCmd::Validate { dir, langs, sample }) => {
            corpus_validate(&ctx, dir, langs, sample)
        }
        Command::Freq(FreqCmd::Lookup {
            table,
            default_zipf,
            words,
        }) => freq_lookup(&ctx, table, default_zipf, &words),
        Command::BuildDict { pair, out } => build_dict(&ctx, pair, out),
        Command::Select(args) => select_cmd(&ctx, args),
        Command::Prompt(PromptCmd::Preview {
            pair,
            names,
            sentence,
            entries,
        }) => prompt_preview(&ctx, pair, names, &sentence, entries),
        Command::Llm(LlmCmd::Ping { prompt, live }) => llm_ping(&ctx, &prompt, live),
        Command::Llm(LlmCmd::Stats) => llm_stats(&ctx),
        Command::Score {
            hyp,
            reference,
            metric,
            format,
        } => score(&hyp, &reference, metric, format),
        Command::Run { live } => run(&ctx, live),
        Command::Stats {
            report,
            baseline,
            candidate,
            thresholds,
            metric,
            format,
        } => stats(&report, &baseline, &candidate, &thresholds, metric, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = e.to_string();
            for cause in e.chain().skip(1).map(|c| c.to_string()) {
                if !msg.contains(&cause) {
                    msg = format!("{msg}: {cause}");
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
