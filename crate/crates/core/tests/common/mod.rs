//! Synthetic multilingual workspace for end-to-end runs with the mock model.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const VOCAB: [(&str, f64, &str); 32] = [
    ("the", 7.7, "DET"),
    ("a", 7.4, "DET"),
    ("river", 5.0, "NOUN"),
    ("market", 5.4, "NOUN"),
    ("lantern", 3.3, "NOUN"),
    ("harbour", 3.9, "NOUN"),
    ("orchard", 3.1, "NOUN"),
    ("weaver", 2.9, "NOUN"),
    ("child", 5.5, "NOUN"),
    ("storm", 4.6, "NOUN"),
    ("bridge", 4.8, "NOUN"),
    ("saffron", 2.7, "NOUN"),
    ("quietly", 4.0, "ADV"),
    ("often", 5.6, "ADV"),
    ("carried", 4.7, "VERB"),
    ("painted", 4.2, "VERB"),
    ("repaired", 3.5, "VERB"),
    ("sold", 5.0, "VERB"),
    ("watched", 4.9, "VERB"),
    ("gathered", 4.1, "VERB"),
    ("old", 5.6, "ADJ"),
    ("narrow", 4.2, "ADJ"),
    ("golden", 4.4, "ADJ"),
    ("tired", 4.8, "ADJ"),
    ("near", 5.3, "ADP"),
    ("under", 5.5, "ADP"),
    ("with", 6.9, "ADP"),
    ("her", 6.5, "PRON"),
    ("they", 6.8, "PRON"),
    ("and", 7.5, "CCONJ"),
    ("three", 5.7, "NUM"),
    ("yesterday", 5.1, "ADV"),
];

pub const LANGS: [(&str, &str, &str); 5] = [
    ("eng_Latn", "English", ""),
    ("fra_Latn", "French", "eux"),
    ("deu_Latn", "German", "ung"),
    ("spa_Latn", "Spanish", "ado"),
    ("zsm_Latn", "Malay", "kan"),
];

/// Same word order in every language; non-English words get a suffix.
fn render(words: &[&str], suffix: &str) -> String {
    let mut s = words
        .iter()
        .map(|w| format!("{w}{suffix}"))
        .collect::<Vec<_>>()
        .join(" ");
    s.push('.');
    let mut chars = s.chars();
    let first = chars.next().unwrap().to_uppercase().collect::<String>();
    first + chars.as_str()
}

/// Writes corpus, frequency table, PoS lexicon and names under `dir`.
pub fn write_inputs(dir: &Path, sentences: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus = dir.join("corpus");
    std::fs::create_dir_all(&corpus).unwrap();
    let rows: Vec<Vec<&str>> = (0..sentences)
        .map(|_| {
            let n = rng.gen_range(5..10);
            (0..n).map(|_| VOCAB.choose(&mut rng).unwrap().0).collect()
        })
        .collect();
    let mut names = String::new();
    for (code, name, suffix) in LANGS {
        let text: String = rows.iter().map(|r| render(r, suffix) + "\n").collect();
        std::fs::write(corpus.join(format!("{code}.devtest")), text).unwrap();
        writeln!(names, "{code}\t{name}").unwrap();
    }
    std::fs::write(dir.join("names.tsv"), names).unwrap();
    let freq: String = VOCAB
        .iter()
        .map(|(w, z, _)| format!("{w}\t{z}\n"))
        .collect();
    std::fs::write(dir.join("freq.tsv"), freq).unwrap();
    let pos: String = VOCAB
        .iter()
        .map(|(w, _, t)| format!("{w}\t{t}\n"))
        .collect();
    std::fs::write(dir.join("pos.tsv"), pos).unwrap();
}

pub const STRATEGIES: &str = r#"["vanilla", "full", "differ-rt", "slow", "highfreq", "pos:NOUN,VERB", "differ-tr", "random"]"#;

/// Mock rules placed before the preset: dictionary-free prompts drop their
/// last word, so round trips lose words.
pub const DROP_LAST_WORD: &str = r#"
[[llm.mock_rules]]
pattern = '(?s)^Translate the following sentence from .+? into .+?: (.*) \S+$'
template = "The refined translation is: ${1}"
"#;

pub struct Setup<'a> {
    pub direction: &'a str,
    pub pairs: &'a [&'a str],
    pub strategies: &'a str,
    pub sample_n: usize,
    pub extra: &'a str,
    pub llm_extra: &'a str,
}

impl Default for Setup<'_> {
    fn default() -> Self {
        Self {
            direction: "XE",
            pairs: &[
                "fra_Latn:eng_Latn",
                "deu_Latn:eng_Latn",
                "spa_Latn:eng_Latn",
            ],
            strategies: STRATEGIES,
            sample_n: 5,
            extra: "",
            llm_extra: DROP_LAST_WORD,
        }
    }
}

/// Writes `experiment.toml` into `dir` (inputs must already exist) with
/// cache `cache` and output `out`, both relative to `dir`.
pub fn write_config(dir: &Path, setup: &Setup<'_>, cache: &str, out: &str) -> PathBuf {
    let pairs: Vec<String> = setup.pairs.iter().map(|p| format!("{p:?}")).collect();
    let text = format!(
        r#"direction = "{direction}"
pairs = [{pairs}]
strategies = {strategies}
sample_n = {n}
seed = 11
thresholds = [1.0, 2.0, 3.0, 5.0]
{extra}

[paths]
corpus = "corpus"
freq = "freq.tsv"
pos_lexicon = "pos.tsv"
names = "names.tsv"
cache = "{cache}"
out = "{out}"

[llm]
backend = "mock"
model_id = "mock-echo"
mock_preset = "echo-after-marker"
max_in_flight = 4
{llm}
"#,
        direction = setup.direction,
        pairs = pairs.join(", "),
        strategies = setup.strategies,
        n = setup.sample_n,
        extra = setup.extra,
        llm = setup.llm_extra,
    );
    let path = dir.join(format!("{out}.toml"));
    std::fs::write(&path, text).unwrap();
    path
}
