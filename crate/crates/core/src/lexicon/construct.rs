use rayon::prelude::*;

use super::{
    build_dict_prompt, parse_dictionary_block, tag_entries, DictEntry, PosLexicon,
    SentenceDictionary, Upos,
};
use crate::corpus::ParallelCorpus;
use crate::lang::{LanguageCode, LanguageNames, LanguagePair};
use crate::llm::LlmClient;
use crate::text;
use crate::Error;

fn entry(surface: &str, gloss: &str, pivot: Option<&str>, origin_index: usize) -> DictEntry {
    DictEntry {
        surface: surface.to_string(),
        gloss: gloss.to_string(),
        pivot: pivot.map(str::to_string),
        pos: Upos::X,
        origin_index,
    }
}

/// Entries for translating into English: the foreign word with its English gloss.
pub fn orient_into_english(units: &[(String, String)]) -> Vec<DictEntry> {
    units
        .iter()
        .enumerate()
        .map(|(i, (w, g))| entry(w, g, None, i))
        .collect()
}

/// Entries for translating from English: the English gloss becomes the
/// surface and the foreign word its rendering.
pub fn orient_from_english(units: &[(String, String)]) -> Vec<DictEntry> {
    units
        .iter()
        .enumerate()
        .map(|(i, (w, g))| entry(g, w, None, i))
        .collect()
}

fn first_key(gloss: &str) -> Option<String> {
    text::tokens(gloss).into_iter().next()
}

/// Joins a source-language and a target-language dictionary (both glossed
/// in English) on the first token of the English gloss, case-folded. Source
/// entries without a partner keep the English gloss as their rendering.
pub fn join_pivot(
    source_units: &[(String, String)],
    target_units: &[(String, String)],
) -> Vec<DictEntry> {
    source_units
        .iter()
        .enumerate()
        .map(|(i, (word, english))| {
            let key = first_key(english);
            let rendering = target_units
                .iter()
                .find(|(_, g)| key.is_some() && first_key(g) == key)
                .map(|(w, _)| w.as_str())
                .unwrap_or(english);
            entry(word, rendering, Some(english), i)
        })
        .collect()
}

/// Outcome of building the dictionaries of one pair: one dictionary per
/// corpus row (empty where construction failed) plus the failures.
#[derive(Debug, Default)]
pub struct Built {
    pub dicts: Vec<SentenceDictionary>,
    pub failures: Vec<(usize, String)>,
}

/// Prompts the model for word-for-word dictionaries of corpus sentences.
pub struct DictionaryBuilder<'a> {
    pub client: &'a LlmClient,
    pub names: &'a LanguageNames,
    pub pos: &'a PosLexicon,
}

impl DictionaryBuilder<'_> {
    /// `(word, English gloss)` units for `sentence`, which is in `lang` and
    /// translates `english`.
    pub fn units(
        &self,
        lang: &LanguageCode,
        english: &str,
        sentence: &str,
    ) -> Result<Vec<(String, String)>, Error> {
        let prompt = build_dict_prompt(english, sentence, self.names.name(lang)?)?;
        let response = self.client.cached_complete(&prompt)?;
        Ok(parse_dictionary_block(&response)?)
    }

    pub fn build_row(
        &self,
        pair: &LanguagePair,
        corpus: &ParallelCorpus,
        row: usize,
    ) -> Result<SentenceDictionary, Error> {
        let english = corpus.sentence(&LanguageCode::english(), row)?;
        let src = corpus.sentence(&pair.source, row)?;
        let tgt = corpus.sentence(&pair.target, row)?;
        let entries = if pair.source.is_english() {
            orient_from_english(&self.units(&pair.target, english, tgt)?)
        } else if pair.target.is_english() {
            orient_into_english(&self.units(&pair.source, english, src)?)
        } else {
            let s = self.units(&pair.source, english, src)?;
            let t = self.units(&pair.target, english, tgt)?;
            join_pivot(&s, &t)
        };
        let mut dict = SentenceDictionary::new(pair.clone(), corpus.indices()[row], entries)?;
        tag_entries(&mut dict, self.pos);
        Ok(dict)
    }

    /// Builds every row of `corpus` for `pair`; the corpus must include English.
    pub fn build(&self, pair: &LanguagePair, corpus: &ParallelCorpus) -> Built {
        let results: Vec<_> = (0..corpus.len())
            .into_par_iter()
            .map(|row| self.build_row(pair, corpus, row))
            .collect();
        let mut built = Built::default();
        for (row, r) in results.into_iter().enumerate() {
            let idx = corpus.indices()[row];
            match r {
                Ok(d) => built.dicts.push(d),
                Err(e) => {
                    built.failures.push((idx, e.to_string()));
                    built.dicts.push(SentenceDictionary {
                        pair: pair.clone(),
                        sentence_index: idx,
                        entries: Vec::new(),
                    });
                }
            }
        }
        built
    }
}
