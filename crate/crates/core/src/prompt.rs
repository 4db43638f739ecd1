//! Translation prompts and extraction of the translation from responses.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::LanguagePair;
use crate::select::{Selection, Strategy};

pub const ANSWER_MARKER: &str = "The refined translation is:";

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("{0} language name must not be empty")]
    EmptyLanguageName(&'static str),
    #[error("empty model response")]
    EmptyResponse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub text: String,
    pub pair: LanguagePair,
    pub sentence_index: usize,
    pub strategy: Strategy,
    pub entry_count: usize,
}

/// Renders the prompt for one sentence. An empty selection gives the plain
/// instruction; otherwise the entries are listed one `surface (gloss)` per line.
pub fn build_translation_prompt(
    source_name: &str,
    target_name: &str,
    sentence: &str,
    selection: &Selection,
) -> Result<String, PromptError> {
    let (src, tgt) = (source_name.trim(), target_name.trim());
    if src.is_empty() {
        return Err(PromptError::EmptyLanguageName("source"));
    }
    if tgt.is_empty() {
        return Err(PromptError::EmptyLanguageName("target"));
    }
    let sentence = sentence.trim();
    if selection.is_empty() {
        return Ok(format!(
            "Translate the following sentence from {src} into {tgt}: {sentence}"
        ));
    }
    let dict: Vec<String> = selection
        .entries
        .iter()
        .map(|e| format!("{} ({})", e.surface, e.gloss))
        .collect();
    Ok(format!(
        "Translate the following sentence from {src} to {tgt}.\n\
{sentence}\n\
Use the provided dictionary to clarify or improve the translation of any misaligned words.\n\
- Here are some dictionaries that you need to focus on:\n\
{dict}\n\
Note: Finally, only respond to me with the final {tgt} translation. Your output format is as follows:\n\
{ANSWER_MARKER}",
        dict = dict.join("\n"),
    ))
}

pub fn render(
    pair: &LanguagePair,
    sentence_index: usize,
    source_name: &str,
    target_name: &str,
    sentence: &str,
    selection: &Selection,
) -> Result<RenderedPrompt, PromptError> {
    Ok(RenderedPrompt {
        text: build_translation_prompt(source_name, target_name, sentence, selection)?,
        pair: pair.clone(),
        sentence_index,
        strategy: selection.strategy.clone(),
        entry_count: selection.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedResponse {
    pub text: String,
    /// False when the answer marker was missing and the whole response was used.
    pub marked: bool,
}

const QUOTES: [(char, char); 7] = [
    ('"', '"'),
    ('\'', '\''),
    ('“', '”'),
    ('‘', '’'),
    ('«', '»'),
    ('„', '“'),
    ('「', '」'),
];

fn strip_quotes(s: &str) -> &str {
    let mut chars = s.chars();
    if let (Some(first), Some(last)) = (chars.next(), chars.next_back()) {
        if QUOTES.contains(&(first, last)) {
            return s[first.len_utf8()..s.len() - last.len_utf8()].trim();
        }
    }
    s
}

/// Takes the text after the last answer marker, trimmed and unquoted.
pub fn parse_translation_response(text: &str) -> Result<ParsedResponse, PromptError> {
    if text.trim().is_empty() {
        return Err(PromptError::EmptyResponse);
    }
    Ok(match text.rfind(ANSWER_MARKER) {
        Some(at) => ParsedResponse {
            text: strip_quotes(text[at + ANSWER_MARKER.len()..].trim()).to_string(),
            marked: true,
        },
        None => ParsedResponse {
            text: strip_quotes(text.trim()).to_string(),
            marked: false,
        },
    })
}
