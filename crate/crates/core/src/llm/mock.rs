use std::sync::atomic::{AtomicUsize, Ordering};

use regex::Regex;

use super::{Backend, Completion, LlmConfig, LlmError, MockRule};

/// Replies to translation prompts with the sentence they carry, marked
/// with the expected answer prefix, and to dictionary prompts with a
/// position-aligned dictionary.
pub const ECHO_AFTER_MARKER: &str = "echo-after-marker";

/// Template value that selects positional dictionary alignment.
pub const ALIGN_TEMPLATE: &str = "@align";

/// Template value that answers with capture 1 after replacing every word
/// listed in capture 2 (one `surface (gloss)` per line) by its gloss.
pub const GLOSS_TEMPLATE: &str = "@gloss";

fn apply_glosses(sentence: &str, dictionary: &str) -> String {
    let mut glosses = std::collections::HashMap::new();
    for line in dictionary.lines() {
        if let Some((surface, rest)) = line.split_once(" (") {
            let gloss = rest.strip_suffix(')').unwrap_or(rest);
            glosses
                .entry(crate::text::normalize_token(surface))
                .or_insert(gloss);
        }
    }
    let words: Vec<&str> = sentence
        .split_whitespace()
        .map(|w| {
            glosses
                .get(&crate::text::normalize_token(w))
                .copied()
                .unwrap_or(w)
        })
        .collect();
    format!("The refined translation is: {}", words.join(" "))
}

fn clean_word(w: &str) -> String {
    w.chars()
        .filter(|c| !matches!(c, '(' | ')'))
        .collect::<String>()
}

/// `dictionary:` line glossing each word of `sentence` with the English word
/// at the same position (the last one once English runs out).
fn align(english: &str, sentence: &str) -> String {
    let glosses: Vec<String> = crate::text::tokens(english)
        .into_iter()
        .map(|w| clean_word(&w))
        .filter(|w| !w.is_empty())
        .collect();
    let mut out = String::from("dictionary:");
    if glosses.is_empty() {
        return out;
    }
    for (i, word) in sentence.split_whitespace().enumerate() {
        let surface = clean_word(word.trim_matches(|c: char| crate::text::is_punctuation(c)));
        if surface.is_empty() {
            continue;
        }
        out.push_str(&format!(
            " {surface} ({})",
            glosses[i.min(glosses.len() - 1)]
        ));
    }
    out
}

fn preset(name: &str) -> Option<Vec<MockRule>> {
    let rule = |p: &str, t: &str| MockRule {
        pattern: p.to_string(),
        template: t.to_string(),
    };
    match name {
        ECHO_AFTER_MARKER => Some(vec![
            rule(
                r"(?s)\nEnglish: ([^\n]*)\n[^\n]*?: ([^\n]*)\ndictionary:$",
                ALIGN_TEMPLATE,
            ),
            rule(
                r"(?s)^Translate the following sentence from .+? to .+?\.\n(.*?)\nUse the provided dictionary.*?focus on:\n(.*)\nNote: Finally",
                GLOSS_TEMPLATE,
            ),
            rule(
                r"(?s)^Translate the following sentence from .+? into .+?: (.*)$",
                "The refined translation is: ${1}",
            ),
        ]),
        _ => None,
    }
}

/// Deterministic offline backend: the first rule whose pattern matches the
/// prompt produces the reply. A final catch-all echoes the prompt.
pub struct MockBackend {
    model_id: String,
    rules: Vec<(Regex, String)>,
    calls: AtomicUsize,
}

impl MockBackend {
    pub fn new(model_id: impl Into<String>, rules: &[MockRule]) -> Result<Self, LlmError> {
        let mut compiled = rules
            .iter()
            .map(|r| {
                Regex::new(&r.pattern)
                    .map(|re| (re, r.template.clone()))
                    .map_err(|e| LlmError::Rule {
                        pattern: r.pattern.clone(),
                        message: e.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        compiled.push((
            Regex::new(r"(?s)^(.*)$").expect("static regex"),
            "${1}".to_string(),
        ));
        Ok(Self {
            model_id: model_id.into(),
            rules: compiled,
            calls: AtomicUsize::new(0),
        })
    }

    /// Rules from `config.mock_rules`, then the named preset if any.
    pub fn from_config(config: &LlmConfig) -> Result<Self, LlmError> {
        let mut rules = config.mock_rules.clone();
        if let Some(name) = &config.mock_preset {
            rules.extend(
                preset(name)
                    .ok_or_else(|| LlmError::Config(format!("unknown mock preset {name:?}")))?,
            );
        }
        Self::new(config.model_id.clone(), &rules)
    }

    pub fn echo_after_marker(model_id: impl Into<String>) -> Self {
        Self::new(model_id, &preset(ECHO_AFTER_MARKER).expect("preset exists"))
            .expect("preset compiles")
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn respond(&self, prompt: &str) -> String {
        for (re, template) in &self.rules {
            if let Some(caps) = re.captures(prompt) {
                let cap = |i| caps.get(i).map_or("", |m| m.as_str());
                if template == ALIGN_TEMPLATE {
                    return align(cap(1), cap(2));
                }
                if template == GLOSS_TEMPLATE {
                    return apply_glosses(cap(1), cap(2));
                }
                let mut out = String::new();
                caps.expand(template, &mut out);
                return out;
            }
        }
        unreachable!("catch-all rule matches every prompt")
    }
}

impl Backend for MockBackend {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn complete(&self, prompt: &str) -> Result<Completion, LlmError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(Completion {
            text: self.respond(prompt),
            attempts: 1,
        })
    }
}
