//! Token normalization shared by frequency lookup, PoS tagging and the
//! difference-based strategies.

use std::collections::BTreeSet;

use unicode_general_category::{get_general_category, GeneralCategory};

pub fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

/// Lowercases and trims leading/trailing Unicode punctuation.
/// May return an empty string for punctuation-only input.
pub fn normalize_token(token: &str) -> String {
    token.trim_matches(is_punctuation).to_lowercase()
}

/// Normalized, non-empty whitespace tokens of `text`, in order.
pub fn tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(normalize_token)
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn token_set(text: &str) -> BTreeSet<String> {
    tokens(text).into_iter().collect()
}

/// True when `phrase` has at least one token and every token is in `set`.
pub fn phrase_in(phrase: &str, set: &BTreeSet<String>) -> bool {
    let toks = tokens(phrase);
    !toks.is_empty() && toks.iter().all(|t| set.contains(t))
}
