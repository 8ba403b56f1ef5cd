//! Token rules shared by the transcript parser and the content detectors.
//!
//! A *word* is a whitespace-delimited token that contains at least one
//! alphanumeric character. Case is preserved here; detectors fold case
//! themselves when they compare against lexicons.

/// Returns true when the token counts as a word.
pub fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric)
}

/// Whitespace-delimited tokens that satisfy [`is_word`], in order.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace().filter(|t| is_word(t))
}

/// Number of words in `text`.
pub fn word_count(text: &str) -> usize {
    words(text).count()
}

/// Strips leading and trailing non-alphanumeric characters and folds case.
///
/// `"Casino,"` and `"(casino)"` both normalize to `"casino"`. Interior
/// punctuation is kept, so `"e-wallet"` stays hyphenated.
pub fn normalize_token(token: &str) -> String {
    token
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Normalized word tokens of `text`, dropping tokens that normalize to empty.
pub fn normalized_words(text: &str) -> Vec<String> {
    words(text)
        .map(normalize_token)
        .filter(|t| !t.is_empty())
        .collect()
}

/// Collapses every whitespace run to a single space and trims the ends.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
