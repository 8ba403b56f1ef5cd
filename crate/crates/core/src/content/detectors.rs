//! Deterministic text detectors behind the strategy scores.
//!
//! Every density is "per 100 words"; every ratio is in `[0, 1]`. Detectors
//! take either raw text or pre-normalized tokens (see
//! [`crate::text::normalized_words`]).

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use regex::Regex;

use super::AnalysisError;
use crate::text;
use crate::transcript::Segmenter;

/// A case-folded, deduplicated list of terms; a term may span several words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    terms: BTreeSet<Vec<String>>,
    longest: usize,
}

impl Lexicon {
    pub fn new<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let terms: BTreeSet<Vec<String>> = terms
            .into_iter()
            .map(|t| text::normalized_words(t.as_ref()))
            .filter(|t| !t.is_empty())
            .collect();
        let longest = terms.iter().map(Vec::len).max().unwrap_or(0);
        Self { terms, longest }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = String> + '_ {
        self.terms.iter().map(|t| t.join(" "))
    }

    /// Non-overlapping matches, longest term first at each position.
    /// Returns `(hits, tokens covered)`.
    pub fn scan(&self, tokens: &[String]) -> (usize, usize) {
        let (mut hits, mut covered, mut i) = (0, 0, 0);
        while i < tokens.len() {
            let max = self.longest.min(tokens.len() - i);
            match (1..=max).rev().find(|&n| self.terms.contains(&tokens[i..i + n])) {
                Some(n) => {
                    hits += 1;
                    covered += n;
                    i += n;
                }
                None => i += 1,
            }
        }
        (hits, covered)
    }
}

fn per_hundred(count: usize, words: usize) -> f64 {
    if words == 0 {
        0.0
    } else {
        count as f64 * 100.0 / words as f64
    }
}

/// Share of tokens covered by keyword matches.
pub fn keyword_density(tokens: &[String], keywords: &Lexicon) -> f64 {
    if tokens.is_empty() {
        return 0.0;
    }
    keywords.scan(tokens).1 as f64 / tokens.len() as f64
}

/// Lexicon hits per 100 tokens.
pub fn lexicon_density(tokens: &[String], lexicon: &Lexicon) -> f64 {
    per_hundred(lexicon.scan(tokens).0, tokens.len())
}

/// Declarative-marker density minus hedge density, floored at zero.
pub fn authoritative_tone(tokens: &[String], declarative: &Lexicon, hedges: &Lexicon) -> f64 {
    (lexicon_density(tokens, declarative) - lexicon_density(tokens, hedges)).max(0.0)
}

/// Distinct tokens over total tokens.
pub fn lexical_diversity(tokens: &[String]) -> f64 {
    if tokens.is_empty() {
        return 0.0;
    }
    let distinct: HashSet<&String> = tokens.iter().collect();
    distinct.len() as f64 / tokens.len() as f64
}

fn marker_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\[\d+\]").unwrap())
}

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"(?i)\b(?:https?://|www\.)[^\s<>"\]\)]+"#).unwrap())
}

fn author_year_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // (Smith, 2024), (Smith 2024a), (Smith et al., 2024), (Smith and Jones, 2023),
    // (Gambling Commission, 2024)
    RE.get_or_init(|| {
        Regex::new(
            r"\(\p{Lu}[\p{L}'\-]+(?:\s+\p{Lu}[\p{L}'\-]+)*(?:\s+(?:and|&)\s+\p{Lu}[\p{L}'\-]+|\s+et\s+al\.)?,?\s+(?:1[6-9]|20)\d{2}[a-z]?\)",
        )
        .unwrap()
    })
}

/// Deletes `[n]` citation markers.
pub fn strip_citation_markers(text: &str) -> String {
    marker_re().replace_all(text, "").into_owned()
}

/// Bracketed markers, URLs and parenthetical author-year references.
pub fn count_references(text: &str) -> usize {
    marker_re().find_iter(text).count()
        + url_re().find_iter(text).count()
        + author_year_re().find_iter(text).count()
}

/// References per 100 words. Markers are not words here: the denominator is
/// the number of whitespace-separated tokens left after deleting them.
pub fn citation_density(text: &str) -> f64 {
    let words = strip_citation_markers(text).split_whitespace().count();
    per_hundred(count_references(text), words)
}

/// Words containing a digit, per 100 words. Expects marker-free text.
pub fn statistics_density(text: &str) -> f64 {
    let (numeric, words) = numeric_tokens(text);
    per_hundred(numeric, words)
}

/// `(words containing a digit, words)`.
pub fn numeric_tokens(text: &str) -> (usize, usize) {
    text::words(text).fold((0, 0), |(numeric, total), w| {
        let core = w.trim_matches(|c: char| !c.is_alphanumeric());
        (numeric + usize::from(core.chars().any(|c| c.is_ascii_digit())), total + 1)
    })
}

const QUOTE_OPEN: &[char] = &['"', '\u{201C}'];
const QUOTE_CLOSE: &[char] = &['"', '\u{201D}'];

/// Words inside matched double-quote pairs over all words. A quote left open
/// at the end of the text is ignored. A word counts as quoted when any of its
/// alphanumeric characters falls inside a pair.
pub fn quotation_share(text: &str) -> f64 {
    let mut regions = Vec::new();
    let mut open: Option<usize> = None;
    for (i, c) in text.char_indices() {
        match open {
            Some(start) if QUOTE_CLOSE.contains(&c) => {
                regions.push(start..i);
                open = None;
            }
            None if QUOTE_OPEN.contains(&c) => open = Some(i + c.len_utf8()),
            _ => {}
        }
    }
    let (mut quoted, mut total) = (0usize, 0usize);
    let mut offset = 0;
    for token in text.split_whitespace() {
        let start = offset + text[offset..].find(token).expect("token comes from text");
        offset = start + token.len();
        if !text::is_word(token) {
            continue;
        }
        total += 1;
        let inside = token
            .char_indices()
            .filter(|(_, c)| c.is_alphanumeric())
            .any(|(j, _)| regions.iter().any(|r| r.contains(&(start + j))));
        quoted += usize::from(inside);
    }
    if total == 0 {
        0.0
    } else {
        quoted as f64 / total as f64
    }
}

fn is_vowel(c: char) -> bool {
    matches!(
        c,
        'a' | 'e' | 'i' | 'o' | 'u' | 'y' | 'à' | 'á' | 'â' | 'ä' | 'è' | 'é' | 'ê' | 'ë' | 'ì'
            | 'í' | 'î' | 'ï' | 'ò' | 'ó' | 'ô' | 'ö' | 'ù' | 'ú' | 'û' | 'ü' | 'ý'
    )
}

/// Vowel-group syllable estimate with a silent-`e` adjustment; never below 1.
pub fn syllables(word: &str) -> usize {
    let letters: Vec<char> = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .collect();
    let mut groups = 0;
    let mut prev_vowel = false;
    for &c in &letters {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    let n = letters.len();
    if groups > 1 && letters.last() == Some(&'e') {
        let consonant_le = n >= 3 && letters[n - 2] == 'l' && !is_vowel(letters[n - 3]);
        let double_vowel_end = is_vowel(letters[n - 2]);
        if !consonant_le && !double_vowel_end {
            groups -= 1;
        }
    }
    groups.max(1)
}

pub const FLESCH_MIN: f64 = -100.0;
pub const FLESCH_MAX: f64 = 121.22;

/// Flesch Reading Ease, clamped to `[FLESCH_MIN, FLESCH_MAX]`.
pub fn readability_score(text: &str, segmenter: &Segmenter) -> Result<f64, AnalysisError> {
    let sentences = segmenter.segment(text).len();
    let words: Vec<&str> = text::words(text).collect();
    if words.is_empty() || sentences == 0 {
        return Err(AnalysisError::Undefined("readability of text with no words"));
    }
    let syllable_total: usize = words.iter().map(|w| syllables(w)).sum();
    let n = words.len() as f64;
    let score = 206.835 - 1.015 * (n / sentences as f64) - 84.6 * (syllable_total as f64 / n);
    Ok(score.clamp(FLESCH_MIN, FLESCH_MAX))
}

/// Mean sentence length and coefficient of variation (population stdev
/// over mean).
pub fn fluency_proxy(sentence_lengths: &[usize]) -> Result<(f64, f64), AnalysisError> {
    if sentence_lengths.is_empty() {
        return Err(AnalysisError::Undefined("fluency of text with no sentences"));
    }
    let n = sentence_lengths.len() as f64;
    let mean = sentence_lengths.iter().sum::<usize>() as f64 / n;
    if mean == 0.0 {
        return Ok((0.0, 0.0));
    }
    let var = sentence_lengths
        .iter()
        .map(|&l| (l as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok((mean, var.sqrt() / mean))
}
