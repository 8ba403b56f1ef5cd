//! Sentence segmentation and inline citation binding.
//!
//! A sentence ends after a run of `.`, `!` or `?` (plus any closing quotes or
//! brackets) when the run is followed by whitespace and then an uppercase
//! letter, a digit or an opening quote. Citation markers of the form `[n]`
//! sitting between the terminal punctuation and the next sentence belong to
//! the sentence that just ended. A `.` that closes a known abbreviation never
//! ends a sentence.

use std::collections::BTreeSet;
use std::ops::Range;

use super::SentenceSpan;
use crate::text;

/// Abbreviations that never end a sentence.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "Ltd.", "No.", "vs.", "Mr.", "Mrs.", "Ms.", "Dr.", "Inc.", "Co.", "St.",
    "Jr.", "Sr.", "approx.", "cf.", "Fig.",
];

const TERMINALS: &[char] = &['.', '!', '?'];
const CLOSERS: &[char] = &['"', '\'', '\u{201D}', '\u{2019}', ')'];
const OPENING_QUOTES: &[char] = &['"', '\'', '\u{201C}', '\u{2018}'];
const LEADING_PUNCT: &[char] = &['(', '[', '"', '\'', '\u{201C}', '\u{2018}'];

/// Parses a citation marker starting at byte `at`, returning `(id, end)`.
pub(crate) fn marker_at(text: &str, at: usize) -> Option<(u32, usize)> {
    let bytes = text.as_bytes();
    if bytes.get(at) != Some(&b'[') {
        return None;
    }
    let digits = bytes[at + 1..]
        .iter()
        .take_while(|b| b.is_ascii_digit())
        .count();
    let close = at + 1 + digits;
    if digits == 0 || bytes.get(close) != Some(&b']') {
        return None;
    }
    let id = text[at + 1..close].parse().ok()?;
    Some((id, close + 1))
}

/// Every marker in `text` as `(id, byte range)`.
pub(crate) fn markers(text: &str) -> Vec<(u32, Range<usize>)> {
    let mut out = Vec::new();
    let mut i = 0;
    while let Some(off) = text[i..].find('[') {
        let at = i + off;
        match marker_at(text, at) {
            Some((id, end)) => {
                out.push((id, at..end));
                i = end;
            }
            None => i = at + 1,
        }
    }
    out
}

/// One segmented chunk of the raw input, markers still in place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawChunk {
    pub range: Range<usize>,
}

/// Splits annotated text into sentences and binds citation markers to them.
#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: BTreeSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Self {
            abbreviations: DEFAULT_ABBREVIATIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Segmenter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds abbreviations on top of the built-in list.
    pub fn with_abbreviations<I, S>(mut self, extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.abbreviations.extend(extra.into_iter().map(Into::into));
        self
    }

    pub fn abbreviations(&self) -> impl Iterator<Item = &str> {
        self.abbreviations.iter().map(String::as_str)
    }

    fn is_abbreviation(&self, text: &str, dot: usize) -> bool {
        let start = text[..dot]
            .rfind(char::is_whitespace)
            .map(|p| p + text[p..].chars().next().map_or(1, char::len_utf8))
            .unwrap_or(0);
        let token = text[start..=dot].trim_start_matches(LEADING_PUNCT);
        self.abbreviations.contains(token)
    }

    /// Byte ranges of the sentences in `text`; the gaps between consecutive
    /// ranges contain only whitespace.
    pub(crate) fn raw_chunks(&self, text: &str) -> Vec<RawChunk> {
        let len = text.len();
        let skip_ws = |mut at: usize| {
            while let Some(c) = text[at..].chars().next() {
                if !c.is_whitespace() {
                    break;
                }
                at += c.len_utf8();
            }
            at
        };

        let mut chunks = Vec::new();
        let mut start = skip_ws(0);
        let mut i = start;
        while i < len {
            let c = text[i..].chars().next().expect("in bounds");
            if !TERMINALS.contains(&c) {
                i += c.len_utf8();
                continue;
            }
            let mut run_end = i + c.len_utf8();
            let mut lone_dot = c == '.';
            while let Some(n) = text[run_end..].chars().next() {
                if TERMINALS.contains(&n) {
                    lone_dot = false;
                } else if !CLOSERS.contains(&n) {
                    break;
                }
                run_end += n.len_utf8();
            }

            let mut sentence_end = run_end;
            while let Some((_, end)) = marker_at(text, skip_ws(sentence_end)) {
                sentence_end = end;
            }

            let next = skip_ws(sentence_end);
            if next == len {
                break;
            }
            let starts_sentence = text[next..]
                .chars()
                .next()
                .is_some_and(|n| n.is_uppercase() || n.is_ascii_digit() || OPENING_QUOTES.contains(&n));
            let abbreviated = lone_dot && self.is_abbreviation(text, i);
            if next > sentence_end && starts_sentence && !abbreviated {
                chunks.push(RawChunk {
                    range: start..sentence_end,
                });
                start = next;
                i = next;
            } else {
                i = run_end;
            }
        }
        let tail = text[start..].trim_end();
        if !tail.is_empty() {
            chunks.push(RawChunk {
                range: start..start + tail.len(),
            });
        }
        chunks
    }

    /// Raw sentence slices of `text`, citation markers still in place.
    pub fn raw_sentences<'t>(&self, text: &'t str) -> impl Iterator<Item = &'t str> {
        self.raw_chunks(text).into_iter().map(move |c| &text[c.range])
    }

    /// Segments `text` into indexed sentences with their bound citations.
    pub fn segment(&self, text: &str) -> Vec<SentenceSpan> {
        let mut sentences: Vec<SentenceSpan> = Vec::new();
        for chunk in self.raw_chunks(text) {
            let (clean, ids) = strip_markers(&text[chunk.range]);
            if clean.is_empty() {
                match sentences.last_mut() {
                    Some(prev) => {
                        prev.cited_source_ids.extend(ids);
                        continue;
                    }
                    None if ids.is_empty() => continue,
                    None => {}
                }
            }
            sentences.push(SentenceSpan {
                index: sentences.len(),
                word_count: text::word_count(&clean),
                text: clean,
                cited_source_ids: ids,
            });
        }
        sentences
    }
}

/// Removes every marker (and the whitespace right before it) and collapses
/// whitespace, returning the clean text and the set of marker ids.
pub(crate) fn strip_markers(raw: &str) -> (String, BTreeSet<u32>) {
    let mut clean = String::with_capacity(raw.len());
    let mut ids = BTreeSet::new();
    let mut last = 0;
    for (id, range) in markers(raw) {
        clean.push_str(&raw[last..range.start]);
        let trimmed = clean.trim_end().len();
        clean.truncate(trimmed);
        ids.insert(id);
        last = range.end;
    }
    clean.push_str(&raw[last..]);
    (text::collapse_whitespace(&clean), ids)
}

/// Segments with the default abbreviation list.
pub fn segment_sentences(text: &str) -> Vec<SentenceSpan> {
    Segmenter::default().segment(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn texts(spans: &[SentenceSpan]) -> Vec<&str> {
        spans.iter().map(|s| s.text.as_str()).collect()
    }

    fn cites(spans: &[SentenceSpan]) -> Vec<Vec<u32>> {
        spans
            .iter()
            .map(|s| s.cited_source_ids.iter().copied().collect())
            .collect()
    }

    #[test]
    fn splits_on_terminal_punctuation() {
        let s = segment_sentences("A bet. Another bet? Yes!");
        assert_eq!(texts(&s), ["A bet.", "Another bet?", "Yes!"]);
        assert_eq!(s.iter().map(|s| s.index).collect::<Vec<_>>(), [0, 1, 2]);
    }

    #[test]
    fn empty_and_blank_input() {
        assert!(segment_sentences("").is_empty());
        assert!(segment_sentences("  \n\t ").is_empty());
    }

    #[test]
    fn abbreviations_suppress_split() {
        let s = segment_sentences("See e.g. the UKGC register. Done.");
        assert_eq!(texts(&s), ["See e.g. the UKGC register.", "Done."]);
        let s = segment_sentences("Owned by Acme Ltd. Since 2010 it trades.");
        assert_eq!(s.len(), 1);
        let s = segment_sentences("Licence No. 39028 is listed.");
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn user_abbreviations_extend_the_list() {
        let text = "Operated by Foo Plc. Under licence.";
        assert_eq!(segment_sentences(text).len(), 2);
        let seg = Segmenter::new().with_abbreviations(["Plc."]);
        assert_eq!(seg.segment(text).len(), 1);
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        let s = segment_sentences("Odds vs. the field are long. ok then.");
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn binds_markers_inside_and_after_sentence() {
        let s = segment_sentences(
            "Bet365 holds a UKGC licence [1]. It offers live casino [1][2]. Slots too.",
        );
        assert_eq!(
            texts(&s),
            ["Bet365 holds a UKGC licence.", "It offers live casino.", "Slots too."]
        );
        assert_eq!(cites(&s), vec![vec![1], vec![1, 2], vec![]]);
        assert_eq!(
            s.iter().map(|s| s.word_count).collect::<Vec<_>>(),
            [5, 4, 2]
        );
    }

    #[test]
    fn marker_after_period_binds_backward() {
        let s = segment_sentences("Great odds. [1]");
        assert_eq!(cites(&s), vec![vec![1]]);
        let s = segment_sentences("Great odds. [1] [3] Fast payouts.[2] Next one.");
        assert_eq!(cites(&s), vec![vec![1, 3], vec![2], vec![]]);
        assert_eq!(texts(&s), ["Great odds.", "Fast payouts.", "Next one."]);
    }

    #[test]
    fn duplicate_markers_collapse() {
        let s = segment_sentences("Safe [2] and fair [2].");
        assert_eq!(cites(&s), vec![vec![2]]);
        assert_eq!(s[0].text, "Safe and fair.");
    }

    #[test]
    fn splits_before_digits_and_quotes() {
        let s = segment_sentences("It grew. 37% more. \"Trust\" matters.");
        assert_eq!(s.len(), 3);
        let s = segment_sentences("He said \u{201C}yes.\u{201D} Then left.");
        assert_eq!(texts(&s), ["He said \u{201C}yes.\u{201D}", "Then left."]);
    }

    #[test]
    fn non_markers_are_left_alone() {
        let s = segment_sentences("Array [a] and [] stay. Done.");
        assert_eq!(s[0].text, "Array [a] and [] stay.");
        assert!(s[0].cited_source_ids.is_empty());
    }

    #[test]
    fn marker_only_text_is_one_sentence() {
        let s = segment_sentences("[1] [2]");
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].word_count, 0);
        assert_eq!(cites(&s), vec![vec![1, 2]]);
    }

    proptest! {
        #[test]
        fn chunks_cover_input_up_to_whitespace(text in "[A-Za-z0-9 .!?\\[\\]\"\n]{0,80}") {
            let seg = Segmenter::default();
            let chunks = seg.raw_chunks(&text);
            let mut cursor = 0;
            for c in &chunks {
                prop_assert!(text[cursor..c.range.start].trim().is_empty());
                prop_assert!(c.range.start < c.range.end);
                cursor = c.range.end;
            }
            prop_assert!(text[cursor..].trim().is_empty());
        }

        #[test]
        fn every_marker_binds_to_one_sentence(text in "[A-Za-z .!?\\[\\]123\n]{0,80}") {
            let spans = segment_sentences(&text);
            let raw: BTreeSet<u32> = markers(&text).into_iter().map(|(id, _)| id).collect();
            let bound: BTreeSet<u32> = spans.iter().flat_map(|s| s.cited_source_ids.iter().copied()).collect();
            prop_assert_eq!(raw, bound);
            for (i, s) in spans.iter().enumerate() {
                prop_assert_eq!(s.index, i);
                prop_assert_eq!(s.word_count, crate::text::word_count(&s.text));
            }
        }

        #[test]
        fn segmentation_is_deterministic(text in ".{0,120}") {
            prop_assert_eq!(segment_sentences(&text), segment_sentences(&text));
        }
    }
}
