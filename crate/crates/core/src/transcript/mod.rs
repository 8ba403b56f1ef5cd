//! Generative-engine answer transcripts.
//!
//! A transcript is one answer: the query that produced it, the engine, the
//! capture time, the answer segmented into sentences, and the cited sources.
//! Two input forms are accepted: a JSON transcript file, and plain answer text
//! with a tab-separated `id<TAB>url` sidecar.

mod domain;
mod segment;

use std::collections::{BTreeSet, HashSet};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use domain::registrable_domain;
pub(crate) use domain::domain_matches;
pub use segment::{segment_sentences, Segmenter, DEFAULT_ABBREVIATIONS};

pub use crate::text::word_count;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranscriptError {
    #[error("malformed transcript at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("sources line {line}: {message}")]
    Sidecar { line: usize, message: String },
    #[error("citation [{0}] has no matching source")]
    UnknownCitation(u32),
    #[error("source id {0} is listed more than once")]
    DuplicateSource(u32),
    #[error("source id must be a positive integer, got {0}")]
    InvalidSourceId(u32),
    #[error("source {id} has a url with no host: {url:?}")]
    InvalidUrl { id: u32, url: String },
    #[error("invalid captured_at timestamp {0:?}")]
    InvalidTimestamp(String),
    #[error("sentence {0} is out of order")]
    SentenceOrder(usize),
    #[error("sentence {index} word count {stored} does not match its text ({actual})")]
    WordCount {
        index: usize,
        stored: usize,
        actual: usize,
    },
}

/// One sentence of an answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    /// Zero-based position in the answer.
    pub index: usize,
    /// Sentence text with citation markers removed.
    pub text: String,
    pub word_count: usize,
    pub cited_source_ids: BTreeSet<u32>,
}

impl SentenceSpan {
    pub fn cites(&self, source_id: u32) -> bool {
        self.cited_source_ids.contains(&source_id)
    }
}

/// A source listed by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRecord {
    pub marker_id: u32,
    pub url: String,
    /// Registrable domain of `url`, lowercased. Empty only when `url` is.
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
}

impl SourceRecord {
    pub fn new(marker_id: u32, url: &str, title: Option<String>) -> Result<Self, TranscriptError> {
        if marker_id == 0 {
            return Err(TranscriptError::InvalidSourceId(marker_id));
        }
        let url = url.trim();
        let domain = if url.is_empty() {
            String::new()
        } else {
            registrable_domain(url).ok_or_else(|| TranscriptError::InvalidUrl {
                id: marker_id,
                url: url.to_string(),
            })?
        };
        Ok(Self {
            marker_id,
            url: url.to_string(),
            domain,
            title,
        })
    }
}

/// One normalized generative-engine answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseTranscript {
    pub query: String,
    pub engine_id: String,
    pub captured_at: DateTime<Utc>,
    pub sentences: Vec<SentenceSpan>,
    pub sources: Vec<SourceRecord>,
}

/// Query, engine and timestamp for answers that arrive as plain text.
#[derive(Debug, Clone)]
pub struct TranscriptMeta {
    pub query: String,
    pub engine_id: String,
    pub captured_at: DateTime<Utc>,
}

impl ResponseTranscript {
    /// Builds a transcript from annotated answer text and its sources.
    pub fn from_parts(
        meta: TranscriptMeta,
        text: &str,
        sources: Vec<SourceRecord>,
        segmenter: &Segmenter,
    ) -> Result<Self, TranscriptError> {
        let transcript = Self {
            query: meta.query,
            engine_id: meta.engine_id,
            captured_at: meta.captured_at,
            sentences: segmenter.segment(text),
            sources,
        };
        transcript.validate()?;
        Ok(transcript)
    }

    pub fn total_word_count(&self) -> usize {
        self.sentences.iter().map(|s| s.word_count).sum()
    }

    pub fn source(&self, marker_id: u32) -> Option<&SourceRecord> {
        self.sources.iter().find(|s| s.marker_id == marker_id)
    }

    /// Sources cited by at least one sentence, in source-list order.
    pub fn cited_sources(&self) -> impl Iterator<Item = &SourceRecord> {
        let cited: BTreeSet<u32> = self
            .sentences
            .iter()
            .flat_map(|s| s.cited_source_ids.iter().copied())
            .collect();
        self.sources
            .iter()
            .filter(move |s| cited.contains(&s.marker_id))
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<(), TranscriptError> {
        let mut ids = HashSet::new();
        for source in &self.sources {
            if source.marker_id == 0 {
                return Err(TranscriptError::InvalidSourceId(0));
            }
            if !ids.insert(source.marker_id) {
                return Err(TranscriptError::DuplicateSource(source.marker_id));
            }
            if !source.url.is_empty() && source.domain.is_empty() {
                return Err(TranscriptError::InvalidUrl {
                    id: source.marker_id,
                    url: source.url.clone(),
                });
            }
        }
        for (i, sentence) in self.sentences.iter().enumerate() {
            if sentence.index != i {
                return Err(TranscriptError::SentenceOrder(i));
            }
            let actual = word_count(&sentence.text);
            if actual != sentence.word_count {
                return Err(TranscriptError::WordCount {
                    index: i,
                    stored: sentence.word_count,
                    actual,
                });
            }
            if let Some(missing) = sentence
                .cited_source_ids
                .iter()
                .find(|id| !ids.contains(*id))
            {
                return Err(TranscriptError::UnknownCitation(*missing));
            }
        }
        Ok(())
    }

    /// Renders the transcript back into the file format, with each
    /// sentence's markers placed right after it.
    pub fn to_file(&self) -> TranscriptFile {
        let text = self
            .sentences
            .iter()
            .map(|s| {
                let markers: String = s.cited_source_ids.iter().map(|id| format!("[{id}]")).collect();
                match (s.text.is_empty(), markers.is_empty()) {
                    (_, true) => s.text.clone(),
                    (true, false) => markers,
                    (false, false) => format!("{} {}", s.text, markers),
                }
            })
            .collect::<Vec<_>>()
            .join(" ");
        TranscriptFile {
            query: self.query.clone(),
            engine: self.engine_id.clone(),
            captured_at: self.captured_at.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            text,
            sources: self
                .sources
                .iter()
                .map(|s| SourceEntry {
                    id: s.marker_id,
                    url: s.url.clone(),
                    title: s.title.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("transcript file serializes")
    }
}

/// On-disk transcript file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptFile {
    pub query: String,
    pub engine: String,
    pub captured_at: String,
    pub text: String,
    pub sources: Vec<SourceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceEntry {
    pub id: u32,
    pub url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
}

fn byte_offset(input: &[u8], line: usize, column: usize) -> usize {
    let line_start: usize = input
        .split_inclusive(|b| *b == b'\n')
        .take(line.saturating_sub(1))
        .map(<[u8]>::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(input.len())
}

pub fn parse_timestamp(raw: &str) -> Result<DateTime<Utc>, TranscriptError> {
    DateTime::parse_from_rfc3339(raw.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|_| TranscriptError::InvalidTimestamp(raw.to_string()))
}

fn build_sources(entries: Vec<SourceEntry>) -> Result<Vec<SourceRecord>, TranscriptError> {
    let mut seen = HashSet::new();
    entries
        .into_iter()
        .map(|e| {
            if !seen.insert(e.id) {
                return Err(TranscriptError::DuplicateSource(e.id));
            }
            SourceRecord::new(e.id, &e.url, e.title)
        })
        .collect()
}

/// Parses a JSON transcript file with the default segmenter.
pub fn parse_transcript_file(bytes: &[u8]) -> Result<ResponseTranscript, TranscriptError> {
    parse_transcript_file_with(bytes, &Segmenter::default())
}

pub fn parse_transcript_file_with(
    bytes: &[u8],
    segmenter: &Segmenter,
) -> Result<ResponseTranscript, TranscriptError> {
    let file: TranscriptFile = serde_json::from_slice(bytes).map_err(|e| TranscriptError::Syntax {
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })?;
    let meta = TranscriptMeta {
        query: file.query,
        engine_id: file.engine,
        captured_at: parse_timestamp(&file.captured_at)?,
    };
    let sources = build_sources(file.sources)?;
    ResponseTranscript::from_parts(meta, &file.text, sources, segmenter)
}

/// Parses an `id<TAB>url[<TAB>title]` sidecar. Blank lines and `#` comments
/// are skipped.
pub fn parse_sources_sidecar(sidecar: &str) -> Result<Vec<SourceEntry>, TranscriptError> {
    let mut out = Vec::new();
    for (n, line) in sidecar.lines().enumerate() {
        let line_no = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.splitn(3, '\t');
        let id_field = fields.next().unwrap_or_default().trim();
        let id = id_field.parse::<u32>().map_err(|_| TranscriptError::Sidecar {
            line: line_no,
            message: format!("invalid source id {id_field:?}"),
        })?;
        let url = fields.next().ok_or_else(|| TranscriptError::Sidecar {
            line: line_no,
            message: "expected id<TAB>url".into(),
        })?;
        let title = fields
            .next()
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(String::from);
        out.push(SourceEntry {
            id,
            url: url.trim().to_string(),
            title,
        });
    }
    Ok(out)
}

/// Parses plain answer text plus its sources sidecar.
pub fn parse_plain_text(
    text: &str,
    sidecar: &str,
    meta: TranscriptMeta,
    segmenter: &Segmenter,
) -> Result<ResponseTranscript, TranscriptError> {
    let sources = build_sources(parse_sources_sidecar(sidecar)?)?;
    ResponseTranscript::from_parts(meta, text, sources, segmenter)
}
