//! Query library files.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryTag {
    Branded,
    Category,
}

impl fmt::Display for QueryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryTag::Branded => "branded",
            QueryTag::Category => "category",
        })
    }
}

impl FromStr for QueryTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "branded" => Ok(QueryTag::Branded),
            "category" => Ok(QueryTag::Category),
            other => Err(format!("unknown tag '{other}' (expected branded or category)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryEntry {
    pub id: String,
    pub text: String,
    pub tag: QueryTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryLibrary {
    pub version: String,
    pub queries: Vec<QueryEntry>,
}

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: unknown tag '{tag}' (expected branded or category)")]
    UnknownTag { line: usize, tag: String },
    #[error("line {line}: duplicate query id '{id}'")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: query id must not be empty")]
    EmptyId { line: usize },
}

impl LibraryError {
    pub fn line(&self) -> Option<usize> {
        match self {
            LibraryError::Io { .. } => None,
            LibraryError::Format { line, .. }
            | LibraryError::UnknownTag { line, .. }
            | LibraryError::DuplicateId { line, .. }
            | LibraryError::EmptyId { line } => Some(*line),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of the `n`th (zero-based) `"id": "<id>"` pair in `text`.
fn id_line(text: &str, id: &str, n: usize) -> usize {
    let quoted = serde_json::to_string(id).unwrap_or_default();
    let pattern = format!(r#""id"\s*:\s*{}"#, regex::escape(&quoted));
    Regex::new(&pattern)
        .ok()
        .and_then(|re| re.find_iter(text).nth(n).map(|m| line_of(text, m.start())))
        .unwrap_or(1)
}

pub fn parse_query_library(text: &str) -> Result<QueryLibrary, LibraryError> {
    let library: QueryLibrary = serde_json::from_str(text).map_err(|e| {
        let message = e.to_string();
        let unknown = Regex::new(r"unknown variant `([^`]*)`, expected `branded` or `category`").unwrap();
        match unknown.captures(&message) {
            Some(c) => LibraryError::UnknownTag {
                line: e.line(),
                tag: c[1].to_string(),
            },
            None => LibraryError::Format {
                line: e.line(),
                message: message.split(" at line").next().unwrap_or(&message).to_string(),
            },
        }
    })?;
    let mut seen = HashSet::new();
    let mut occurrences = std::collections::HashMap::new();
    for entry in &library.queries {
        let n = occurrences.entry(entry.id.as_str()).or_insert(0usize);
        if entry.id.trim().is_empty() {
            return Err(LibraryError::EmptyId {
                line: id_line(text, &entry.id, *n),
            });
        }
        if !seen.insert(entry.id.as_str()) {
            return Err(LibraryError::DuplicateId {
                line: id_line(text, &entry.id, *n),
                id: entry.id.clone(),
            });
        }
        *n += 1;
    }
    Ok(library)
}

pub fn load_query_library(path: &Path) -> Result<QueryLibrary, LibraryError> {
    let text = std::fs::read_to_string(path).map_err(|source| LibraryError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_query_library(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_entry_library() {
        let lib = parse_query_library(
            r#"{"version": "2026-10",
                "queries": [{"id": "q1", "text": "best uk casino", "tag": "category"},
                            {"id": "q2", "text": "examplebet review", "tag": "branded"}]}"#,
        )
        .unwrap();
        assert_eq!(lib.queries.len(), 2);
        assert_eq!(lib.queries[1].tag, QueryTag::Branded);
    }

    #[test]
    fn duplicate_id_names_id_and_line() {
        let text = "{\"version\": \"1\", \"queries\": [\n  {\"id\": \"q1\", \"text\": \"a\", \"tag\": \"branded\"},\n  {\"id\": \"q1\", \"text\": \"b\", \"tag\": \"category\"}\n]}";
        match parse_query_library(text) {
            Err(LibraryError::DuplicateId { id, line }) => {
                assert_eq!(id, "q1");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_tag_is_rejected_with_line() {
        let text = "{\"version\": \"1\", \"queries\": [\n  {\"id\": \"q1\", \"text\": \"a\", \"tag\": \"navigational\"}\n]}";
        match parse_query_library(text) {
            Err(LibraryError::UnknownTag { tag, line }) => {
                assert_eq!(tag, "navigational");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_line() {
        let err = parse_query_library("{\"version\": \"1\",\n \"queries\": [}").unwrap_err();
        assert_eq!(err.line(), Some(2));
        assert!(parse_query_library(r#"{"version": "1", "queries": [], "extra": 1}"#).is_err());
    }
}
