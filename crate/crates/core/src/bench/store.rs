//! Append-only run store: one JSON document per line.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::library::QueryTag;
use crate::metrics::VisibilityReport;
use crate::transcript::ResponseTranscript;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("run store not found: {0}")]
    NotFound(PathBuf),
    #[error("run store {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// One successful engine × query execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub timestamp: DateTime<Utc>,
    pub engine_id: String,
    pub query_id: String,
    pub tag: QueryTag,
    pub transcript: ResponseTranscript,
    /// One report per brand registry, in registry order.
    pub reports: Vec<VisibilityReport>,
}

/// A failed execution, kept so gaps in a series are explainable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorEntry {
    pub timestamp: DateTime<Utc>,
    pub engine_id: String,
    pub query_id: String,
    pub tag: QueryTag,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StoreEntry {
    Run(RunRecord),
    Error(ErrorEntry),
}

impl StoreEntry {
    pub fn sort_key(&self) -> (&str, &str) {
        match self {
            StoreEntry::Run(r) => (&r.engine_id, &r.query_id),
            StoreEntry::Error(e) => (&e.engine_id, &e.query_id),
        }
    }
}

/// First 16 hex digits of SHA-256 over engine id, query id and timestamp.
pub fn run_id(engine_id: &str, query_id: &str, timestamp: &DateTime<Utc>) -> String {
    let mut hasher = Sha256::new();
    for part in [engine_id, query_id, &timestamp.to_rfc3339_opts(SecondsFormat::AutoSi, true)] {
        hasher.update(part.as_bytes());
        hasher.update([0u8]);
    }
    hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Half-open time window `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl TimeWindow {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> Result<Self, String> {
        if end < start {
            return Err(format!("window end {end} precedes start {start}"));
        }
        Ok(Self { start, end })
    }

    /// Parses `<start>..<end>` with RFC 3339 timestamps.
    pub fn parse(spec: &str) -> Result<Self, String> {
        let (a, b) = spec
            .split_once("..")
            .ok_or_else(|| format!("window '{spec}' must look like <start>..<end>"))?;
        let parse = |s: &str| {
            crate::transcript::parse_timestamp(s.trim()).map_err(|e| format!("window '{spec}': {e}"))
        };
        Self::new(parse(a)?, parse(b)?)
    }

    pub fn contains(&self, t: &DateTime<Utc>) -> bool {
        self.start <= *t && *t < self.end
    }

    pub fn overlaps(&self, other: &TimeWindow) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunFilter {
    pub engine: Option<String>,
    pub query: Option<String>,
    pub tag: Option<QueryTag>,
    pub window: Option<TimeWindow>,
}

impl RunFilter {
    pub fn matches(&self, r: &RunRecord) -> bool {
        self.engine.as_ref().is_none_or(|e| *e == r.engine_id)
            && self.query.as_ref().is_none_or(|q| *q == r.query_id)
            && self.tag.is_none_or(|t| t == r.tag)
            && self.window.is_none_or(|w| w.contains(&r.timestamp))
    }
}

/// A store line that could not be used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineDiagnostic {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StoreContents {
    pub entries: Vec<StoreEntry>,
    pub diagnostics: Vec<LineDiagnostic>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSelection {
    pub records: Vec<RunRecord>,
    pub diagnostics: Vec<LineDiagnostic>,
}

#[derive(Debug, Clone)]
pub struct RunStore {
    path: PathBuf,
}

impl RunStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn io(&self, source: io::Error) -> StoreError {
        StoreError::Io {
            path: self.path.clone(),
            source,
        }
    }

    /// Appends entries, one `write` per line, then syncs. Existing content
    /// is never touched. A torn final line left by an earlier crash is
    /// terminated first so the new records start on a fresh line.
    pub fn append(&self, entries: &[StoreEntry]) -> Result<(), StoreError> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .read(true)
            .open(&self.path)
            .map_err(|e| self.io(e))?;
        let len = file.metadata().map_err(|e| self.io(e))?.len();
        if len > 0 {
            use std::io::{Read, Seek, SeekFrom};
            let mut last = [0u8; 1];
            file.seek(SeekFrom::Start(len - 1)).map_err(|e| self.io(e))?;
            file.read_exact(&mut last).map_err(|e| self.io(e))?;
            if last[0] != b'\n' {
                file.write_all(b"\n").map_err(|e| self.io(e))?;
            }
        }
        for entry in entries {
            let mut line = serde_json::to_string(entry).map_err(|e| self.io(e.into()))?;
            line.push('\n');
            file.write_all(line.as_bytes()).map_err(|e| self.io(e))?;
        }
        file.sync_data().map_err(|e| self.io(e))
    }

    /// Every readable entry in file order. Lines that do not parse, or
    /// whose transcript breaks an invariant, are skipped with a diagnostic.
    pub fn read(&self) -> Result<StoreContents, StoreError> {
        let bytes = match std::fs::read(&self.path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::NotFound(self.path.clone())),
            Err(e) => return Err(self.io(e)),
        };
        let mut out = StoreContents::default();
        let complete = bytes.ends_with(b"\n");
        let lines: Vec<&[u8]> = bytes.split(|b| *b == b'\n').collect();
        let count = lines.len();
        for (i, raw) in lines.into_iter().enumerate() {
            let line = i + 1;
            if raw.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            let partial = i + 1 == count && !complete;
            let parsed = std::str::from_utf8(raw)
                .map_err(|e| e.to_string())
                .and_then(|s| serde_json::from_str::<StoreEntry>(s).map_err(|e| e.to_string()))
                .and_then(|entry| match &entry {
                    StoreEntry::Run(r) => r.transcript.validate().map(|_| entry).map_err(|e| e.to_string()),
                    StoreEntry::Error(_) => Ok(entry),
                });
            match parsed {
                Ok(entry) => out.entries.push(entry),
                Err(message) => out.diagnostics.push(LineDiagnostic {
                    line,
                    message: if partial {
                        format!("incomplete final line skipped: {message}")
                    } else {
                        format!("corrupt line skipped: {message}")
                    },
                }),
            }
        }
        Ok(out)
    }
}

/// Run records matching every clause of `filter`, in timestamp order
/// (file order among equal timestamps).
pub fn read_runs(store: &RunStore, filter: &RunFilter) -> Result<RunSelection, StoreError> {
    let contents = store.read()?;
    let mut records: Vec<RunRecord> = contents
        .entries
        .into_iter()
        .filter_map(|e| match e {
            StoreEntry::Run(r) if filter.matches(&r) => Some(r),
            _ => None,
        })
        .collect();
    records.sort_by_key(|r| r.timestamp);
    Ok(RunSelection {
        records,
        diagnostics: contents.diagnostics,
    })
}
