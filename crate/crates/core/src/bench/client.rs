//! Engine clients and clocks.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use thiserror::Error;

use super::library::QueryEntry;
use crate::transcript::{parse_transcript_file, ResponseTranscript};

/// Source of capture timestamps. Tests inject [`FrozenClock`].
pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FrozenClock(pub DateTime<Utc>);

impl Clock for FrozenClock {
    fn now(&self) -> DateTime<Utc> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ClientError(pub String);

/// Something that answers queries with cited transcripts.
///
/// Returned transcripts must carry [`EngineClient::engine_id`] and a capture
/// timestamp.
pub trait EngineClient: Send + Sync {
    fn engine_id(&self) -> &str;
    fn execute(&self, query: &QueryEntry) -> Result<ResponseTranscript, ClientError>;
}

/// Replays `<query_id>.json` transcript files from a directory.
pub struct FixtureClient {
    engine_id: String,
    dir: PathBuf,
    clock: Arc<dyn Clock>,
}

impl FixtureClient {
    pub fn new(engine_id: impl Into<String>, dir: impl Into<PathBuf>, clock: Arc<dyn Clock>) -> Self {
        Self {
            engine_id: engine_id.into(),
            dir: dir.into(),
            clock,
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

impl EngineClient for FixtureClient {
    fn engine_id(&self) -> &str {
        &self.engine_id
    }

    fn execute(&self, query: &QueryEntry) -> Result<ResponseTranscript, ClientError> {
        let path = self.dir.join(format!("{}.json", query.id));
        let bytes = std::fs::read(&path).map_err(|e| ClientError(format!("{}: {e}", path.display())))?;
        let mut transcript = parse_transcript_file(&bytes).map_err(|e| ClientError(format!("{}: {e}", path.display())))?;
        transcript.engine_id = self.engine_id.clone();
        transcript.captured_at = self.clock.now();
        Ok(transcript)
    }
}

/// Parsed `[<id>=]fixtures:<directory>` engine option.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineSpec {
    pub id: String,
    pub dir: PathBuf,
}

impl EngineSpec {
    /// Without an explicit id the directory name is used.
    pub fn parse(spec: &str) -> Result<Self, String> {
        let (id, uri) = match spec.split_once('=') {
            Some((id, uri)) if !id.contains(':') => (Some(id.trim()), uri),
            _ => (None, spec),
        };
        let dir = uri
            .strip_prefix("fixtures:")
            .ok_or_else(|| format!("unsupported engine '{spec}': only fixtures:<directory> clients are available"))?;
        if dir.is_empty() {
            return Err(format!("engine '{spec}' names no directory"));
        }
        let dir = PathBuf::from(dir);
        let id = match id {
            Some(id) if !id.is_empty() => id.to_string(),
            Some(_) => return Err(format!("engine '{spec}' has an empty id")),
            None => dir
                .file_name()
                .and_then(|n| n.to_str())
                .filter(|n| !n.is_empty())
                .ok_or_else(|| format!("cannot derive an engine id from '{spec}'"))?
                .to_string(),
        };
        Ok(Self { id, dir })
    }

    pub fn client(&self, clock: Arc<dyn Clock>) -> FixtureClient {
        FixtureClient::new(self.id.clone(), self.dir.clone(), clock)
    }
}
