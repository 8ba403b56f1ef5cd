//! Executing a query library against engine clients.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use super::client::{Clock, EngineClient};
use super::library::{QueryEntry, QueryLibrary};
use super::store::{run_id, ErrorEntry, RunRecord, RunStore, StoreEntry};
use super::BenchError;
use crate::metrics::{visibility_report_with, BrandRegistry, PositionMode};

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Upper bound on concurrently executing client calls.
    pub parallelism: usize,
    pub position_mode: PositionMode,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            parallelism: 4,
            position_mode: PositionMode::Normalized,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub records: usize,
    pub errors: usize,
    pub warnings: Vec<String>,
}

impl RunSummary {
    pub fn has_warnings(&self) -> bool {
        self.errors > 0 || !self.warnings.is_empty()
    }
}

fn execute(
    client: &dyn EngineClient,
    query: &QueryEntry,
    registries: &[BrandRegistry],
    clock: &dyn Clock,
    mode: PositionMode,
) -> StoreEntry {
    let failure = |message: String| {
        StoreEntry::Error(ErrorEntry {
            timestamp: clock.now(),
            engine_id: client.engine_id().to_string(),
            query_id: query.id.clone(),
            tag: query.tag,
            message,
        })
    };
    let transcript = match client.execute(query) {
        Ok(t) => t,
        Err(e) => return failure(e.to_string()),
    };
    if transcript.engine_id != client.engine_id() {
        return failure(format!(
            "client returned engine id '{}' instead of '{}'",
            transcript.engine_id,
            client.engine_id()
        ));
    }
    let reports = match registries
        .iter()
        .map(|r| visibility_report_with(&transcript, r, mode))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(r) => r,
        Err(e) => return failure(e.to_string()),
    };
    let timestamp = transcript.captured_at;
    StoreEntry::Run(RunRecord {
        run_id: run_id(client.engine_id(), &query.id, &timestamp),
        timestamp,
        engine_id: client.engine_id().to_string(),
        query_id: query.id.clone(),
        tag: query.tag,
        transcript,
        reports,
    })
}

/// Runs every (client, query) pair and appends the outcomes to `store`.
///
/// Client calls run on up to `options.parallelism` threads; the results are
/// sorted by (engine id, query id) and written by this thread alone, so
/// identical inputs produce identical store bytes. A failing query becomes
/// an error entry and does not stop the batch.
pub fn run_benchmark(
    library: &QueryLibrary,
    clients: &[&dyn EngineClient],
    registries: &[BrandRegistry],
    store: &RunStore,
    clock: &dyn Clock,
    options: RunOptions,
) -> Result<RunSummary, BenchError> {
    if clients.is_empty() {
        return Err(BenchError::NoClients);
    }
    if registries.is_empty() {
        return Err(BenchError::NoRegistries);
    }
    let mut summary = RunSummary::default();
    if library.queries.is_empty() {
        summary.warnings.push("query library is empty; nothing to run".to_string());
        return Ok(summary);
    }

    let jobs: Vec<(&dyn EngineClient, &QueryEntry)> = clients
        .iter()
        .flat_map(|&c| library.queries.iter().map(move |q| (c, q)))
        .collect();
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(jobs.len()));
    let workers = options.parallelism.clamp(1, jobs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(client, query)) = jobs.get(i) else {
                    break;
                };
                let entry = execute(client, query, registries, clock, options.position_mode);
                results.lock().expect("result lock").push(entry);
            });
        }
    });
    let mut entries = results.into_inner().expect("result lock");
    entries.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

    store.append(&entries)?;
    for entry in &entries {
        match entry {
            StoreEntry::Run(_) => summary.records += 1,
            StoreEntry::Error(e) => {
                summary.errors += 1;
                summary
                    .warnings
                    .push(format!("{} / {}: {}", e.engine_id, e.query_id, e.message));
            }
        }
    }
    Ok(summary)
}
