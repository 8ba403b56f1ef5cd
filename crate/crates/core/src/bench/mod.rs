//! Query-library benchmarking: run queries against engine clients, keep
//! every result in an append-only store, and compare time windows.

mod client;
mod library;
mod report;
mod run;
mod store;

use thiserror::Error;

use crate::metrics::MetricError;

pub use client::{ClientError, Clock, EngineClient, EngineSpec, FixtureClient, FrozenClock, SystemClock};
pub use library::{load_query_library, parse_query_library, LibraryError, QueryEntry, QueryLibrary, QueryTag};
pub use report::{benchmark_report, BenchmarkReport, BrandEngineRow, MetricDeltas, WindowMetrics, REPORT_CSV_HEADER};
pub use run::{run_benchmark, RunOptions, RunSummary};
pub use store::{
    read_runs, run_id, ErrorEntry, LineDiagnostic, RunFilter, RunRecord, RunSelection, RunStore, StoreContents,
    StoreEntry, StoreError, TimeWindow,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("at least one engine client is required")]
    NoClients,
    #[error("at least one brand registry is required")]
    NoRegistries,
    #[error("{0}")]
    Windows(String),
}
