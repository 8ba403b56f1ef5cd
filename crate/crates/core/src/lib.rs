//! Brand visibility analytics for cited generative-engine answers.
//!
//! * [`transcript`] parses answers into sentences with citation markers.
//! * [`metrics`] computes per-source impressions and owned/earned shares.
//! * [`content`] scores a document against the nine content strategies.
//! * [`entity`] scores JSON-LD structured data for entity clarity.
//! * [`bench`] runs query libraries and reports trends between windows.

pub mod bench;
pub mod config;
pub mod content;
pub mod entity;
mod fixed;
pub mod metrics;
pub mod text;
pub mod transcript;

pub use bench::{BenchmarkReport, QueryLibrary, QueryTag, RunRecord, RunStore, TimeWindow};
pub use content::{AnalyzerConfig, ContentAnalysis, Strategy, StrategyProfile};
pub use entity::{ClarityConfig, EntityClarityReport, EntityGraph, Layer, LayerScore};
pub use metrics::{BrandRegistry, Ownership, PositionMode, VisibilityReport};
pub use transcript::{ResponseTranscript, SentenceSpan, SourceRecord};
