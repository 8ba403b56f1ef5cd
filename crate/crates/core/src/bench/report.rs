//! Competitor and trend reports over stored runs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::store::{RunRecord, TimeWindow};
use super::BenchError;
use crate::fixed;
use crate::metrics::{brand_impression, cites_brand, ownership_breakdown, BrandRegistry, MetricError, PositionMode};

/// Metrics for one brand on one engine inside one window. `None` marks a
/// metric that is undefined, for example a mean over zero citing runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowMetrics {
    pub runs: usize,
    pub citing_runs: usize,
    #[serde(serialize_with = "fixed::option::serialize")]
    pub citation_frequency: Option<f64>,
    /// Mean brand-level position-adjusted impression over citing runs.
    #[serde(serialize_with = "fixed::option::serialize")]
    pub mean_impression: Option<f64>,
    /// Owned share of all cited sources, pooled over the window's runs.
    #[serde(serialize_with = "fixed::option::serialize")]
    pub owned_share: Option<f64>,
    #[serde(serialize_with = "fixed::option::serialize")]
    pub earned_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricDeltas {
    #[serde(serialize_with = "fixed::option::serialize")]
    pub citation_frequency: Option<f64>,
    #[serde(serialize_with = "fixed::option::serialize")]
    pub mean_impression: Option<f64>,
    #[serde(serialize_with = "fixed::option::serialize")]
    pub owned_share: Option<f64>,
    #[serde(serialize_with = "fixed::option::serialize")]
    pub earned_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrandEngineRow {
    pub brand: String,
    pub engine_id: String,
    pub window_a: WindowMetrics,
    pub window_b: WindowMetrics,
    /// `window_b − window_a`, undefined when either side is.
    pub delta: MetricDeltas,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub window_a: TimeWindow,
    pub window_b: TimeWindow,
    pub position_mode: PositionMode,
    pub rows: Vec<BrandEngineRow>,
}

fn window_metrics(
    runs: &[&RunRecord],
    registry: &BrandRegistry,
    mode: PositionMode,
) -> Result<WindowMetrics, MetricError> {
    let mut citing = 0usize;
    let mut impression_sum = 0.0;
    let (mut owned, mut earned, mut cited) = (0usize, 0usize, 0usize);
    for run in runs {
        if cites_brand(&run.transcript, registry) {
            citing += 1;
            impression_sum += brand_impression(&run.transcript, registry, mode)?;
        }
        let o = ownership_breakdown(&run.transcript, registry);
        owned += o.owned_count;
        earned += o.earned_count;
        cited += o.cited_sources;
    }
    let ratio = |num: f64, den: usize| (den > 0).then(|| num / den as f64);
    Ok(WindowMetrics {
        runs: runs.len(),
        citing_runs: citing,
        citation_frequency: ratio(citing as f64, runs.len()),
        mean_impression: ratio(impression_sum, citing),
        owned_share: ratio(owned as f64, cited),
        earned_share: ratio(earned as f64, cited),
    })
}

fn delta(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(b? - a?)
}

/// Per (registry, engine) metrics in each window, plus `b − a` deltas.
/// Metrics are recomputed from the stored transcripts so reports reflect
/// the registries passed in, not those used at run time.
pub fn benchmark_report(
    runs: &[RunRecord],
    registries: &[BrandRegistry],
    window_a: TimeWindow,
    window_b: TimeWindow,
    mode: PositionMode,
) -> Result<BenchmarkReport, BenchError> {
    if runs.is_empty() {
        return Err(BenchError::Metric(MetricError::EmptyRuns));
    }
    if registries.is_empty() {
        return Err(BenchError::NoRegistries);
    }
    if window_a != window_b && window_a.overlaps(&window_b) {
        return Err(BenchError::Windows(
            "comparison windows must be disjoint or identical".to_string(),
        ));
    }
    let engines: BTreeSet<&str> = runs.iter().map(|r| r.engine_id.as_str()).collect();
    let mut rows = Vec::new();
    for registry in registries {
        for &engine in &engines {
            let select = |w: &TimeWindow| -> Vec<&RunRecord> {
                runs.iter()
                    .filter(|r| r.engine_id == engine && w.contains(&r.timestamp))
                    .collect()
            };
            let a = window_metrics(&select(&window_a), registry, mode)?;
            let b = window_metrics(&select(&window_b), registry, mode)?;
            rows.push(BrandEngineRow {
                brand: registry.brand_name().to_string(),
                engine_id: engine.to_string(),
                delta: MetricDeltas {
                    citation_frequency: delta(a.citation_frequency, b.citation_frequency),
                    mean_impression: delta(a.mean_impression, b.mean_impression),
                    owned_share: delta(a.owned_share, b.owned_share),
                    earned_share: delta(a.earned_share, b.earned_share),
                },
                window_a: a,
                window_b: b,
            });
        }
    }
    Ok(BenchmarkReport {
        window_a,
        window_b,
        position_mode: mode,
        rows,
    })
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), fixed::six_places)
}

fn signed(x: Option<f64>) -> String {
    match x {
        // Normalise -0.000000 to +0.000000.
        Some(v) if v.abs() < 5e-7 => "+0.000000".to_string(),
        Some(v) => format!("{v:+.6}"),
        None => "n/a".to_string(),
    }
}

pub const REPORT_CSV_HEADER: &str =
    "brand,engine,window,runs,citing_runs,citation_frequency,mean_impression,owned_share,earned_share";

impl BenchmarkReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            for (label, m) in [("a", &row.window_a), ("b", &row.window_b)] {
                let _ = writeln!(
                    out,
                    "{},{},{label},{},{},{},{},{},{}",
                    row.brand,
                    row.engine_id,
                    m.runs,
                    m.citing_runs,
                    cell(m.citation_frequency),
                    cell(m.mean_impression),
                    cell(m.owned_share),
                    cell(m.earned_share)
                );
            }
            let d = &row.delta;
            let _ = writeln!(
                out,
                "{},{},delta,,,{},{},{},{}",
                row.brand,
                row.engine_id,
                signed(d.citation_frequency),
                signed(d.mean_impression),
                signed(d.owned_share),
                signed(d.earned_share)
            );
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Benchmark report\n\n");
        let _ = writeln!(
            out,
            "Window A: {} to {}. Window B: {} to {}.\n",
            self.window_a.start, self.window_a.end, self.window_b.start, self.window_b.end
        );
        out.push_str("| Brand | Engine | Runs A/B | Frequency A | Frequency B | Δ frequency | Impression A | Impression B | Δ impression | Owned A | Owned B |\n");
        out.push_str("|---|---|---|---:|---:|---:|---:|---:|---:|---:|---:|\n");
        for r in &self.rows {
            let (a, b, d) = (&r.window_a, &r.window_b, &r.delta);
            let _ = writeln!(
                out,
                "| {} | {} | {}/{} | {} | {} | {} | {} | {} | {} | {} | {} |",
                r.brand,
                r.engine_id,
                a.runs,
                b.runs,
                cell(a.citation_frequency),
                cell(b.citation_frequency),
                signed(d.citation_frequency),
                cell(a.mean_impression),
                cell(b.mean_impression),
                signed(d.mean_impression),
                cell(a.owned_share),
                cell(b.owned_share)
            );
        }
        out
    }
}
