//! Structured-data clarity scoring across four layers: regulatory identity,
//! corporate graph, service taxonomy and reputation signals.

mod extract;
mod graph;
mod score;

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, Section};

pub use extract::{extract_jsonld, flatten, parse_jsonld, BlockDiagnostic, Extraction};
pub use graph::{
    build_entity_graph, local_name, reference_id, Edge, EdgeTarget, EntityGraph, EntityNode, MergeConflict,
    SourceDocument,
};
pub use score::{
    composite_score, consistency_findings, licences, plausible_licence, score_layer, ChecklistItem,
    ConsistencyFinding, FindingKind, Layer, LayerScore, CHECKLIST_VERSION, FINDING_PENALTY, ORGANIZATION_TYPES,
    SERVICE_TYPES,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClarityError {
    #[error("unknown layer '{0}'")]
    UnknownLayer(String),
}

/// Vocabularies the checklists match against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClarityConfig {
    /// Registers whose sameAs links prove a licence.
    pub regulator_domains: Vec<String>,
    /// `propertyID` values that mark an identifier as a licence.
    pub licence_keys: Vec<String>,
    pub company_register_domains: Vec<String>,
    pub service_taxonomy: Vec<String>,
    pub profile_domains: Vec<String>,
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl Default for ClarityConfig {
    fn default() -> Self {
        Self {
            regulator_domains: strings(&["gamblingcommission.gov.uk"]),
            licence_keys: strings(&["UKGC"]),
            company_register_domains: strings(&[
                "company-information.service.gov.uk",
                "companieshouse.gov.uk",
                "opencorporates.com",
            ]),
            service_taxonomy: strings(&["sports betting", "live casino", "slots", "poker"]),
            profile_domains: strings(&[
                "trustpilot.com",
                "facebook.com",
                "x.com",
                "twitter.com",
                "linkedin.com",
                "instagram.com",
                "youtube.com",
                "wikipedia.org",
                "wikidata.org",
            ]),
        }
    }
}

impl ClarityConfig {
    pub const KEYS: &'static [&'static str] = &[
        "regulator_domains",
        "licence_keys",
        "company_register_domains",
        "service_taxonomy",
        "service_taxonomy_file",
        "profile_domains",
    ];

    /// Overlays the keys present in `section`. Lists replace the defaults
    /// and must not be empty.
    pub fn apply(&mut self, section: &Section<'_>) -> Result<(), ConfigError> {
        section.deny_unknown(Self::KEYS)?;
        let lists = [
            ("regulator_domains", &mut self.regulator_domains, false),
            ("licence_keys", &mut self.licence_keys, false),
            ("company_register_domains", &mut self.company_register_domains, false),
            ("service_taxonomy", &mut self.service_taxonomy, true),
            ("profile_domains", &mut self.profile_domains, false),
        ];
        for (name, slot, file_allowed) in lists {
            let value = if file_allowed {
                section.list_or_file(name)?
            } else {
                section.string_list(name)?
            };
            if let Some(list) = value {
                let list: Vec<String> = list
                    .into_iter()
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                if list.is_empty() {
                    return Err(ConfigError::new(section.key(name), "must not be empty"));
                }
                *slot = list;
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(&origin, e.to_string()))?;
        let table = crate::config::parse_table(&text, &origin)?;
        let mut cfg = Self::default();
        cfg.apply(&Section::new("", &table, path.parent()))?;
        Ok(cfg)
    }
}

/// A non-fatal problem with one input document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDiagnostic {
    pub document: String,
    pub message: String,
}

/// Reads a page or a raw JSON-LD document. Input that starts with `{` or
/// `[` is JSON-LD; anything else is scanned as HTML.
pub fn load_document(origin: &str, text: &str) -> (SourceDocument, Vec<InputDiagnostic>) {
    let trimmed = text.trim_start_matches('\u{feff}').trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return match parse_jsonld(trimmed) {
            Ok(entities) => (SourceDocument::new(origin, entities), Vec::new()),
            Err(e) => (
                SourceDocument::new(origin, Vec::new()),
                vec![InputDiagnostic {
                    document: origin.to_string(),
                    message: format!("invalid JSON-LD: {e}"),
                }],
            ),
        };
    }
    let extraction = extract_jsonld(text);
    let diagnostics = extraction
        .diagnostics
        .iter()
        .map(|d| InputDiagnostic {
            document: origin.to_string(),
            message: format!("JSON-LD block {}: {}", d.block + 1, d.message),
        })
        .collect();
    (SourceDocument::new(origin, extraction.entities), diagnostics)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityClarityReport {
    pub checklist_version: &'static str,
    pub layers: Vec<LayerScore>,
    #[serde(serialize_with = "crate::fixed::serialize")]
    pub composite: f64,
    pub findings: Vec<ConsistencyFinding>,
    /// Single-valued disagreements that are not name or licence findings.
    pub merge_conflicts: Vec<MergeConflict>,
    pub diagnostics: Vec<InputDiagnostic>,
}

pub fn clarity_report(graph: &EntityGraph, config: &ClarityConfig) -> EntityClarityReport {
    let layers: Vec<LayerScore> = Layer::ALL.iter().map(|&l| score_layer(graph, l, config)).collect();
    let findings = consistency_findings(graph, config);
    let points: Vec<f64> = layers.iter().map(|l| l.points).collect();
    let composite = composite_score(&points, &findings);
    let merge_conflicts = graph
        .conflicts
        .iter()
        .filter(|c| !findings.iter().any(|f| f.entities == [c.node.clone()] && f.documents == c.documents))
        .cloned()
        .collect();
    EntityClarityReport {
        checklist_version: CHECKLIST_VERSION,
        layers,
        composite,
        findings,
        merge_conflicts,
        diagnostics: Vec::new(),
    }
}

impl EntityClarityReport {
    pub fn layer(&self, layer: Layer) -> Option<&LayerScore> {
        self.layers.iter().find(|l| l.layer == layer)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Entity clarity\n");
        let _ = writeln!(out, "Composite: **{:.1}** / 100 (checklist {})\n", self.composite, self.checklist_version);
        let _ = writeln!(out, "| Layer | Points | Missing |");
        let _ = writeln!(out, "|---|---:|---|");
        for l in &self.layers {
            let missing: Vec<&str> = l.missing.iter().map(|m| m.description()).collect();
            let missing = if missing.is_empty() { "none".to_string() } else { missing.join("; ") };
            let _ = writeln!(out, "| {} | {:.1} | {} |", l.layer.title(), l.points, missing);
        }
        if !self.findings.is_empty() {
            let _ = writeln!(out, "\n## Consistency findings\n");
            for f in &self.findings {
                let kind = match f.kind {
                    FindingKind::NameMismatch => "Name mismatch",
                    FindingKind::LicenceMismatch => "Licence mismatch",
                };
                let _ = writeln!(out, "- {kind}: {} (in {})", f.values.join(" vs "), f.documents.join(", "));
            }
        }
        if !self.diagnostics.is_empty() {
            let _ = writeln!(out, "\n## Input problems\n");
            for d in &self.diagnostics {
                let _ = writeln!(out, "- {}: {}", d.document, d.message);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_config_lists_are_rejected() {
        let table = json!({"service_taxonomy": []}).as_object().unwrap().clone();
        let err = ClarityConfig::default().apply(&Section::new("entity", &table, None)).unwrap_err();
        assert_eq!(err.key, "entity.service_taxonomy");
        let table = json!({"taxonomy": ["x"]}).as_object().unwrap().clone();
        assert!(ClarityConfig::default().apply(&Section::new("", &table, None)).is_err());
    }

    #[test]
    fn raw_and_html_inputs() {
        let (doc, diags) = load_document("a.json", r#"[{"@type":"Organization"}]"#);
        assert_eq!(doc.entities.len(), 1);
        assert!(diags.is_empty());
        let (doc, diags) = load_document("b.json", "{oops");
        assert!(doc.entities.is_empty());
        assert_eq!(diags.len(), 1);
        let (doc, _) = load_document("c.html", r#"<script type="application/ld+json">{"@type":"Person"}</script>"#);
        assert_eq!(doc.entities.len(), 1);
    }

    #[test]
    fn report_embeds_version_and_fixed_numbers() {
        let report = clarity_report(&EntityGraph::default(), &ClarityConfig::default());
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains(r#""checklist_version":"geo-clarity/1""#));
        assert!(json.contains(r#""composite":0.000000"#));
        assert!(report.to_markdown().contains("| Regulatory Identity | 0.0 |"));
    }
}
