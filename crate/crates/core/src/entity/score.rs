//! Checklist evaluation and consistency findings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use url::Url;

use super::graph::{EntityGraph, EntityNode};
use super::{ClarityConfig, ClarityError};
use crate::transcript::domain_matches;

/// Version tag for the checklist contents. Bump whenever an item changes.
pub const CHECKLIST_VERSION: &str = "geo-clarity/1";

/// Composite points deducted per class of consistency finding present.
pub const FINDING_PENALTY: f64 = 5.0;

pub const ORGANIZATION_TYPES: &[&str] = &[
    "Organization",
    "Corporation",
    "LocalBusiness",
    "OnlineBusiness",
    "OnlineStore",
    "Casino",
    "SportsOrganization",
    "EntertainmentBusiness",
    "GamblingOrganization",
    "NGO",
];

pub const SERVICE_TYPES: &[&str] = &["Service", "Offer", "Product", "AggregateOffer", "FinancialProduct"];

/// Properties that tie a person to an organization, in either direction.
const PERSON_LINKS: &[&str] = &["employee", "founder", "worksFor", "member", "memberOf", "employees", "founders"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Layer {
    RegulatoryIdentity,
    CorporateGraph,
    ServiceTaxonomy,
    ReputationSignals,
}

impl Layer {
    pub const ALL: [Layer; 4] = [
        Layer::RegulatoryIdentity,
        Layer::CorporateGraph,
        Layer::ServiceTaxonomy,
        Layer::ReputationSignals,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Layer::RegulatoryIdentity => "regulatory_identity",
            Layer::CorporateGraph => "corporate_graph",
            Layer::ServiceTaxonomy => "service_taxonomy",
            Layer::ReputationSignals => "reputation_signals",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Layer::RegulatoryIdentity => "Regulatory Identity",
            Layer::CorporateGraph => "Corporate Graph",
            Layer::ServiceTaxonomy => "Service Taxonomy",
            Layer::ReputationSignals => "Reputation Signals",
        }
    }

    pub fn items(self) -> &'static [ChecklistItem] {
        use ChecklistItem::*;
        match self {
            Layer::RegulatoryIdentity => &[LicenceIdentifier, RegulatorSameAs, LicenceFormat],
            Layer::CorporateGraph => &[PersonWithRole, ParentSubsidiaryLink, CompanyRegisterSameAs],
            Layer::ServiceTaxonomy => &[ServicePresent, CategoriesInTaxonomy, OffersCategorized],
            Layer::ReputationSignals => &[AggregateRating, ReviewOrAward, ProfileSameAs],
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Layer {
    type Err = ClarityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase();
        Layer::ALL
            .into_iter()
            .find(|l| l.id().replace('_', "") == key)
            .ok_or_else(|| ClarityError::UnknownLayer(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChecklistItem {
    LicenceIdentifier,
    RegulatorSameAs,
    LicenceFormat,
    PersonWithRole,
    ParentSubsidiaryLink,
    CompanyRegisterSameAs,
    ServicePresent,
    CategoriesInTaxonomy,
    OffersCategorized,
    AggregateRating,
    ReviewOrAward,
    ProfileSameAs,
}

impl ChecklistItem {
    pub fn description(self) -> &'static str {
        use ChecklistItem::*;
        match self {
            LicenceIdentifier => "An organization carries a regulator licence identifier",
            RegulatorSameAs => "An organization links to a regulator register via sameAs",
            LicenceFormat => "Every licence identifier is a plausible account number",
            PersonWithRole => "A person with a job title is linked to an organization",
            ParentSubsidiaryLink => "An organization declares a parent or subsidiary",
            CompanyRegisterSameAs => "An organization links to a company register via sameAs",
            ServicePresent => "At least one service, offer or product is described",
            CategoriesInTaxonomy => "Every service category is in the configured taxonomy",
            OffersCategorized => "Every service, offer and product has a category",
            AggregateRating => "An aggregate rating is present",
            ReviewOrAward => "At least one review or award is present",
            ProfileSameAs => "An organization links to a third-party profile via sameAs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerScore {
    pub layer: Layer,
    #[serde(serialize_with = "crate::fixed::serialize")]
    pub points: f64,
    pub satisfied: Vec<ChecklistItem>,
    pub missing: Vec<ChecklistItem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    NameMismatch,
    LicenceMismatch,
}

/// Documents that describe the same organization disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyFinding {
    pub kind: FindingKind,
    pub entities: Vec<String>,
    pub values: Vec<String>,
    pub documents: Vec<String>,
}

fn host(url: &str) -> Option<String> {
    let parsed = Url::parse(url.trim()).ok()?;
    Some(parsed.host_str()?.trim_end_matches('.').to_lowercase())
}

fn links_to(node: &EntityNode, domains: &[String]) -> bool {
    node.strings("sameAs")
        .filter_map(host)
        .any(|h| domains.iter().any(|d| domain_matches(&h, &d.to_lowercase())))
}

fn scalar_text(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.trim().to_string()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// (key, value) pairs of the licence identifiers on an organization.
pub fn licences(graph: &EntityGraph, org: &EntityNode, config: &ClarityConfig) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for value in org.values("identifier") {
        let Some(id) = graph.resolve(value) else {
            continue;
        };
        let Some(key) = id.values("propertyID").iter().find_map(scalar_text) else {
            continue;
        };
        if !config.licence_keys.iter().any(|k| k.eq_ignore_ascii_case(&key)) {
            continue;
        }
        for v in id.values("value").iter().filter_map(scalar_text) {
            out.push((key.to_uppercase(), v));
        }
    }
    out
}

/// Licence account numbers are plain digit strings of four to six digits.
pub fn plausible_licence(value: &str) -> bool {
    (4..=6).contains(&value.len()) && value.bytes().all(|b| b.is_ascii_digit())
}

fn normalize_label(s: &str) -> String {
    crate::text::collapse_whitespace(s).to_lowercase()
}

/// Category labels of a service item, including those of the thing an
/// offer points at.
fn categories(graph: &EntityGraph, node: &EntityNode) -> Vec<String> {
    let own = ["serviceType", "category"]
        .into_iter()
        .flat_map(|p| node.values(p).iter().filter_map(scalar_text));
    let offered = graph
        .linked(node, "itemOffered")
        .into_iter()
        .flat_map(|item| ["serviceType", "category"].into_iter().flat_map(|p| item.values(p).iter().filter_map(scalar_text)));
    own.chain(offered).filter(|c| !c.is_empty()).collect()
}

fn person_with_role(graph: &EntityGraph) -> bool {
    graph
        .nodes_of_type(&["Person"])
        .filter(|p| p.strings("jobTitle").any(|t| !t.trim().is_empty()))
        .any(|p| {
            graph.neighbours(&p.id).any(|(property, other)| {
                PERSON_LINKS.contains(&property)
                    && graph.node(other).is_some_and(|o| o.has_type(ORGANIZATION_TYPES))
            })
        })
}

fn item_satisfied(graph: &EntityGraph, item: ChecklistItem, config: &ClarityConfig) -> bool {
    use ChecklistItem::*;
    let orgs: Vec<&EntityNode> = graph.nodes_of_type(ORGANIZATION_TYPES).collect();
    let services: Vec<&EntityNode> = graph.nodes_of_type(SERVICE_TYPES).collect();
    // Conditional items hold vacuously only once there is an organization to
    // speak of, so an empty graph scores zero.
    let has_org = !orgs.is_empty();
    match item {
        LicenceIdentifier => orgs.iter().any(|o| !licences(graph, o, config).is_empty()),
        RegulatorSameAs => orgs.iter().any(|o| links_to(o, &config.regulator_domains)),
        LicenceFormat => {
            has_org
                && orgs
                    .iter()
                    .flat_map(|o| licences(graph, o, config))
                    .all(|(_, v)| plausible_licence(&v))
        }
        PersonWithRole => person_with_role(graph),
        ParentSubsidiaryLink => orgs
            .iter()
            .any(|o| o.has("parentOrganization") || o.has("subOrganization")),
        CompanyRegisterSameAs => orgs.iter().any(|o| links_to(o, &config.company_register_domains)),
        ServicePresent => !services.is_empty(),
        CategoriesInTaxonomy => {
            let taxonomy: BTreeSet<String> = config.service_taxonomy.iter().map(|t| normalize_label(t)).collect();
            has_org
                && services
                    .iter()
                    .flat_map(|s| categories(graph, s))
                    .all(|c| taxonomy.contains(&normalize_label(&c)))
        }
        OffersCategorized => has_org && services.iter().all(|s| !categories(graph, s).is_empty()),
        AggregateRating => {
            graph.nodes.iter().any(|n| n.has("aggregateRating")) || graph.nodes_of_type(&["AggregateRating"]).next().is_some()
        }
        ReviewOrAward => {
            graph.nodes.iter().any(|n| n.has("review") || n.has("award") || n.has("awards"))
                || graph.nodes_of_type(&["Review"]).next().is_some()
        }
        ProfileSameAs => orgs.iter().any(|o| links_to(o, &config.profile_domains)),
    }
}

/// Evaluates one layer's checklist.
pub fn score_layer(graph: &EntityGraph, layer: Layer, config: &ClarityConfig) -> LayerScore {
    let (satisfied, missing): (Vec<ChecklistItem>, Vec<ChecklistItem>) = layer
        .items()
        .iter()
        .partition(|&&item| item_satisfied(graph, item, config));
    let total = layer.items().len() as f64;
    LayerScore {
        layer,
        points: 100.0 * satisfied.len() as f64 / total,
        satisfied,
        missing,
    }
}

/// Equal-weight mean of the layer points, minus [`FINDING_PENALTY`] per
/// distinct finding kind, floored at zero.
pub fn composite_score(points: &[f64], findings: &[ConsistencyFinding]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mean = points.iter().sum::<f64>() / points.len() as f64;
    let kinds: BTreeSet<FindingKind> = findings.iter().map(|f| f.kind).collect();
    (mean - FINDING_PENALTY * kinds.len() as f64).max(0.0)
}

fn normalize_url(url: &str) -> String {
    url.trim().trim_end_matches('/').to_lowercase()
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut root = i;
    while parent[root] != root {
        root = parent[root];
    }
    parent[i] = root;
    root
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Organizations that describe the same real-world entity are grouped when
/// they share a sameAs or url link (for name checks) or additionally a
/// name (for licence checks). A group with two distinct names, or two
/// distinct values for one licence key, is a finding. Merge conflicts on a
/// name or licence under one `@id` are findings too.
pub fn consistency_findings(graph: &EntityGraph, config: &ClarityConfig) -> Vec<ConsistencyFinding> {
    let orgs: Vec<&EntityNode> = graph.nodes_of_type(ORGANIZATION_TYPES).collect();
    let names: Vec<Option<String>> = orgs
        .iter()
        .map(|o| o.strings("name").next().map(normalize_label))
        .collect();

    let group = |by_name: bool| -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..orgs.len()).collect();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for (i, org) in orgs.iter().enumerate() {
            let links = org.strings("sameAs").chain(org.strings("url")).map(|u| format!("link:{}", normalize_url(u)));
            let name = names[i].iter().filter(|_| by_name).map(|n| format!("name:{n}"));
            for key in links.chain(name) {
                match seen.get(&key) {
                    Some(&j) => union(&mut parent, i, j),
                    None => {
                        seen.insert(key, i);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..orgs.len() {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    };

    let documents = |members: &[usize]| -> Vec<String> {
        let mut docs: Vec<String> = Vec::new();
        for &i in members {
            for d in &orgs[i].provenance {
                if !docs.contains(d) {
                    docs.push(d.clone());
                }
            }
        }
        docs
    };

    let mut findings = Vec::new();
    for conflict in &graph.conflicts {
        let kind = match conflict.property.as_str() {
            "name" => FindingKind::NameMismatch,
            "value" if is_licence_node(graph, &conflict.node, config) => FindingKind::LicenceMismatch,
            _ => continue,
        };
        findings.push(ConsistencyFinding {
            kind,
            entities: vec![conflict.node.clone()],
            values: [&conflict.previous, &conflict.replacement].into_iter().filter_map(scalar_text).collect(),
            documents: conflict.documents.clone(),
        });
    }

    for members in group(false).into_iter().filter(|m| m.len() > 1) {
        let distinct: BTreeSet<&String> = members.iter().filter_map(|&i| names[i].as_ref()).collect();
        if distinct.len() > 1 {
            findings.push(ConsistencyFinding {
                kind: FindingKind::NameMismatch,
                entities: members.iter().map(|&i| orgs[i].id.clone()).collect(),
                values: members
                    .iter()
                    .filter_map(|&i| orgs[i].strings("name").next().map(str::to_string))
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
                documents: documents(&members),
            });
        }
    }

    for members in group(true) {
        let mut per_key: BTreeMap<String, (BTreeSet<String>, Vec<usize>)> = BTreeMap::new();
        for &i in &members {
            for (key, value) in licences(graph, orgs[i], config) {
                let (values, holders) = per_key.entry(key).or_default();
                values.insert(value);
                if !holders.contains(&i) {
                    holders.push(i);
                }
            }
        }
        for (key, (values, holders)) in per_key.into_iter().filter(|(_, (v, _))| v.len() > 1) {
            findings.push(ConsistencyFinding {
                kind: FindingKind::LicenceMismatch,
                entities: holders.iter().map(|&i| orgs[i].id.clone()).collect(),
                values: values.into_iter().map(|v| format!("{key}:{v}")).collect(),
                documents: documents(&holders),
            });
        }
    }
    findings
}

fn is_licence_node(graph: &EntityGraph, id: &str, config: &ClarityConfig) -> bool {
    graph.node(id).is_some_and(|n| {
        n.values("propertyID")
            .iter()
            .filter_map(scalar_text)
            .any(|k| config.licence_keys.iter().any(|c| c.eq_ignore_ascii_case(&k)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::graph::{build_entity_graph, SourceDocument};
    use crate::entity::extract::flatten;
    use serde_json::json;

    fn graph(docs: &[Value]) -> EntityGraph {
        let docs: Vec<SourceDocument> = docs
            .iter()
            .enumerate()
            .map(|(i, d)| SourceDocument::new(format!("doc{i}"), flatten(d.clone())))
            .collect();
        build_entity_graph(&docs)
    }

    fn org(licence: &str) -> Value {
        json!({"@type": "Organization", "@id": "#org", "name": "Bet",
               "identifier": {"@type": "PropertyValue", "propertyID": "UKGC", "value": licence},
               "sameAs": ["https://www.gamblingcommission.gov.uk/public-register/business/detail/39028"]})
    }

    #[test]
    fn empty_graph_scores_zero() {
        let g = graph(&[]);
        for layer in Layer::ALL {
            let s = score_layer(&g, layer, &ClarityConfig::default());
            assert_eq!(s.points, 0.0);
            assert_eq!(s.missing.len(), 3);
        }
    }

    #[test]
    fn implausible_licence_costs_one_item() {
        let g = graph(&[org("ABC-XYZ")]);
        let s = score_layer(&g, Layer::RegulatoryIdentity, &ClarityConfig::default());
        assert_eq!(s.missing, [ChecklistItem::LicenceFormat]);
        assert!((s.points - 200.0 / 3.0).abs() < 1e-9);
        let g = graph(&[org("39028")]);
        assert_eq!(score_layer(&g, Layer::RegulatoryIdentity, &ClarityConfig::default()).points, 100.0);
    }

    #[test]
    fn numeric_licence_values_count() {
        let g = graph(&[json!({"@type": "Organization",
            "identifier": [{"@type": "PropertyValue", "propertyID": "ukgc", "value": 39028}]})]);
        let l = licences(&g, &g.nodes[0], &ClarityConfig::default());
        assert_eq!(l, [("UKGC".to_string(), "39028".to_string())]);
    }

    #[test]
    fn composite_arithmetic() {
        assert_eq!(composite_score(&[100.0; 4], &[]), 100.0);
        assert_eq!(composite_score(&[100.0, 50.0, 0.0, 50.0], &[]), 50.0);
        let f = ConsistencyFinding {
            kind: FindingKind::LicenceMismatch,
            entities: vec![],
            values: vec![],
            documents: vec![],
        };
        assert_eq!(composite_score(&[100.0, 50.0, 0.0, 50.0], std::slice::from_ref(&f)), 45.0);
        // Penalty is per kind, not per finding.
        assert_eq!(composite_score(&[100.0, 50.0, 0.0, 50.0], &[f.clone(), f]), 45.0);
        assert_eq!(composite_score(&[0.0; 4], &[]), 0.0);
    }

    #[test]
    fn licence_mismatch_across_documents() {
        let a = json!({"@type": "Organization", "name": "Bet", "url": "https://bet.example/",
            "identifier": {"@type": "PropertyValue", "propertyID": "UKGC", "value": "39028"}});
        let b = json!({"@type": "Organization", "name": "Bet", "url": "https://bet.example",
            "identifier": {"@type": "PropertyValue", "propertyID": "UKGC", "value": "39029"}});
        let findings = consistency_findings(&graph(&[a.clone(), b]), &ClarityConfig::default());
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].kind, FindingKind::LicenceMismatch);
        assert_eq!(findings[0].documents, ["doc0", "doc1"]);
        assert!(consistency_findings(&graph(&[a.clone(), a]), &ClarityConfig::default()).is_empty());
    }

    #[test]
    fn name_mismatch_via_shared_links_and_merge() {
        let a = json!({"@type": "Organization", "name": "Bet Ltd", "sameAs": "https://uk.trustpilot.com/review/bet.example"});
        let b = json!({"@type": "Organization", "name": "Bettington", "sameAs": "https://uk.trustpilot.com/review/bet.example"});
        let findings = consistency_findings(&graph(&[a, b]), &ClarityConfig::default());
        assert_eq!(findings.iter().map(|f| f.kind).collect::<Vec<_>>(), [FindingKind::NameMismatch]);

        let a = json!({"@type": "Organization", "@id": "#o", "name": "Bet"});
        let b = json!({"@type": "Organization", "@id": "#o", "name": "Bet Two"});
        let findings = consistency_findings(&graph(&[a, b]), &ClarityConfig::default());
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].values, ["Bet", "Bet Two"]);
    }

    #[test]
    fn unlinked_namesakes_are_not_a_name_mismatch() {
        let a = json!({"@type": "Organization", "name": "Bet"});
        let b = json!({"@type": "Organization", "name": "Other"});
        assert!(consistency_findings(&graph(&[a, b]), &ClarityConfig::default()).is_empty());
    }

    #[test]
    fn layer_ids_parse() {
        assert_eq!("RegulatoryIdentity".parse::<Layer>().unwrap(), Layer::RegulatoryIdentity);
        assert_eq!("reputation_signals".parse::<Layer>().unwrap(), Layer::ReputationSignals);
        assert!(matches!("brand".parse::<Layer>(), Err(ClarityError::UnknownLayer(_))));
    }

    #[test]
    fn offers_inherit_category_from_item() {
        let g = graph(&[json!({"@type": "Organization", "makesOffer": [
            {"@type": "Offer", "itemOffered": {"@type": "Service", "serviceType": "Slots"}}]})]);
        let s = score_layer(&g, Layer::ServiceTaxonomy, &ClarityConfig::default());
        assert_eq!(s.points, 100.0);
        let g = graph(&[json!({"@type": "Organization", "makesOffer": [
            {"@type": "Offer", "itemOffered": {"@type": "Service", "serviceType": "Bingo"}}]})]);
        let s = score_layer(&g, Layer::ServiceTaxonomy, &ClarityConfig::default());
        assert_eq!(s.missing, [ChecklistItem::CategoriesInTaxonomy]);
    }
}
