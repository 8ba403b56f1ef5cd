//! Entity graph built from JSON-LD documents.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use serde_json::{Map, Value};

/// One parsed structured-data document and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceDocument {
    pub origin: String,
    pub entities: Vec<Value>,
}

impl SourceDocument {
    pub fn new(origin: impl Into<String>, entities: Vec<Value>) -> Self {
        Self {
            origin: origin.into(),
            entities,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityNode {
    pub id: String,
    /// Local type names, with any vocabulary prefix removed.
    pub types: BTreeSet<String>,
    /// Values per property. Nested entities are replaced by `{"@id": ...}`
    /// references to their own nodes.
    pub properties: BTreeMap<String, Vec<Value>>,
    /// Documents that contributed to this node, in input order.
    pub provenance: Vec<String>,
}

impl EntityNode {
    pub fn has_type(&self, names: &[&str]) -> bool {
        self.types.iter().any(|t| names.iter().any(|n| n.eq_ignore_ascii_case(t)))
    }

    pub fn values(&self, property: &str) -> &[Value] {
        self.properties.get(property).map_or(&[], Vec::as_slice)
    }

    pub fn has(&self, property: &str) -> bool {
        !self.values(property).is_empty()
    }

    /// String values of a property, ignoring references and objects.
    pub fn strings<'a>(&'a self, property: &str) -> impl Iterator<Item = &'a str> + 'a {
        self.values(property).iter().filter_map(Value::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "target", rename_all = "snake_case")]
pub enum EdgeTarget {
    Node(String),
    External(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: String,
    pub property: String,
    pub to: EdgeTarget,
}

/// Two documents disagreed on a single-valued property of one node.
/// The later value wins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeConflict {
    pub node: String,
    pub property: String,
    pub previous: Value,
    pub replacement: Value,
    pub documents: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EntityGraph {
    pub nodes: Vec<EntityNode>,
    pub edges: Vec<Edge>,
    pub conflicts: Vec<MergeConflict>,
}

/// Properties that hold one value per entity. Disagreements on these are
/// conflicts rather than additions.
const SINGLE_VALUED: &[&str] = &[
    "name",
    "legalName",
    "url",
    "foundingDate",
    "taxID",
    "vatID",
    "leiCode",
    "telephone",
    "email",
    "jobTitle",
    "ratingValue",
    "reviewCount",
    "propertyID",
    "value",
];

/// Properties whose plain URL strings point at other entities.
const LINK_PROPERTIES: &[&str] = &[
    "sameAs",
    "parentOrganization",
    "subOrganization",
    "employee",
    "founder",
    "worksFor",
    "memberOf",
    "member",
    "brand",
    "provider",
    "offers",
    "makesOffer",
    "itemOffered",
];

/// Drops a vocabulary prefix: `schema:Organization` and
/// `https://schema.org/Organization` both become `Organization`.
pub fn local_name(term: &str) -> &str {
    if term.starts_with('@') {
        return term;
    }
    term.rsplit(['/', '#', ':']).next().unwrap_or(term)
}

fn is_url(s: &str) -> bool {
    s.starts_with("http://") || s.starts_with("https://")
}

fn is_reference(map: &Map<String, Value>) -> bool {
    map.len() == 1 && map.contains_key("@id")
}

fn reference(id: &str) -> Value {
    let mut map = Map::new();
    map.insert("@id".into(), Value::String(id.to_string()));
    Value::Object(map)
}

/// The id a value refers to, if it is a `{"@id": ...}` reference.
pub fn reference_id(value: &Value) -> Option<&str> {
    value.as_object().filter(|m| is_reference(m))?.get("@id")?.as_str()
}

#[derive(Default)]
struct Builder {
    nodes: Vec<EntityNode>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    pending: Vec<(String, String, String)>,
    conflicts: Vec<MergeConflict>,
    next_blank: usize,
}

impl Builder {
    fn node_mut(&mut self, id: &str, origin: &str) -> usize {
        let at = match self.index.get(id) {
            Some(&at) => at,
            None => {
                self.nodes.push(EntityNode {
                    id: id.to_string(),
                    types: BTreeSet::new(),
                    properties: BTreeMap::new(),
                    provenance: Vec::new(),
                });
                self.index.insert(id.to_string(), self.nodes.len() - 1);
                self.nodes.len() - 1
            }
        };
        let node = &mut self.nodes[at];
        if !node.provenance.iter().any(|p| p == origin) {
            node.provenance.push(origin.to_string());
        }
        at
    }

    /// Adds an entity object and returns its node id.
    fn add_entity(&mut self, map: &Map<String, Value>, origin: &str) -> String {
        let id = match map.get("@id").and_then(Value::as_str) {
            Some(id) => id.to_string(),
            None => {
                self.next_blank += 1;
                format!("_:b{}", self.next_blank)
            }
        };
        let at = self.node_mut(&id, origin);
        for t in map.get("@type").into_iter().flat_map(values_of) {
            if let Some(t) = t.as_str() {
                self.nodes[at].types.insert(local_name(t).to_string());
            }
        }
        for (key, raw) in map {
            if key.starts_with('@') {
                continue;
            }
            let property = local_name(key).to_string();
            let mut incoming = Vec::new();
            for value in values_of(raw) {
                incoming.push(self.add_value(&id, &property, value, origin));
            }
            self.merge_property(at, &property, incoming, origin);
        }
        id
    }

    fn add_value(&mut self, from: &str, property: &str, value: &Value, origin: &str) -> Value {
        match value {
            Value::Object(map) if is_reference(map) => {
                let target = map["@id"].as_str().unwrap_or_default().to_string();
                self.pending.push((from.to_string(), property.to_string(), target));
                value.clone()
            }
            Value::Object(map) => {
                let child = self.add_entity(map, origin);
                self.edges.push(Edge {
                    from: from.to_string(),
                    property: property.to_string(),
                    to: EdgeTarget::Node(child.clone()),
                });
                reference(&child)
            }
            Value::String(s) if is_url(s) && LINK_PROPERTIES.contains(&property) => {
                self.pending.push((from.to_string(), property.to_string(), s.clone()));
                value.clone()
            }
            other => other.clone(),
        }
    }

    fn merge_property(&mut self, at: usize, property: &str, incoming: Vec<Value>, origin: &str) {
        let node = &mut self.nodes[at];
        let existing = node.properties.entry(property.to_string()).or_default();
        let scalar = |v: &[Value]| v.len() == 1 && !v[0].is_object() && !v[0].is_array();
        if SINGLE_VALUED.contains(&property)
            && scalar(existing)
            && scalar(&incoming)
            && existing[0] != incoming[0]
        {
            let mut documents = node.provenance.clone();
            documents.retain(|d| d != origin);
            documents.push(origin.to_string());
            self.conflicts.push(MergeConflict {
                node: node.id.clone(),
                property: property.to_string(),
                previous: existing[0].clone(),
                replacement: incoming[0].clone(),
                documents,
            });
            *existing = incoming;
            return;
        }
        for value in incoming {
            if !existing.contains(&value) {
                existing.push(value);
            }
        }
    }

    fn finish(mut self) -> EntityGraph {
        for (from, property, target) in std::mem::take(&mut self.pending) {
            let to = if self.index.contains_key(&target) {
                EdgeTarget::Node(target)
            } else {
                EdgeTarget::External(target)
            };
            self.edges.push(Edge { from, property, to });
        }
        let mut seen = BTreeSet::new();
        self.edges
            .retain(|e| seen.insert((e.from.clone(), e.property.clone(), e.to.clone())));
        EntityGraph {
            nodes: self.nodes,
            edges: self.edges,
            conflicts: self.conflicts,
        }
    }
}

fn values_of(value: &Value) -> impl Iterator<Item = &Value> {
    let slice = match value {
        Value::Array(items) => items.as_slice(),
        Value::Null => &[],
        other => std::slice::from_ref(other),
    };
    slice.iter()
}

/// Builds one graph from all documents. Entities sharing an `@id` merge:
/// multi-valued properties are unioned and single-valued disagreements are
/// recorded as conflicts, with the later document winning. A document
/// identical to an earlier one is skipped, so a set merged with itself
/// yields the same graph.
pub fn build_entity_graph(documents: &[SourceDocument]) -> EntityGraph {
    let mut builder = Builder::default();
    for (i, doc) in documents.iter().enumerate() {
        if documents[..i].contains(doc) {
            continue;
        }
        for entity in &doc.entities {
            if let Value::Object(map) = entity {
                builder.add_entity(map, &doc.origin);
            }
        }
    }
    builder.finish()
}

impl EntityGraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&EntityNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Follows a reference value to its node.
    pub fn resolve(&self, value: &Value) -> Option<&EntityNode> {
        self.node(reference_id(value)?)
    }

    /// Nodes that a property of `node` points at.
    pub fn linked<'a>(&'a self, node: &'a EntityNode, property: &str) -> Vec<&'a EntityNode> {
        node.values(property).iter().filter_map(|v| self.resolve(v)).collect()
    }

    pub fn nodes_of_type<'a>(&'a self, names: &'a [&str]) -> impl Iterator<Item = &'a EntityNode> {
        self.nodes.iter().filter(move |n| n.has_type(names))
    }

    /// Edges leaving or entering `id`, returned as (property, other end).
    pub fn neighbours<'a>(&'a self, id: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> {
        self.edges.iter().filter_map(move |e| {
            let EdgeTarget::Node(to) = &e.to else {
                return None;
            };
            if e.from == id {
                Some((e.property.as_str(), to.as_str()))
            } else if to == id {
                Some((e.property.as_str(), e.from.as_str()))
            } else {
                None
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn doc(origin: &str, entities: Value) -> SourceDocument {
        SourceDocument::new(origin, crate::entity::extract::flatten(entities))
    }

    #[test]
    fn regulator_same_as_becomes_external_edge() {
        let g = build_entity_graph(&[doc(
            "a",
            json!({"@type": "Organization", "@id": "#org", "name": "Bet",
                   "sameAs": "https://www.gamblingcommission.gov.uk/public-register/business/detail/1"}),
        )]);
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(
            g.edges,
            vec![Edge {
                from: "#org".into(),
                property: "sameAs".into(),
                to: EdgeTarget::External(
                    "https://www.gamblingcommission.gov.uk/public-register/business/detail/1".into()
                ),
            }]
        );
    }

    #[test]
    fn empty_input_gives_empty_graph() {
        let g = build_entity_graph(&[]);
        assert!(g.is_empty());
        assert!(g.edges.is_empty());
    }

    #[test]
    fn shared_id_merges_into_one_node() {
        let g = build_entity_graph(&[
            doc("a", json!({"@type": "Organization", "@id": "#org", "name": "Bet", "sameAs": "https://x.com/bet"})),
            doc("b", json!({"@type": "Corporation", "@id": "#org", "name": "Bet", "sameAs": ["https://x.com/bet", "https://facebook.com/bet"]})),
        ]);
        assert_eq!(g.nodes.len(), 1);
        let node = &g.nodes[0];
        assert_eq!(node.provenance, ["a", "b"]);
        assert_eq!(node.types.len(), 2);
        assert_eq!(node.values("sameAs").len(), 2);
        assert!(g.conflicts.is_empty());
    }

    #[test]
    fn scalar_disagreement_is_flagged_and_last_wins() {
        let g = build_entity_graph(&[
            doc("a", json!({"@id": "#org", "@type": "Organization", "name": "Bet One"})),
            doc("b", json!({"@id": "#org", "name": "Bet 1"})),
        ]);
        assert_eq!(g.nodes[0].values("name"), [json!("Bet 1")]);
        assert_eq!(g.conflicts.len(), 1);
        assert_eq!(g.conflicts[0].documents, ["a", "b"]);
    }

    #[test]
    fn nested_entities_become_nodes_with_edges() {
        let g = build_entity_graph(&[doc(
            "a",
            json!({"@type": "Organization", "@id": "#org",
                   "employee": {"@type": "Person", "name": "Ann", "jobTitle": "CEO"},
                   "parentOrganization": {"@id": "#parent"}}),
        )]);
        assert_eq!(g.nodes.len(), 2);
        let org = g.node("#org").unwrap();
        let people = g.linked(org, "employee");
        assert_eq!(people.len(), 1);
        assert!(people[0].has_type(&["Person"]));
        assert!(g.edges.contains(&Edge {
            from: "#org".into(),
            property: "parentOrganization".into(),
            to: EdgeTarget::External("#parent".into()),
        }));
    }

    #[test]
    fn forward_references_resolve_to_nodes() {
        let g = build_entity_graph(&[doc(
            "a",
            json!([{"@type": "Person", "@id": "#p", "worksFor": {"@id": "#org"}},
                   {"@type": "Organization", "@id": "#org"}]),
        )]);
        assert!(g.edges.iter().all(|e| matches!(&e.to, EdgeTarget::Node(id) if id == "#org")));
        assert_eq!(g.neighbours("#org").collect::<Vec<_>>(), [("worksFor", "#p")]);
    }

    #[test]
    fn prefixed_terms_are_localised() {
        assert_eq!(local_name("schema:Organization"), "Organization");
        assert_eq!(local_name("https://schema.org/Person"), "Person");
        assert_eq!(local_name("@id"), "@id");
    }
}
