//! Pulls JSON-LD blocks out of HTML.

use serde::Serialize;
use serde_json::Value;

/// A JSON-LD block that failed to parse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockDiagnostic {
    /// Zero-based index among the page's JSON-LD script blocks.
    pub block: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Extraction {
    /// Entities from every valid block, flattened, in document order.
    pub entities: Vec<Value>,
    pub diagnostics: Vec<BlockDiagnostic>,
    pub blocks: usize,
}

/// Splits top-level arrays and `@graph` containers into single entities.
pub fn flatten(value: Value) -> Vec<Value> {
    match value {
        Value::Array(items) => items.into_iter().flat_map(flatten).collect(),
        Value::Object(mut map) => match map.remove("@graph") {
            Some(graph) => {
                let mut out = flatten(graph);
                // A container that also describes an entity keeps it.
                map.remove("@context");
                if map.keys().any(|k| k == "@type" || !k.starts_with('@')) {
                    out.insert(0, Value::Object(map));
                }
                out
            }
            None => vec![Value::Object(map)],
        },
        _ => Vec::new(),
    }
}

/// Parses a raw JSON-LD document into flattened entities.
pub fn parse_jsonld(json: &str) -> Result<Vec<Value>, serde_json::Error> {
    serde_json::from_str::<Value>(json).map(flatten)
}

fn find_ci(haystack: &str, needle: &str, from: usize) -> Option<usize> {
    let hay = haystack.as_bytes();
    let needle = needle.as_bytes();
    (from..hay.len().saturating_sub(needle.len() - 1))
        .find(|&i| hay[i..i + needle.len()].eq_ignore_ascii_case(needle))
}

/// Value of attribute `name` in a start-tag body like ` type="x" id=y`.
fn attribute<'a>(tag: &'a str, name: &str) -> Option<&'a str> {
    let mut rest = tag;
    loop {
        rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == '/');
        if rest.is_empty() {
            return None;
        }
        let key_end = rest
            .find(|c: char| c.is_whitespace() || c == '=' || c == '/')
            .unwrap_or(rest.len());
        let key = &rest[..key_end];
        rest = rest[key_end..].trim_start();
        let value = if let Some(after) = rest.strip_prefix('=') {
            let after = after.trim_start();
            let (value, remaining) = match after.chars().next() {
                Some(q @ ('"' | '\'')) => {
                    let end = after[1..].find(q).map_or(after.len(), |e| e + 1);
                    (&after[1..end], after.get(end + 1..).unwrap_or(""))
                }
                _ => {
                    let end = after.find(char::is_whitespace).unwrap_or(after.len());
                    (&after[..end], &after[end..])
                }
            };
            rest = remaining;
            value
        } else {
            ""
        };
        if key.eq_ignore_ascii_case(name) {
            return Some(value);
        }
    }
}

fn is_jsonld_type(value: &str) -> bool {
    value
        .split(';')
        .next()
        .is_some_and(|t| t.trim().eq_ignore_ascii_case("application/ld+json"))
}

/// Returns every `<script type="application/ld+json">` body, parsed and
/// flattened, in document order. Malformed blocks become diagnostics.
/// Scripts inside HTML comments are skipped.
pub fn extract_jsonld(html: &str) -> Extraction {
    let mut out = Extraction::default();
    let mut i = 0;
    while i < html.len() {
        let next_comment = html[i..].find("<!--").map(|p| p + i);
        let Some(script) = find_ci(html, "<script", i) else {
            break;
        };
        if let Some(c) = next_comment.filter(|&c| c < script) {
            i = html[c + 4..].find("-->").map_or(html.len(), |e| c + 4 + e + 3);
            continue;
        }
        let Some(tag_end) = html[script..].find('>').map(|p| p + script) else {
            break;
        };
        let tag = &html[script + "<script".len()..tag_end];
        let body_start = tag_end + 1;
        let close = find_ci(html, "</script", body_start).unwrap_or(html.len());
        i = html[close..].find('>').map_or(html.len(), |p| close + p + 1);

        if !attribute(tag, "type").is_some_and(is_jsonld_type) {
            continue;
        }
        let block = out.blocks;
        out.blocks += 1;
        let body = html[body_start..close].trim();
        let body = body
            .strip_prefix("<![CDATA[")
            .and_then(|b| b.strip_suffix("]]>"))
            .unwrap_or(body)
            .trim();
        match parse_jsonld(body) {
            Ok(entities) => out.entities.extend(entities),
            Err(e) => out.diagnostics.push(BlockDiagnostic {
                block,
                message: e.to_string(),
            }),
        }
    }
    out
}
