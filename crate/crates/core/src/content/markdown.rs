//! Markdown to plain text, keeping the heading outline.

use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Heading {
    pub level: usize,
    pub text: String,
}

/// A content document reduced to plain text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub text: String,
    pub headings: Vec<Heading>,
}

impl Document {
    pub fn plain(text: &str) -> Self {
        Self {
            text: text.to_string(),
            headings: Vec::new(),
        }
    }

    /// Strips Markdown syntax. Links become `text (url)` so the URL still
    /// counts as a reference; headings become standalone sentences; fenced
    /// code is dropped.
    pub fn markdown(source: &str) -> Self {
        let mut lines = Vec::new();
        let mut headings = Vec::new();
        let mut in_fence = false;
        for line in source.lines() {
            let trimmed = line.trim_start();
            if trimmed.starts_with("```") || trimmed.starts_with("~~~") {
                in_fence = !in_fence;
                continue;
            }
            if in_fence || is_rule(trimmed) {
                continue;
            }
            if let Some((level, title)) = heading(trimmed) {
                let title = inline(title);
                headings.push(Heading {
                    level,
                    text: title.clone(),
                });
                if !title.is_empty() {
                    let end = if title.ends_with(['.', '!', '?']) { "" } else { "." };
                    // Blank lines around the heading keep it out of the
                    // neighbouring paragraphs.
                    lines.push(String::new());
                    lines.push(format!("{title}{end}"));
                    lines.push(String::new());
                }
                continue;
            }
            lines.push(inline(strip_block_prefix(trimmed)));
        }
        Self {
            text: lines.join("\n"),
            headings,
        }
    }
}

fn is_rule(line: &str) -> bool {
    let compact: String = line.chars().filter(|c| !c.is_whitespace()).collect();
    compact.len() >= 3
        && (compact.chars().all(|c| c == '-')
            || compact.chars().all(|c| c == '*')
            || compact.chars().all(|c| c == '_'))
}

fn heading(line: &str) -> Option<(usize, &str)> {
    let level = line.chars().take_while(|&c| c == '#').count();
    if !(1..=6).contains(&level) {
        return None;
    }
    let rest = &line[level..];
    if !rest.is_empty() && !rest.starts_with(' ') {
        return None;
    }
    Some((level, rest.trim().trim_end_matches('#').trim()))
}

fn strip_block_prefix(line: &str) -> &str {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"^(?:>\s?)+|^(?:[-*+]|\d+[.)])\s+").unwrap());
    match re.find(line) {
        Some(m) => &line[m.end()..],
        None => line,
    }
}

fn inline(text: &str) -> String {
    static IMAGE: OnceLock<Regex> = OnceLock::new();
    static LINK: OnceLock<Regex> = OnceLock::new();
    static EMPHASIS: OnceLock<Regex> = OnceLock::new();
    let image = IMAGE.get_or_init(|| Regex::new(r"!\[([^\]]*)\]\([^)]*\)").unwrap());
    let link = LINK.get_or_init(|| Regex::new(r"\[([^\]]+)\]\(([^)\s]+)[^)]*\)").unwrap());
    let emphasis = EMPHASIS.get_or_init(|| Regex::new(r"\*\*|__|\*|`").unwrap());
    let text = image.replace_all(text, "$1");
    let text = link.replace_all(&text, "$1 ($2)");
    emphasis.replace_all(&text, "").into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_markup_and_keeps_outline() {
        let doc = Document::markdown(
            "# Best UK Casinos\n\nWe **tested** 40 sites.\n\n## Licensing\n- See [the register](https://www.gamblingcommission.gov.uk/register).\n\n```\ncode 123\n```\n> A quote.\n---\n",
        );
        assert_eq!(
            doc.headings,
            vec![
                Heading { level: 1, text: "Best UK Casinos".into() },
                Heading { level: 2, text: "Licensing".into() },
            ]
        );
        assert!(doc.text.contains("Best UK Casinos."));
        assert!(doc.text.contains("We tested 40 sites."));
        assert!(doc.text.contains("See the register (https://www.gamblingcommission.gov.uk/register)."));
        assert!(!doc.text.contains("code 123"));
        assert!(doc.text.contains("A quote."));
        assert!(!doc.text.contains("---"));
    }

    #[test]
    fn hash_without_space_is_not_a_heading() {
        let doc = Document::markdown("#hashtag text");
        assert!(doc.headings.is_empty());
        assert_eq!(doc.text, "#hashtag text");
    }
}
