//! Loading of TOML or JSON configuration tables with key-level error
//! reporting.

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{key}: {reason}")]
pub struct ConfigError {
    /// Dotted path of the offending key, or the file path for whole-file
    /// problems.
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

/// Parses `text` as JSON when it starts with `{`, otherwise as TOML, and
/// returns the top-level table.
pub fn parse_table(text: &str, origin: &str) -> Result<Map<String, Value>, ConfigError> {
    let value = if text.trim_start().starts_with('{') {
        serde_json::from_str::<Value>(text).map_err(|e| ConfigError::new(origin, e.to_string()))?
    } else {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::new(origin, e.message().to_string()))?;
        serde_json::to_value(table).map_err(|e| ConfigError::new(origin, e.to_string()))?
    };
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(ConfigError::new(origin, "expected a table at the top level")),
    }
}

/// Read-only view over one config table that tracks the key path and the
/// directory relative paths resolve against.
pub struct Section<'a> {
    pub(crate) prefix: String,
    pub(crate) map: &'a Map<String, Value>,
    pub(crate) base_dir: Option<&'a Path>,
}

impl<'a> Section<'a> {
    pub fn new(prefix: &str, map: &'a Map<String, Value>, base_dir: Option<&'a Path>) -> Self {
        Self {
            prefix: prefix.to_string(),
            map,
            base_dir,
        }
    }

    pub fn key(&self, name: &str) -> String {
        if self.prefix.is_empty() {
            name.to_string()
        } else {
            format!("{}.{}", self.prefix, name)
        }
    }

    /// Rejects keys outside `allowed`.
    pub fn deny_unknown(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(ConfigError::new(self.key(k), "unknown key")),
            None => Ok(()),
        }
    }

    pub fn string_list(&self, name: &str) -> Result<Option<Vec<String>>, ConfigError> {
        let Some(value) = self.map.get(name) else {
            return Ok(None);
        };
        let items = value
            .as_array()
            .ok_or_else(|| ConfigError::new(self.key(name), "expected a list of strings"))?;
        items
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| ConfigError::new(self.key(name), "expected a list of strings"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn string(&self, name: &str) -> Result<Option<String>, ConfigError> {
        match self.map.get(name) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(ConfigError::new(self.key(name), "expected a string")),
        }
    }

    pub fn path(&self, name: &str) -> Result<Option<PathBuf>, ConfigError> {
        Ok(self.string(name)?.map(|p| match self.base_dir {
            Some(dir) if Path::new(&p).is_relative() => dir.join(p),
            _ => PathBuf::from(p),
        }))
    }

    /// Reads a one-entry-per-line word list named by `name`; blank lines and
    /// `#` comments are ignored.
    pub fn word_file(&self, name: &str) -> Result<Option<Vec<String>>, ConfigError> {
        let Some(path) = self.path(name)? else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| ConfigError::new(self.key(name), format!("{}: {e}", path.display())))?;
        Ok(Some(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect(),
        ))
    }

    /// A list given inline under `name` and/or as a file under `name_file`;
    /// both are concatenated when present.
    pub fn list_or_file(&self, name: &str) -> Result<Option<Vec<String>>, ConfigError> {
        let inline = self.string_list(name)?;
        let from_file = self.word_file(&format!("{name}_file"))?;
        Ok(match (inline, from_file) {
            (None, None) => None,
            (a, b) => Some(a.into_iter().flatten().chain(b.into_iter().flatten()).collect()),
        })
    }

    pub fn subsection(&self, name: &str) -> Result<Option<Section<'a>>, ConfigError> {
        match self.map.get(name) {
            None => Ok(None),
            Some(Value::Object(map)) => Ok(Some(Section {
                prefix: self.key(name),
                map,
                base_dir: self.base_dir,
            })),
            Some(_) => Err(ConfigError::new(self.key(name), "expected a table")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_parse_to_the_same_table() {
        let a = parse_table("keywords = [\"casino\"]\n", "a.toml").unwrap();
        let b = parse_table(r#"{"keywords": ["casino"]}"#, "b.json").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_name_the_key() {
        let t = parse_table("[analyzer]\nkeywords = \"casino\"\nbogus = 1\n", "c.toml").unwrap();
        let root = Section::new("", &t, None);
        let analyzer = root.subsection("analyzer").unwrap().unwrap();
        let err = analyzer.string_list("keywords").unwrap_err();
        assert_eq!(err.key, "analyzer.keywords");
        let err = analyzer.deny_unknown(&["keywords"]).unwrap_err();
        assert_eq!(err.key, "analyzer.bogus");
    }

    #[test]
    fn malformed_file_names_origin() {
        let err = parse_table("keywords = [", "bad.toml").unwrap_err();
        assert_eq!(err.key, "bad.toml");
        assert!(parse_table("[1, 2]", "x.json").is_err());
    }
}
