//! Effective settings: built-in defaults, then the config file, then flags.

use std::path::{Path, PathBuf};

use geometer_core::config::{parse_table, ConfigError, Section};
use geometer_core::{AnalyzerConfig, ClarityConfig};
use serde_json::Value;

use crate::args::{Format, GlobalArgs};

const TOP_KEYS: &[&str] = &[
    "brands",
    "format",
    "verbosity",
    "analyzer_config",
    "clarity_config",
    "analyzer",
    "entity",
    "bench",
];
const BENCH_KEYS: &[&str] = &["store", "parallelism"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verbosity {
    Quiet,
    Normal,
    Verbose,
}

#[derive(Debug, Clone)]
pub struct CliConfig {
    pub brands: Vec<PathBuf>,
    pub analyzer: AnalyzerConfig,
    pub clarity: ClarityConfig,
    pub format: Format,
    pub verbosity: Verbosity,
    pub store: Option<PathBuf>,
    pub parallelism: usize,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            brands: Vec::new(),
            analyzer: AnalyzerConfig::default(),
            clarity: ClarityConfig::default(),
            format: Format::Json,
            verbosity: Verbosity::Normal,
            store: None,
            parallelism: 4,
        }
    }
}

fn parse_verbosity(key: String, value: &Value) -> Result<Verbosity, ConfigError> {
    match value.as_str() {
        Some("quiet") => Ok(Verbosity::Quiet),
        Some("normal") => Ok(Verbosity::Normal),
        Some("verbose") => Ok(Verbosity::Verbose),
        _ => Err(ConfigError::new(key, "expected \"quiet\", \"normal\" or \"verbose\"")),
    }
}

fn apply_file(cfg: &mut CliConfig, path: &Path) -> Result<(), ConfigError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(&origin, e.to_string()))?;
    let table = parse_table(&text, &origin)?;
    let root = Section::new("", &table, path.parent());
    root.deny_unknown(TOP_KEYS)?;

    if let Some(list) = root.string_list("brands")? {
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.brands = list.into_iter().map(|p| base.join(p)).collect();
    }
    if let Some(format) = root.string("format")? {
        cfg.format = format
            .parse()
            .map_err(|_| ConfigError::new("format", "expected \"json\", \"csv\" or \"md\""))?;
    }
    if let Some(v) = table.get("verbosity") {
        cfg.verbosity = parse_verbosity(root.key("verbosity"), v)?;
    }
    if let Some(p) = root.path("analyzer_config")? {
        cfg.analyzer = AnalyzerConfig::load(&p)?;
    }
    if let Some(section) = root.subsection("analyzer")? {
        cfg.analyzer.apply(&section)?;
    }
    if let Some(p) = root.path("clarity_config")? {
        cfg.clarity = ClarityConfig::load(&p)?;
    }
    if let Some(section) = root.subsection("entity")? {
        cfg.clarity.apply(&section)?;
    }
    if let Some(bench) = root.subsection("bench")? {
        bench.deny_unknown(BENCH_KEYS)?;
        if let Some(store) = bench.path("store")? {
            cfg.store = Some(store);
        }
        if let Some(v) = table["bench"].get("parallelism") {
            cfg.parallelism = v
                .as_u64()
                .filter(|&n| n >= 1)
                .ok_or_else(|| ConfigError::new(bench.key("parallelism"), "expected a positive integer"))?
                as usize;
        }
    }
    Ok(())
}

/// Merges defaults, the config file (if any) and global flags.
pub fn load_configs(flags: &GlobalArgs) -> Result<CliConfig, ConfigError> {
    let mut cfg = CliConfig::default();
    if let Some(path) = &flags.config {
        apply_file(&mut cfg, path)?;
    }
    if !flags.brands.is_empty() {
        cfg.brands = flags.brands.clone();
    }
    if let Some(p) = &flags.analyzer_config {
        let file = AnalyzerConfig::load(p)?;
        cfg.analyzer = file;
    }
    if let Some(p) = &flags.clarity_config {
        cfg.clarity = ClarityConfig::load(p)?;
    }
    if let Some(format) = flags.format {
        cfg.format = format;
    }
    if flags.quiet {
        cfg.verbosity = Verbosity::Quiet;
    } else if flags.verbose > 0 {
        cfg.verbosity = Verbosity::Verbose;
    }
    Ok(cfg)
}
