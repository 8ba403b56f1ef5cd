//! Content scoring against the nine content optimization strategies.
//!
//! Each strategy gets a raw detector value in its natural unit and a
//! normalized score in `[0, 1]` that says how much of the strategy the text
//! already applies. [`recommend_strategies`] turns the profile and the
//! bundled relative-improvement priors into a ranked to-do list.

mod detectors;
mod markdown;
mod priors;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, Section};
use crate::fixed;
use crate::text;
use crate::transcript::Segmenter;

pub use detectors::{
    authoritative_tone, citation_density, count_references, fluency_proxy, keyword_density,
    lexical_diversity, lexicon_density, numeric_tokens, quotation_share, readability_score,
    statistics_density, strip_citation_markers, syllables, Lexicon, FLESCH_MAX, FLESCH_MIN,
};
pub use markdown::{Document, Heading};
pub use priors::{
    default_priors, priors_from_csv, priors_to_csv, published_rank, recommend_strategies,
    recommendations_markdown, Recommendation, Significance, StrategyPrior, DEFAULT_PRIORS,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("undefined metric: {0}")]
    Undefined(&'static str),
    #[error("invalid strategy priors: {0}")]
    Priors(String),
}

/// Saturation caps (per 100 words) at which a density scores 1.0.
pub const CITATION_CAP: f64 = 5.0;
pub const STATISTICS_CAP: f64 = 8.0;
pub const TECHNICAL_CAP: f64 = 10.0;
pub const TONE_CAP: f64 = 5.0;

/// Mean sentence length band that scores full marks for fluency.
pub const FLUENCY_LENGTH_BAND: (f64, f64) = (12.0, 22.0);
/// Mean sentence length at or beyond which the length fit reaches zero.
pub const FLUENCY_LENGTH_LIMIT: f64 = 44.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    KeywordStuffing,
    CiteSources,
    StatisticsAddition,
    QuotationAddition,
    EasyToUnderstand,
    FluencyOptimization,
    UniqueWords,
    TechnicalTerms,
    AuthoritativeTone,
}

impl Strategy {
    /// All strategies in catalogue order.
    pub const ALL: [Strategy; 9] = [
        Strategy::KeywordStuffing,
        Strategy::CiteSources,
        Strategy::StatisticsAddition,
        Strategy::QuotationAddition,
        Strategy::EasyToUnderstand,
        Strategy::FluencyOptimization,
        Strategy::UniqueWords,
        Strategy::TechnicalTerms,
        Strategy::AuthoritativeTone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::KeywordStuffing => "Keyword Stuffing",
            Strategy::CiteSources => "Cite Sources",
            Strategy::StatisticsAddition => "Statistics Addition",
            Strategy::QuotationAddition => "Quotation Addition",
            Strategy::EasyToUnderstand => "Easy-to-Understand",
            Strategy::FluencyOptimization => "Fluency Optimization",
            Strategy::UniqueWords => "Unique Words",
            Strategy::TechnicalTerms => "Technical Terms",
            Strategy::AuthoritativeTone => "Authoritative Tone",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Strategy::KeywordStuffing => "Increase the density of target keywords.",
            Strategy::CiteSources => "Add inline references to authoritative external sources.",
            Strategy::StatisticsAddition => "Embed quantitative data points and percentages.",
            Strategy::QuotationAddition => "Quote recognized experts, regulators and publications.",
            Strategy::EasyToUnderstand => "Simplify language and improve readability.",
            Strategy::FluencyOptimization => "Improve sentence structure and flow.",
            Strategy::UniqueWords => "Diversify vocabulary and reduce repetition.",
            Strategy::TechnicalTerms => "Use domain-specific terminology.",
            Strategy::AuthoritativeTone => "Write in a confident, declarative register.",
        }
    }

    /// Unit of [`StrategyScore::raw_value`].
    pub fn unit(self) -> &'static str {
        match self {
            Strategy::KeywordStuffing | Strategy::QuotationAddition | Strategy::UniqueWords => "ratio",
            Strategy::CiteSources
            | Strategy::StatisticsAddition
            | Strategy::TechnicalTerms
            | Strategy::AuthoritativeTone => "per 100 words",
            Strategy::EasyToUnderstand => "Flesch reading ease",
            Strategy::FluencyOptimization => "mean words per sentence",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = |x: &str| x.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase();
        let wanted = key(s);
        Strategy::ALL
            .into_iter()
            .find(|st| key(st.name()) == wanted)
            .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyScore {
    pub strategy: Strategy,
    #[serde(serialize_with = "fixed::serialize")]
    pub raw_value: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub normalized: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluencyStats {
    #[serde(serialize_with = "fixed::serialize")]
    pub mean_sentence_length: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub coefficient_of_variation: f64,
}

/// Nine strategy scores for one document, in catalogue order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyProfile {
    pub scores: Vec<StrategyScore>,
    pub token_count: usize,
    pub sentence_count: usize,
    pub fluency: FluencyStats,
}

impl StrategyProfile {
    pub fn score(&self, strategy: Strategy) -> StrategyScore {
        *self
            .scores
            .iter()
            .find(|s| s.strategy == strategy)
            .expect("profile holds every strategy")
    }
}

const DEFAULT_TECHNICAL_TERMS: &[&str] = &[
    "rtp", "return to player", "house edge", "volatility", "wagering requirement", "licence",
    "license", "licensed", "kyc", "aml", "anti-money laundering", "self-exclusion", "gamstop",
    "responsible gambling", "safer gambling", "lccp", "ukgc", "gambling commission", "odds",
    "in-play", "cash out", "accumulator", "payout", "rng", "random number generator", "audit",
    "compliance", "regulator", "regulatory", "jurisdiction", "affordability check",
];

const DEFAULT_HEDGES: &[&str] = &[
    "might", "may", "perhaps", "possibly", "probably", "could", "arguably", "seems", "seem",
    "apparently", "likely", "unlikely", "somewhat", "maybe", "suggests", "appears", "i think",
    "we believe", "it is possible",
];

const DEFAULT_DECLARATIVE: &[&str] = &[
    "must", "will", "requires", "required", "ensures", "confirms", "confirmed", "demonstrates",
    "establishes", "guarantees", "always", "never", "clearly", "proves", "mandates", "verified",
    "certified", "is licensed", "is regulated", "complies",
];

/// Lexicons and keyword list used by the detectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzerConfig {
    pub keywords: Lexicon,
    pub technical_terms: Lexicon,
    pub hedge_words: Lexicon,
    pub declarative_markers: Lexicon,
    /// Added to the segmenter's built-in abbreviations.
    pub abbreviations: Vec<String>,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        Self {
            keywords: Lexicon::default(),
            technical_terms: Lexicon::new(DEFAULT_TECHNICAL_TERMS),
            hedge_words: Lexicon::new(DEFAULT_HEDGES),
            declarative_markers: Lexicon::new(DEFAULT_DECLARATIVE),
            abbreviations: Vec::new(),
        }
    }
}

impl AnalyzerConfig {
    pub const KEYS: &'static [&'static str] = &[
        "keywords",
        "keywords_file",
        "technical_terms",
        "technical_terms_file",
        "hedge_words",
        "hedge_words_file",
        "declarative_markers",
        "declarative_markers_file",
        "abbreviations",
    ];

    /// Overlays the keys present in `section` onto `self`. Lists replace
    /// the current lexicon; `<name>_file` keys name one-term-per-line files.
    pub fn apply(&mut self, section: &Section<'_>) -> Result<(), ConfigError> {
        section.deny_unknown(Self::KEYS)?;
        for (name, slot) in [
            ("keywords", &mut self.keywords),
            ("technical_terms", &mut self.technical_terms),
            ("hedge_words", &mut self.hedge_words),
            ("declarative_markers", &mut self.declarative_markers),
        ] {
            if let Some(list) = section.list_or_file(name)? {
                *slot = Lexicon::new(list);
            }
        }
        if let Some(list) = section.string_list("abbreviations")? {
            self.abbreviations = list;
        }
        Ok(())
    }

    /// Loads a standalone analyzer config file (TOML or JSON).
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(&origin, e.to_string()))?;
        let table = crate::config::parse_table(&text, &origin)?;
        let mut cfg = Self::default();
        cfg.apply(&Section::new("", &table, path.parent()))?;
        Ok(cfg)
    }

    pub fn segmenter(&self) -> Segmenter {
        Segmenter::default().with_abbreviations(self.abbreviations.iter().cloned())
    }
}

fn cap(value: f64, cap: f64) -> f64 {
    (value / cap).clamp(0.0, 1.0)
}

/// Fit of the mean sentence length to [`FLUENCY_LENGTH_BAND`], damped by
/// sentence-length variation above zero.
pub fn fluency_score(mean: f64, cv: f64) -> f64 {
    let (lo, hi) = FLUENCY_LENGTH_BAND;
    let length_fit = if mean < lo {
        mean / lo
    } else if mean <= hi {
        1.0
    } else {
        (FLUENCY_LENGTH_LIMIT - mean) / (FLUENCY_LENGTH_LIMIT - hi)
    };
    (length_fit.clamp(0.0, 1.0) * (1.0 - 0.5 * cv.min(1.0))).clamp(0.0, 1.0)
}

/// Scores plain text against all nine strategies.
pub fn strategy_profile(text: &str, config: &AnalyzerConfig) -> Result<StrategyProfile, AnalysisError> {
    let segmenter = config.segmenter();
    let clean = strip_citation_markers(text);
    let tokens = text::normalized_words(&clean);
    if tokens.is_empty() {
        return Err(AnalysisError::Undefined("strategy profile of text with no words"));
    }
    let sentences = segmenter.segment(&clean);
    let lengths: Vec<usize> = sentences.iter().map(|s| s.word_count).collect();
    let (mean, cv) = fluency_proxy(&lengths)?;

    let keyword = keyword_density(&tokens, &config.keywords);
    let citations = citation_density(text);
    let statistics = statistics_density(&clean);
    let quotes = quotation_share(&clean);
    let flesch = readability_score(&clean, &segmenter)?;
    let diversity = lexical_diversity(&tokens);
    let technical = lexicon_density(&tokens, &config.technical_terms);
    let tone = authoritative_tone(&tokens, &config.declarative_markers, &config.hedge_words);

    let score = |strategy, raw_value: f64, normalized: f64| StrategyScore {
        strategy,
        raw_value,
        normalized: normalized.clamp(0.0, 1.0),
    };
    let scores = Strategy::ALL
        .into_iter()
        .map(|s| match s {
            Strategy::KeywordStuffing => score(s, keyword, keyword),
            Strategy::CiteSources => score(s, citations, cap(citations, CITATION_CAP)),
            Strategy::StatisticsAddition => score(s, statistics, cap(statistics, STATISTICS_CAP)),
            Strategy::QuotationAddition => score(s, quotes, quotes),
            Strategy::EasyToUnderstand => score(s, flesch, flesch / 100.0),
            Strategy::FluencyOptimization => score(s, mean, fluency_score(mean, cv)),
            Strategy::UniqueWords => score(s, diversity, diversity),
            Strategy::TechnicalTerms => score(s, technical, cap(technical, TECHNICAL_CAP)),
            Strategy::AuthoritativeTone => score(s, tone, cap(tone, TONE_CAP)),
        })
        .collect();
    Ok(StrategyProfile {
        scores,
        token_count: tokens.len(),
        sentence_count: sentences.len(),
        fluency: FluencyStats {
            mean_sentence_length: mean,
            coefficient_of_variation: cv,
        },
    })
}

/// Machine-scannability checks: heading outline and sourcing of numeric
/// claims.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScannabilityReport {
    pub heading_count: usize,
    /// Headings that jump more than one level below the previous heading.
    pub heading_level_skips: usize,
    /// Sentences containing a number.
    pub numeric_claims: usize,
    /// Numeric sentences that also carry a reference.
    pub sourced_numeric_claims: usize,
    #[serde(serialize_with = "fixed::option::serialize")]
    pub sourced_claim_share: Option<f64>,
}

pub fn scannability(document: &Document, config: &AnalyzerConfig) -> ScannabilityReport {
    let heading_level_skips = document
        .headings
        .windows(2)
        .filter(|w| w[1].level > w[0].level + 1)
        .count();
    let segmenter = config.segmenter();
    let (mut numeric_claims, mut sourced) = (0, 0);
    for chunk in segmenter.raw_sentences(&document.text) {
        if numeric_tokens(&strip_citation_markers(chunk)).0 > 0 {
            numeric_claims += 1;
            if count_references(chunk) > 0 {
                sourced += 1;
            }
        }
    }
    ScannabilityReport {
        heading_count: document.headings.len(),
        heading_level_skips,
        numeric_claims,
        sourced_numeric_claims: sourced,
        sourced_claim_share: (numeric_claims > 0).then(|| sourced as f64 / numeric_claims as f64),
    }
}

/// Profile, recommendations and scannability for one document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContentAnalysis {
    pub profile: StrategyProfile,
    pub recommendations: Vec<Recommendation>,
    pub scannability: ScannabilityReport,
}

pub fn analyze_document(
    document: &Document,
    config: &AnalyzerConfig,
    priors: &[StrategyPrior],
) -> Result<ContentAnalysis, AnalysisError> {
    let profile = strategy_profile(&document.text, config)?;
    let recommendations = recommend_strategies(&profile, priors)?;
    Ok(ContentAnalysis {
        scannability: scannability(document, config),
        profile,
        recommendations,
    })
}

impl ContentAnalysis {
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("## Strategy profile\n\n| Strategy | Raw | Unit | Score |\n|---|---:|---|---:|\n");
        for s in &self.profile.scores {
            out.push_str(&format!(
                "| {} | {:.2} | {} | {:.2} |\n",
                s.strategy,
                s.raw_value,
                s.strategy.unit(),
                s.normalized
            ));
        }
        out.push_str(&format!(
            "\n{} words in {} sentences.\n\n## Recommendations\n\n",
            self.profile.token_count, self.profile.sentence_count
        ));
        out.push_str(&recommendations_markdown(&self.recommendations));
        let sc = &self.scannability;
        out.push_str(&format!(
            "\n## Scannability\n\n- headings: {} ({} level skips)\n- numeric claims with a reference: {} of {}\n",
            sc.heading_count, sc.heading_level_skips, sc.sourced_numeric_claims, sc.numeric_claims
        ));
        out
    }
}
