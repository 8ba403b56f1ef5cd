//! Per-source visibility metrics over a single answer, plus brand-level
//! citation frequency and owned/earned citation shares.
//!
//! For a source `c` cited by the set of sentences `S`, with `|s|` the word
//! count of sentence `s` and `W` the word count of the whole answer:
//!
//! ```text
//! imp_wc(c)      = Σ_{s∈S} |s| / W
//! imp_pos_adj(c) = Σ_{s∈S} |s| · exp(−pos(s)) / W
//! ```
//!
//! `pos(s)` is the sentence index divided by the sentence count by default,
//! so an answer's last sentence is weighted `exp(−(n−1)/n)` regardless of
//! length. [`PositionMode::RawIndex`] uses the bare index instead. A sentence
//! that cites several sources credits its full word count to each of them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed;
use crate::transcript::{ResponseTranscript, SentenceSpan, SourceRecord};

use crate::transcript::domain_matches;

/// Reference band for the owned share of citations in commercial queries.
pub const OWNED_SHARE_REFERENCE_BAND: (f64, f64) = (0.15, 0.20);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("source [{0}] is not listed in the transcript")]
    UnknownSource(u32),
    #[error("metric is undefined for a transcript with zero words")]
    ZeroWords,
    #[error("metric is undefined over an empty run set")]
    EmptyRuns,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("brand {0:?} has no owned domains")]
    NoDomains(String),
    #[error("brand {0:?} lists an empty domain")]
    EmptyDomain(String),
    #[error("invalid brand registry: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionMode {
    /// `index / max(1, sentence_count)`, always in `[0, 1)`.
    #[default]
    Normalized,
    /// The bare zero-based sentence index.
    RawIndex,
}

impl PositionMode {
    pub fn position(self, index: usize, sentence_count: usize) -> f64 {
        match self {
            PositionMode::Normalized => index as f64 / sentence_count.max(1) as f64,
            PositionMode::RawIndex => index as f64,
        }
    }
}

/// A brand and the domains it controls.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RegistryFile", into = "RegistryFile")]
pub struct BrandRegistry {
    brand_name: String,
    owned_domains: BTreeSet<String>,
    competitor: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    brand: String,
    owned_domains: Vec<String>,
    #[serde(default)]
    competitor: bool,
}

impl TryFrom<RegistryFile> for BrandRegistry {
    type Error = RegistryError;

    fn try_from(f: RegistryFile) -> Result<Self, Self::Error> {
        BrandRegistry::new(f.brand, f.owned_domains, f.competitor)
    }
}

impl From<BrandRegistry> for RegistryFile {
    fn from(r: BrandRegistry) -> Self {
        RegistryFile {
            brand: r.brand_name,
            owned_domains: r.owned_domains.into_iter().collect(),
            competitor: r.competitor,
        }
    }
}

impl BrandRegistry {
    pub fn new<I, S>(brand_name: impl Into<String>, domains: I, competitor: bool) -> Result<Self, RegistryError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let brand_name = brand_name.into();
        let mut owned_domains = BTreeSet::new();
        for d in domains {
            let d = d.as_ref().trim().trim_end_matches('.').to_lowercase();
            if d.is_empty() {
                return Err(RegistryError::EmptyDomain(brand_name));
            }
            owned_domains.insert(d);
        }
        if owned_domains.is_empty() {
            return Err(RegistryError::NoDomains(brand_name));
        }
        Ok(Self {
            brand_name,
            owned_domains,
            competitor,
        })
    }

    pub fn brand_name(&self) -> &str {
        &self.brand_name
    }

    pub fn owned_domains(&self) -> &BTreeSet<String> {
        &self.owned_domains
    }

    pub fn is_competitor(&self) -> bool {
        self.competitor
    }

    /// True for an owned domain or any subdomain of one.
    pub fn owns(&self, domain: &str) -> bool {
        !domain.is_empty() && self.owned_domains.iter().any(|o| domain_matches(domain, o))
    }

    pub fn classify(&self, source: &SourceRecord) -> Ownership {
        if source.url.is_empty() || source.domain.is_empty() {
            Ownership::Unknown
        } else if self.owns(&source.domain) {
            Ownership::Owned
        } else {
            Ownership::Earned
        }
    }
}

/// Parses a registry file holding either one registry object or an array.
pub fn parse_registries(json: &str) -> Result<Vec<BrandRegistry>, RegistryError> {
    let value: serde_json::Value =
        serde_json::from_str(json).map_err(|e| RegistryError::Format(e.to_string()))?;
    let parsed = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|r| vec![r])
    };
    parsed.map_err(|e| RegistryError::Format(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ownership {
    Owned,
    Earned,
    Unknown,
}

impl fmt::Display for Ownership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ownership::Owned => "owned",
            Ownership::Earned => "earned",
            Ownership::Unknown => "unknown",
        })
    }
}

fn impression_where(
    transcript: &ResponseTranscript,
    cites: impl Fn(&SentenceSpan) -> bool,
    position: Option<PositionMode>,
) -> Result<f64, MetricError> {
    let total = transcript.total_word_count();
    if total == 0 {
        return Err(MetricError::ZeroWords);
    }
    let n = transcript.sentences.len();
    let numerator: f64 = transcript
        .sentences
        .iter()
        .filter(|s| cites(s))
        .map(|s| {
            let weight = position.map_or(1.0, |mode| (-mode.position(s.index, n)).exp());
            s.word_count as f64 * weight
        })
        .fold(0.0, |acc, x| acc + x);
    Ok(numerator / total as f64)
}

fn require_source(transcript: &ResponseTranscript, source_id: u32) -> Result<(), MetricError> {
    transcript
        .source(source_id)
        .map(|_| ())
        .ok_or(MetricError::UnknownSource(source_id))
}

/// Share of the answer's words in sentences citing `source_id`.
pub fn impression_word_count(transcript: &ResponseTranscript, source_id: u32) -> Result<f64, MetricError> {
    require_source(transcript, source_id)?;
    impression_where(transcript, |s| s.cites(source_id), None)
}

/// Position-adjusted word count impression with normalized positions.
pub fn impression_position_adjusted(transcript: &ResponseTranscript, source_id: u32) -> Result<f64, MetricError> {
    impression_position_adjusted_with(transcript, source_id, PositionMode::Normalized)
}

pub fn impression_position_adjusted_with(
    transcript: &ResponseTranscript,
    source_id: u32,
    mode: PositionMode,
) -> Result<f64, MetricError> {
    require_source(transcript, source_id)?;
    impression_where(transcript, |s| s.cites(source_id), Some(mode))
}

fn owned_ids(transcript: &ResponseTranscript, registry: &BrandRegistry) -> BTreeSet<u32> {
    transcript
        .sources
        .iter()
        .filter(|s| registry.classify(s) == Ownership::Owned)
        .map(|s| s.marker_id)
        .collect()
}

/// Position-adjusted impression of a whole brand: sentences citing any of
/// its owned sources, each counted once.
pub fn brand_impression(
    transcript: &ResponseTranscript,
    registry: &BrandRegistry,
    mode: PositionMode,
) -> Result<f64, MetricError> {
    let owned = owned_ids(transcript, registry);
    impression_where(
        transcript,
        |s| s.cited_source_ids.iter().any(|id| owned.contains(id)),
        Some(mode),
    )
}

/// True when some sentence cites a source the brand owns.
pub fn cites_brand(transcript: &ResponseTranscript, registry: &BrandRegistry) -> bool {
    transcript
        .cited_sources()
        .any(|s| registry.classify(s) == Ownership::Owned)
}

/// Share of transcripts that cite the brand at least once.
pub fn citation_frequency<'a, I>(transcripts: I, registry: &BrandRegistry) -> Result<f64, MetricError>
where
    I: IntoIterator<Item = &'a ResponseTranscript>,
{
    let (runs, citing) = transcripts.into_iter().fold((0usize, 0usize), |(n, c), t| {
        (n + 1, c + usize::from(cites_brand(t, registry)))
    });
    if runs == 0 {
        return Err(MetricError::EmptyRuns);
    }
    Ok(citing as f64 / runs as f64)
}

/// Where the owned share sits relative to [`OWNED_SHARE_REFERENCE_BAND`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OwnedShareBand {
    NoCitations,
    BelowBand,
    WithinBand,
    AboveBand,
}

impl OwnedShareBand {
    pub fn for_share(owned: f64, cited: usize) -> Self {
        let (lo, hi) = OWNED_SHARE_REFERENCE_BAND;
        if cited == 0 {
            OwnedShareBand::NoCitations
        } else if owned < lo {
            OwnedShareBand::BelowBand
        } else if owned <= hi {
            OwnedShareBand::WithinBand
        } else {
            OwnedShareBand::AboveBand
        }
    }
}

impl fmt::Display for OwnedShareBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OwnedShareBand::NoCitations => "no citations",
            OwnedShareBand::BelowBand => "below 15-20% reference band",
            OwnedShareBand::WithinBand => "within 15-20% reference band",
            OwnedShareBand::AboveBand => "above 15-20% reference band",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OwnershipBreakdown {
    #[serde(serialize_with = "fixed::serialize")]
    pub owned: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub earned: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub unknown: f64,
    pub owned_count: usize,
    pub earned_count: usize,
    pub unknown_count: usize,
    /// Distinct sources cited at least once.
    pub cited_sources: usize,
    pub band: OwnedShareBand,
}

/// Classifies every cited source as owned, earned or unknown.
pub fn ownership_breakdown(transcript: &ResponseTranscript, registry: &BrandRegistry) -> OwnershipBreakdown {
    let (mut owned, mut earned, mut unknown) = (0usize, 0usize, 0usize);
    for source in transcript.cited_sources() {
        match registry.classify(source) {
            Ownership::Owned => owned += 1,
            Ownership::Earned => earned += 1,
            Ownership::Unknown => unknown += 1,
        }
    }
    let cited = owned + earned + unknown;
    let share = |k: usize| if cited == 0 { 0.0 } else { k as f64 / cited as f64 };
    OwnershipBreakdown {
        owned: share(owned),
        earned: share(earned),
        unknown: share(unknown),
        owned_count: owned,
        earned_count: earned,
        unknown_count: unknown,
        cited_sources: cited,
        band: OwnedShareBand::for_share(share(owned), cited),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceVisibility {
    pub marker_id: u32,
    pub domain: String,
    pub class: Ownership,
    #[serde(serialize_with = "fixed::serialize")]
    pub imp_wc: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub imp_pos_adj: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub brand: String,
    pub position_mode: PositionMode,
    pub sources: Vec<SourceVisibility>,
    pub ownership: OwnershipBreakdown,
}

pub const CSV_HEADER: &str = "marker_id,domain,class,imp_wc,imp_pos_adj";

impl VisibilityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for s in &self.sources {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.marker_id,
                s.domain,
                s.class,
                fixed::six_places(s.imp_wc),
                fixed::six_places(s.imp_pos_adj)
            ));
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("## Visibility: {}\n\n", self.brand);
        out.push_str("| marker | domain | class | imp_wc | imp_pos_adj |\n|---:|---|---|---:|---:|\n");
        for s in &self.sources {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                s.marker_id,
                s.domain,
                s.class,
                fixed::six_places(s.imp_wc),
                fixed::six_places(s.imp_pos_adj)
            ));
        }
        let o = &self.ownership;
        out.push_str(&format!(
            "\nOwned {} / earned {} / unknown {} of {} cited sources ({}).\n",
            fixed::six_places(o.owned),
            fixed::six_places(o.earned),
            fixed::six_places(o.unknown),
            o.cited_sources,
            o.band
        ));
        out
    }
}

pub fn visibility_report(transcript: &ResponseTranscript, registry: &BrandRegistry) -> Result<VisibilityReport, MetricError> {
    visibility_report_with(transcript, registry, PositionMode::Normalized)
}

pub fn visibility_report_with(
    transcript: &ResponseTranscript,
    registry: &BrandRegistry,
    mode: PositionMode,
) -> Result<VisibilityReport, MetricError> {
    let sources = transcript
        .sources
        .iter()
        .map(|s| {
            Ok(SourceVisibility {
                marker_id: s.marker_id,
                domain: s.domain.clone(),
                class: registry.classify(s),
                imp_wc: impression_word_count(transcript, s.marker_id)?,
                imp_pos_adj: impression_position_adjusted_with(transcript, s.marker_id, mode)?,
            })
        })
        .collect::<Result<Vec<_>, MetricError>>()?;
    if transcript.total_word_count() == 0 {
        return Err(MetricError::ZeroWords);
    }
    Ok(VisibilityReport {
        brand: registry.brand_name().to_string(),
        position_mode: mode,
        sources,
        ownership: ownership_breakdown(transcript, registry),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcript::{parse_transcript_file, SentenceSpan};
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;

    fn transcript(text: &str, urls: &[&str]) -> ResponseTranscript {
        let sources: Vec<String> = urls
            .iter()
            .enumerate()
            .map(|(i, u)| format!(r#"{{"id":{},"url":"{}"}}"#, i + 1, u))
            .collect();
        let json = format!(
            r#"{{"query":"q","engine":"e","captured_at":"2026-01-01T00:00:00Z","text":"{}","sources":[{}]}}"#,
            text,
            sources.join(",")
        );
        parse_transcript_file(json.as_bytes()).unwrap()
    }

    fn worked() -> ResponseTranscript {
        transcript(
            "Bet365 holds a UKGC licence [1]. It offers live casino [1][2]. Slots too.",
            &["https://bet365.com", "https://news.co.uk", "https://x.org"],
        )
    }

    fn registry(domains: &[&str]) -> BrandRegistry {
        BrandRegistry::new("brand", domains.iter().copied(), false).unwrap()
    }

    #[test]
    fn worked_example_impressions() {
        let t = worked();
        let wc = impression_word_count(&t, 1).unwrap();
        assert!((wc - 9.0 / 11.0).abs() < 1e-15);
        // frozen from an mpmath evaluation at 30 digits
        let p1 = impression_position_adjusted(&t, 1).unwrap();
        assert!((p1 - 0.715102294754105).abs() < 1e-12, "{p1}");
        let p2 = impression_position_adjusted(&t, 2).unwrap();
        assert!((p2 - 0.260556840208651).abs() < 1e-12, "{p2}");
        assert_eq!(impression_word_count(&t, 3).unwrap(), 0.0);
        assert_eq!(impression_position_adjusted(&t, 3).unwrap(), 0.0);
    }

    #[test]
    fn single_sentence_scores_one() {
        let t = transcript("Only one line here [1].", &["https://a.com"]);
        assert_eq!(impression_word_count(&t, 1).unwrap(), 1.0);
        assert_eq!(impression_position_adjusted(&t, 1).unwrap(), 1.0);
    }

    #[test]
    fn raw_index_mode_decays_faster() {
        let t = worked();
        let raw = impression_position_adjusted_with(&t, 2, PositionMode::RawIndex).unwrap();
        assert!((raw - 4.0 * (-1.0f64).exp() / 11.0).abs() < 1e-15);
    }

    #[test]
    fn errors_for_unknown_source_and_empty_transcript() {
        let t = worked();
        assert_eq!(impression_word_count(&t, 9), Err(MetricError::UnknownSource(9)));
        let empty = transcript("", &["https://a.com"]);
        assert_eq!(impression_word_count(&empty, 1), Err(MetricError::ZeroWords));
        assert_eq!(impression_position_adjusted(&empty, 1), Err(MetricError::ZeroWords));
        assert!(matches!(
            visibility_report(&empty, &registry(&["a.com"])),
            Err(MetricError::ZeroWords)
        ));
    }

    #[test]
    fn ownership_example_flags_band() {
        let t = transcript(
            "Brand pays fast [1]. Reviewers agree [2]. Licensed [3].",
            &[
                "https://brand.com/x",
                "https://news.co.uk/y",
                "https://www.gamblingcommission.gov.uk/z",
            ],
        );
        let b = ownership_breakdown(&t, &registry(&["brand.com"]));
        assert!((b.owned - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.earned - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(b.unknown, 0.0);
        assert_eq!(b.band, OwnedShareBand::AboveBand);
    }

    #[test]
    fn subdomains_count_as_owned() {
        let t = transcript("Promo [1].", &["https://promo.brand.com/offer"]);
        let b = ownership_breakdown(&t, &registry(&["brand.com"]));
        assert_eq!(b.owned, 1.0);
    }

    #[test]
    fn empty_url_is_unknown_and_no_citations_flagged() {
        let t = transcript("Hidden [1]. Also [2].", &["", "https://e.com"]);
        let b = ownership_breakdown(&t, &registry(&["brand.com"]));
        assert_eq!((b.owned, b.earned, b.unknown), (0.0, 0.5, 0.5));

        let none = transcript("Nothing cited here.", &[]);
        let b = ownership_breakdown(&none, &registry(&["brand.com"]));
        assert_eq!(b.band, OwnedShareBand::NoCitations);
        assert_eq!((b.owned, b.earned, b.unknown), (0.0, 0.0, 0.0));
        let report = visibility_report(&none, &registry(&["brand.com"])).unwrap();
        assert!(report.sources.is_empty());
    }

    #[test]
    fn band_edges() {
        assert_eq!(OwnedShareBand::for_share(0.1, 10), OwnedShareBand::BelowBand);
        assert_eq!(OwnedShareBand::for_share(0.15, 20), OwnedShareBand::WithinBand);
        assert_eq!(OwnedShareBand::for_share(0.2, 5), OwnedShareBand::WithinBand);
        assert_eq!(OwnedShareBand::for_share(0.25, 4), OwnedShareBand::AboveBand);
    }

    #[test]
    fn citation_frequency_counts_citing_runs() {
        let citing = transcript("Brand [1].", &["https://brand.com"]);
        let other = transcript("Other [1].", &["https://other.com"]);
        let listed_not_cited = transcript("Nothing.", &["https://brand.com"]);
        let mut runs = vec![citing.clone(); 4];
        runs.extend(vec![other.clone(); 5]);
        runs.push(listed_not_cited);
        let r = registry(&["brand.com"]);
        assert!((citation_frequency(&runs, &r).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(citation_frequency(&runs, &registry(&["nowhere.net"])).unwrap(), 0.0);
        assert_eq!(citation_frequency(&vec![citing; 3], &r).unwrap(), 1.0);
        assert_eq!(citation_frequency(&[], &r), Err(MetricError::EmptyRuns));
    }

    #[test]
    fn impressions_do_not_depend_on_registry() {
        let t = worked();
        let a = visibility_report(&t, &registry(&["bet365.com"])).unwrap();
        let b = visibility_report(&t, &BrandRegistry::new("rival", ["news.co.uk"], true).unwrap()).unwrap();
        for (x, y) in a.sources.iter().zip(&b.sources) {
            assert_eq!((x.imp_wc, x.imp_pos_adj), (y.imp_wc, y.imp_pos_adj));
        }
        assert_ne!(a.sources[0].class, b.sources[0].class);
    }

    #[test]
    fn brand_impression_counts_each_sentence_once() {
        let t = transcript(
            "Both owned [1][2]. Neither. Third [3].",
            &["https://brand.com", "https://shop.brand.com", "https://x.org"],
        );
        let r = registry(&["brand.com"]);
        let got = brand_impression(&t, &r, PositionMode::Normalized).unwrap();
        assert!((got - 2.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn csv_and_json_use_six_places() {
        let report = visibility_report(&worked(), &registry(&["bet365.com"])).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("1,bet365.com,owned,0.818182,0.715102"));
        assert_eq!(lines.next(), Some("2,news.co.uk,earned,0.363636,0.260557"));
        assert_eq!(lines.next(), Some("3,x.org,earned,0.000000,0.000000"));
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains(r#""imp_pos_adj":0.715102"#), "{json}");
        assert!(json.contains(r#""owned":0.500000"#), "{json}");
        let back: VisibilityReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.sources.len(), 3);
    }

    #[test]
    fn registry_validation() {
        assert!(matches!(
            BrandRegistry::new("x", Vec::<String>::new(), false),
            Err(RegistryError::NoDomains(_))
        ));
        let r = BrandRegistry::new("x", ["Brand.COM "], false).unwrap();
        assert!(r.owned_domains().contains("brand.com"));
        let many = parse_registries(
            r#"[{"brand":"a","owned_domains":["a.com"]},{"brand":"b","owned_domains":["b.com"],"competitor":true}]"#,
        )
        .unwrap();
        assert_eq!(many.len(), 2);
        assert!(many[1].is_competitor());
        let err = parse_registries(r#"{"brand":"a","owned_domains":[]}"#).unwrap_err();
        assert!(err.to_string().contains("no owned domains"), "{err}");
        assert!(parse_registries(r#"{"brand":"a","domains":["a.com"]}"#).is_err());
    }

    prop_compose! {
        fn arb_transcript()(
            sentences in prop::collection::vec(
                (0usize..12, prop::collection::btree_set(1u32..=4, 0..3)),
                1..8,
            )
        ) -> ResponseTranscript {
            let sentences = sentences
                .into_iter()
                .enumerate()
                .map(|(index, (words, cited))| {
                    let text = vec!["w"; words].join(" ");
                    SentenceSpan { index, word_count: words, text, cited_source_ids: cited }
                })
                .collect();
            ResponseTranscript {
                query: "q".into(),
                engine_id: "e".into(),
                captured_at: Utc.with_ymd_and_hms(2026, 1, 1, 0, 0, 0).unwrap(),
                sentences,
                sources: (1..=4)
                    .map(|id| SourceRecord::new(id, &format!("https://s{id}.com"), None).unwrap())
                    .collect(),
            }
        }
    }

    proptest! {
        #[test]
        fn impressions_are_bounded(t in arb_transcript(), id in 1u32..=4) {
            prop_assume!(t.total_word_count() > 0);
            let wc = impression_word_count(&t, id).unwrap();
            let pos = impression_position_adjusted(&t, id).unwrap();
            prop_assert!(0.0 <= pos && pos <= wc + 1e-15 && wc <= 1.0 + 1e-15);
        }

        #[test]
        fn removing_a_citation_never_increases_impressions(t in arb_transcript(), id in 1u32..=4, which in 0usize..8) {
            prop_assume!(t.total_word_count() > 0);
            let mut removed = t.clone();
            let i = which % removed.sentences.len();
            removed.sentences[i].cited_source_ids.remove(&id);
            prop_assert!(impression_word_count(&removed, id).unwrap() <= impression_word_count(&t, id).unwrap());
            prop_assert!(
                impression_position_adjusted(&removed, id).unwrap()
                    <= impression_position_adjusted(&t, id).unwrap()
            );
        }

        #[test]
        fn ownership_shares_partition(t in arb_transcript(), owned in prop::collection::btree_set(1u32..=4, 1..3)) {
            let domains: Vec<String> = owned.iter().map(|id| format!("s{id}.com")).collect();
            let b = ownership_breakdown(&t, &BrandRegistry::new("b", domains, false).unwrap());
            if b.cited_sources > 0 {
                prop_assert!((b.owned + b.earned + b.unknown - 1.0).abs() < 1e-12);
            }
        }
    }
}
