//! Seeded synthetic inputs for the benchmarks: answers, articles, JSON-LD
//! documents and run store entries of any size.

use chrono::{DateTime, Duration, TimeZone, Utc};
use geometer_core::bench::{run_id, StoreEntry};
use geometer_core::entity::SourceDocument;
use geometer_core::metrics::visibility_report;
use geometer_core::transcript::{ResponseTranscript, Segmenter, SourceRecord, TranscriptMeta};
use geometer_core::{BrandRegistry, QueryTag, RunRecord};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const WORDS: &[&str] = &[
    "casino", "odds", "payout", "licence", "players", "bonus", "wagering", "regulator", "review", "fast", "safe",
    "mobile", "app", "football", "slots", "poker", "live", "dealer", "withdrawal", "limits", "support", "fair",
];

const DOMAINS: &[&str] = &[
    "brand.example", "news.example", "blog.example", "forum.example", "wiki.example", "review.example",
    "press.example", "guide.example",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sentence(rng: &mut ChaCha8Rng, words: usize) -> String {
    let mut s: Vec<&str> = (0..words).map(|_| *WORDS.choose(rng).unwrap()).collect();
    s[0] = "Players";
    s.join(" ")
}

/// Answer text with `sentences` sentences, each citing up to two of
/// `sources` sources.
pub fn answer_text(rng: &mut ChaCha8Rng, sentences: usize, sources: u32) -> String {
    (0..sentences)
        .map(|_| {
            let words = rng.gen_range(6..24);
            let mut s = sentence(rng, words);
            for _ in 0..rng.gen_range(0..=2) {
                s.push_str(&format!(" [{}]", rng.gen_range(1..=sources)));
            }
            s.push('.');
            s
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn sources(count: u32) -> Vec<SourceRecord> {
    (1..=count)
        .map(|id| {
            let domain = DOMAINS[(id as usize - 1) % DOMAINS.len()];
            SourceRecord::new(id, &format!("https://www.{domain}/page/{id}"), None).unwrap()
        })
        .collect()
}

pub fn transcript(rng: &mut ChaCha8Rng, sentences: usize, source_count: u32) -> ResponseTranscript {
    let meta = TranscriptMeta {
        query: "best uk casino".into(),
        engine_id: "synthetic".into(),
        captured_at: Utc.with_ymd_and_hms(2026, 1, 1, 0, 0, 0).unwrap(),
    };
    let text = answer_text(rng, sentences, source_count);
    ResponseTranscript::from_parts(meta, &text, sources(source_count), &Segmenter::new()).unwrap()
}

pub fn registry() -> BrandRegistry {
    BrandRegistry::new("Brand", ["brand.example"], false).unwrap()
}

/// Markdown article of roughly `words` words with headings, figures,
/// quotes and references mixed in.
pub fn article(rng: &mut ChaCha8Rng, words: usize) -> String {
    let mut out = String::from("# Choosing a casino\n\n");
    let mut written = 0;
    let mut section = 1;
    while written < words {
        if written / 120 >= section {
            out.push_str(&format!("\n## Section {section}\n\n"));
            section += 1;
        }
        let n = rng.gen_range(8..22);
        let mut s = sentence(rng, n);
        match rng.gen_range(0..6) {
            0 => s.push_str(&format!(" at {}% RTP", rng.gen_range(90..99))),
            1 => s.push_str(" \"according to the regulator\""),
            2 => s.push_str(" (Gambling Commission, 2024)"),
            3 => s.push_str(" [1]"),
            _ => {}
        }
        out.push_str(&s);
        out.push_str(". ");
        written += n;
    }
    out
}

/// A JSON-LD organization in the shape a well-marked-up operator page has.
pub fn organization(i: usize) -> Value {
    json!({
        "@context": "https://schema.org",
        "@type": "Organization",
        "@id": format!("https://operator{i}.example/#org"),
        "name": format!("Operator {i}"),
        "url": format!("https://operator{i}.example/"),
        "identifier": {"@type": "PropertyValue", "propertyID": "UKGC", "value": format!("{}", 10000 + i)},
        "sameAs": [
            format!("https://www.gamblingcommission.gov.uk/public-register/business/detail/{}", 10000 + i),
            format!("https://find-and-update.company-information.service.gov.uk/company/{i:08}"),
            format!("https://uk.trustpilot.com/review/operator{i}.example")
        ],
        "parentOrganization": {"@type": "Organization", "@id": "https://group.example/#org", "name": "Group plc"},
        "employee": [{"@type": "Person", "name": format!("Officer {i}"), "jobTitle": "Compliance Officer"}],
        "makesOffer": [
            {"@type": "Offer", "itemOffered": {"@type": "Service", "name": "Sportsbook", "serviceType": "Sports Betting"}},
            {"@type": "Offer", "itemOffered": {"@type": "Service", "name": "Tables", "serviceType": "Live Casino"}}
        ],
        "aggregateRating": {"@type": "AggregateRating", "ratingValue": "4.2", "reviewCount": "90"},
        "award": "Operator of the Year"
    })
}

/// `pages` documents describing `operators` organizations, round robin.
pub fn documents(pages: usize, operators: usize) -> Vec<SourceDocument> {
    (0..pages)
        .map(|p| SourceDocument::new(format!("page{p}.html"), vec![organization(p % operators.max(1))]))
        .collect()
}

/// An HTML page embedding `blocks` JSON-LD script blocks.
pub fn html_page(blocks: usize) -> String {
    let mut out = String::from("<!doctype html><html><head><title>t</title>\n");
    for i in 0..blocks {
        out.push_str("<!-- structured data -->\n<script type=\"application/ld+json\">");
        out.push_str(&organization(i).to_string());
        out.push_str("</script>\n");
    }
    out.push_str("</head><body><p>content</p></body></html>");
    out
}

/// `count` run records, one hour apart, from a handful of engines and
/// queries.
pub fn run_entries(rng: &mut ChaCha8Rng, count: usize) -> Vec<StoreEntry> {
    let start: DateTime<Utc> = Utc.with_ymd_and_hms(2026, 1, 1, 0, 0, 0).unwrap();
    let registry = registry();
    (0..count)
        .map(|i| {
            let timestamp = start + Duration::hours(i as i64);
            let engine = format!("engine{}", i % 3);
            let query = format!("q{}", i % 7);
            let mut t = transcript(rng, 6, 4);
            t.engine_id = engine.clone();
            t.captured_at = timestamp;
            let report = visibility_report(&t, &registry).unwrap();
            StoreEntry::Run(RunRecord {
                run_id: run_id(&engine, &query, &timestamp),
                timestamp,
                engine_id: engine,
                query_id: query,
                tag: if i % 2 == 0 { QueryTag::Category } else { QueryTag::Branded },
                transcript: t,
                reports: vec![report],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use geometer_core::entity::{build_entity_graph, clarity_report, extract_jsonld};
    use geometer_core::ClarityConfig;

    #[test]
    fn generators_are_seeded() {
        assert_eq!(answer_text(&mut rng(1), 5, 3), answer_text(&mut rng(1), 5, 3));
        assert_eq!(article(&mut rng(2), 200), article(&mut rng(2), 200));
    }

    #[test]
    fn transcripts_have_the_requested_shape() {
        let t = transcript(&mut rng(3), 12, 5);
        assert_eq!(t.sentences.len(), 12);
        assert_eq!(t.sources.len(), 5);
        t.validate().unwrap();
    }

    #[test]
    fn synthetic_organizations_score_full_marks() {
        let report = clarity_report(&build_entity_graph(&documents(3, 3)), &ClarityConfig::default());
        assert_eq!(report.composite, 100.0);
        assert_eq!(extract_jsonld(&html_page(4)).entities.len(), 4);
    }

    #[test]
    fn run_entries_are_hourly() {
        let entries = run_entries(&mut rng(4), 5);
        assert_eq!(entries.len(), 5);
    }
}
