use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use geometer_bench::{article, rng};
use geometer_core::content::{analyze_document, default_priors, strategy_profile, Document};
use geometer_core::AnalyzerConfig;

fn profiles(c: &mut Criterion) {
    let config = AnalyzerConfig::default();
    let mut group = c.benchmark_group("strategy_profile");
    for words in [200, 2_000, 20_000] {
        let text = article(&mut rng(11), words);
        group.throughput(Throughput::Bytes(text.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(words), &text, |b, text| {
            b.iter(|| strategy_profile(black_box(text), &config))
        });
    }
    group.finish();
}

fn full_analysis(c: &mut Criterion) {
    let config = AnalyzerConfig::default();
    let priors = default_priors();
    let doc = Document::markdown(&article(&mut rng(12), 1_500));
    c.bench_function("analyze_document/1500", |b| b.iter(|| analyze_document(black_box(&doc), &config, &priors)));
}

criterion_group!(benches, profiles, full_analysis);
criterion_main!(benches);
