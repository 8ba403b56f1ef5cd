use std::hint::black_box;

use chrono::{TimeZone, Utc};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use geometer_bench::{registry, rng, run_entries};
use geometer_core::bench::{benchmark_report, read_runs, RunFilter};
use geometer_core::{PositionMode, RunStore, TimeWindow};

fn append(c: &mut Criterion) {
    let entries = run_entries(&mut rng(21), 100);
    c.bench_function("run_store/append_100", |b| {
        b.iter_batched(
            || tempfile::tempdir().unwrap(),
            |dir| RunStore::new(dir.path().join("s.jsonl")).append(black_box(&entries)).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn read_and_report(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let store = RunStore::new(dir.path().join("s.jsonl"));
    store.append(&run_entries(&mut rng(22), 1_000)).unwrap();
    c.bench_function("run_store/read_1000", |b| b.iter(|| read_runs(black_box(&store), &RunFilter::default()).unwrap()));

    let records = read_runs(&store, &RunFilter::default()).unwrap().records;
    let day = |d| Utc.with_ymd_and_hms(2026, 1, d, 0, 0, 0).unwrap();
    let a = TimeWindow::new(day(1), day(15)).unwrap();
    let b = TimeWindow::new(day(15), day(31)).unwrap();
    let registries = [registry()];
    c.bench_function("benchmark_report/1000", |bench| {
        bench.iter(|| benchmark_report(black_box(&records), &registries, a, b, PositionMode::Normalized).unwrap())
    });
}

criterion_group!(benches, append, read_and_report);
criterion_main!(benches);
