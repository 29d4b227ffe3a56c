use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use fiberloop_bench::{bench_detector, bench_source};
use fiberloop_core::detector::{response_matrix, response_matrix_from_efficiencies};
use fiberloop_core::fisher::equivalent_efficiency;
use fiberloop_core::reconstruct::{em_reconstruct, EmOptions};
use fiberloop_core::simulate::sample_events;

fn response_matrix_bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("response_matrix");
    group.bench_function("s3_k10", |b| {
        let config = bench_detector();
        b.iter(|| response_matrix(black_box(&config), black_box(10)).unwrap());
    });
    group.bench_function("s8_k10", |b| {
        let etas = vec![0.1; 8];
        b.iter(|| response_matrix_from_efficiencies(black_box(&etas), black_box(10)).unwrap());
    });
    group.finish();
}

fn simulate_bench(c: &mut Criterion) {
    c.bench_function("sample_events_1e5", |b| {
        let config = bench_detector();
        let rho = bench_source(5);
        b.iter(|| sample_events(black_box(&rho), black_box(&config), 100_000, 42).unwrap());
    });
}

fn reconstruct_bench(c: &mut Criterion) {
    let config = bench_detector();
    let rho = bench_source(3);
    let matrix = response_matrix(&config, 3).unwrap();
    let hist = sample_events(&rho, &config, 50_000, 7).unwrap();
    let freqs = hist.frequencies();
    c.bench_function("em_reconstruct_5e4", |b| {
        b.iter_batched(
            || freqs.clone(),
            |f| em_reconstruct(&matrix, &f, None, &EmOptions::default()).unwrap(),
            BatchSize::SmallInput,
        );
    });
}

fn equivalent_efficiency_bench(c: &mut Criterion) {
    let config = bench_detector();
    let rho = bench_source(3);
    c.bench_function("equivalent_efficiency", |b| {
        b.iter(|| equivalent_efficiency(black_box(&config), black_box(&rho)).unwrap());
    });
}

criterion_group!(
    benches,
    response_matrix_bench,
    simulate_bench,
    reconstruct_bench,
    equivalent_efficiency_bench
);
criterion_main!(benches);
