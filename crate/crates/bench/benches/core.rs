use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hbt_core::correlator::{convolve, correction_from_g, renewal_invert};
use hbt_core::simulator::{simulate_intensity, start_stop_histogram, PhotonStream};
use hbt_core::theory::{g_theoretical, SourceModel};

fn chaotic_g(num_bins: usize) -> hbt_core::ProbabilitySeries {
    let model = SourceModel::chaotic(0.04, 0.5).unwrap();
    g_theoretical(&model, 0.1, num_bins).unwrap()
}

fn correlator(c: &mut Criterion) {
    let mut group = c.benchmark_group("correlator");
    for num_bins in [250, 1000, 4000] {
        let g = chaotic_g(num_bins);
        group.bench_with_input(BenchmarkId::new("renewal_invert", num_bins), &g, |b, g| {
            b.iter(|| renewal_invert(black_box(g)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("convolve", num_bins), &g, |b, g| {
            b.iter(|| convolve(black_box(g), black_box(g)).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("correction_order9", num_bins),
            &g,
            |b, g| b.iter(|| correction_from_g(black_box(g), 0.004, 9).unwrap()),
        );
    }
    group.finish();
}

fn simulator(c: &mut Criterion) {
    let model = SourceModel::chaotic(0.04, 0.5).unwrap();
    c.bench_function("simulate_intensity_10us", |b| {
        b.iter(|| simulate_intensity(&model, 0.025, black_box(1e4), 1).unwrap())
    });

    // Two Poisson-like streams of ~40k events over 1 ms.
    let stream = |offset: u64| {
        let tags: Vec<u64> = (0..40_000u64)
            .map(|i| i * 25_000 + (i * 7919 + offset) % 20_000)
            .collect();
        PhotonStream::new(tags, 1_000_000_000).unwrap()
    };
    let (starts, stops) = (stream(0), stream(3_331));
    c.bench_function("start_stop_histogram_80k", |b| {
        b.iter(|| start_stop_histogram(black_box(&starts), black_box(&stops), 0.1, 100.0).unwrap())
    });
}

criterion_group!(benches, correlator, simulator);
criterion_main!(benches);
