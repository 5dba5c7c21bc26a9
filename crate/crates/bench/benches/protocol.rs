use std::hint::black_box;

use clustersync::engine::{advance, run_until};
use clustersync::experiments::{preset_large, preset_small};
use clustersync::topology::{metropolis_weights, second_largest_singular_value, spectral_summary};
use clustersync::AdjacencyGraph;
use clustersync_bench::Fixture;
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

fn bench_advance(c: &mut Criterion) {
    let mut group = c.benchmark_group("advance");
    for (name, spec) in [("small", preset_small()), ("large", preset_large())] {
        let fx = Fixture::new(spec);
        group.bench_function(name, |b| {
            b.iter_batched_ref(
                || fx.state.clone(),
                |state| advance(state, &fx.network, fx.config.steps),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn bench_spectral(c: &mut Criterion) {
    let small = Fixture::new(preset_small());
    c.bench_function("spectral_summary/small", |b| {
        b.iter(|| spectral_summary(black_box(&small.network), 10).unwrap())
    });
    // above the dense limit, so this exercises power iteration
    let ring = metropolis_weights(&AdjacencyGraph::ring(600).unwrap()).unwrap();
    let mut group = c.benchmark_group("sigma");
    group.sample_size(10);
    group.bench_function("ring600", |b| {
        b.iter(|| second_largest_singular_value(black_box(&ring)).unwrap())
    });
    group.finish();
}

fn bench_run_until(c: &mut Criterion) {
    let fx = Fixture::new(preset_small());
    c.bench_function("run_until/small", |b| {
        b.iter(|| run_until(&fx.network, &fx.config, fx.spec.threshold).unwrap())
    });
}

criterion_group!(benches, bench_advance, bench_spectral, bench_run_until);
criterion_main!(benches);
