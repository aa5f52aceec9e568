//! Throughput of the parallel-mapped workloads.
//!
//! Run with the default features for the rayon path and with
//! `--no-default-features` for the sequential fallback; the numbers are
//! directly comparable because both modes produce bit-identical results.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use elastic_cache::adversary::random_adversary_search;
use elastic_cache::multifile::{analytic_multifile_ratio, simulate_multifile, ZipfCatalog};
use elastic_cache::trace_io::generate_zipf_trace;
use elastic_cache::{
    BandSpec, CostParams, CurvePolicy, DistFamily, PolicySpec, SimOptions, TraceCostModel,
};

fn bench_multifile_analytic(c: &mut Criterion) {
    let mut group = c.benchmark_group("multifile-analytic-ratio");
    for &n_files in &[10_000usize, 100_000] {
        let catalog = ZipfCatalog::new(n_files, 1.0, 5.6 * n_files as f64, DistFamily::Exponential)
            .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n_files), &catalog, |b, cat| {
            b.iter(|| {
                analytic_multifile_ratio(
                    black_box(cat),
                    1.0,
                    1.0,
                    1.0,
                    CurvePolicy::SingleWindowMth { m: 2 },
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_adversary_search(c: &mut Criterion) {
    let policy = PolicySpec::single_window_mth(2, 1.0).unwrap();
    let costs = CostParams::new(1.0).unwrap();
    let mut group = c.benchmark_group("adversary-search");
    group.sample_size(20);
    group.bench_function("512-trials", |b| {
        b.iter(|| random_adversary_search(black_box(&policy), &costs, 512, 99).unwrap())
    });
    group.finish();
}

fn bench_multifile_simulation(c: &mut Criterion) {
    let catalog = ZipfCatalog::new(2000, 1.0, 2000.0, DistFamily::Exponential).unwrap();
    let trace = generate_zipf_trace(&catalog, 50.0, 7).unwrap();
    let models = [
        TraceCostModel::OfflineOptimal,
        TraceCostModel::StaticOracle,
        TraceCostModel::Policy(PolicySpec::single_window_mth(2, 1.0).unwrap()),
    ];
    let costs = CostParams::new(1.0).unwrap();
    let mut group = c.benchmark_group("multifile-simulation");
    group.sample_size(30);
    group.bench_function(format!("{}-requests", trace.request_count()), |b| {
        b.iter(|| {
            simulate_multifile(
                black_box(&trace),
                &models,
                &costs,
                &SimOptions::default(),
                &BandSpec::default(),
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_multifile_analytic,
    bench_adversary_search,
    bench_multifile_simulation
);
criterion_main!(benches);
