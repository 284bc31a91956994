use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use std::hint::black_box;

use lowstar_bench::fixture;
use lowstar_core::{compute_beta, reduce, Algo, Ensemble, Execution, PmsOptions, TraceSink};

fn reducers(c: &mut Criterion) {
    let matrix = fixture(Ensemble::Gaussian3d, 12, 1, 5.0, 4);
    let mut group = c.benchmark_group("reduce");
    group.sample_size(20);
    for algo in Algo::ALL {
        group.bench_with_input(BenchmarkId::from_parameter(algo), &matrix, |b, m| {
            b.iter_batched(
                || m.clone(),
                |mut m| reduce(algo, &mut m, &PmsOptions::default(), &mut TraceSink::disabled(algo)).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    for workers in [2, 4] {
        let opts = PmsOptions {
            execution: Execution::Parallel { workers },
            ..PmsOptions::default()
        };
        group.bench_with_input(BenchmarkId::new("pms-parallel", workers), &matrix, |b, m| {
            b.iter_batched(
                || m.clone(),
                |mut m| reduce(Algo::Pms, &mut m, &opts, &mut TraceSink::disabled(Algo::Pms)).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn beta(c: &mut Criterion) {
    let matrix = fixture(Ensemble::Trefoil, 40, 3, 1.5, 3);
    c.bench_function("compute_beta", |b| b.iter(|| compute_beta(black_box(&matrix))));
}

criterion_group!(benches, reducers, beta);
criterion_main!(benches);
