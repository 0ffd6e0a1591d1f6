use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spectral_series::prelude::*;
use spectral_series_bench::symmetric_kernel;

const J: usize = 30;

fn eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigendecompose");
    group.sample_size(10);
    for n in [250usize, 500, 1000] {
        let a = symmetric_kernel(n, 10, 1);
        group.bench_with_input(BenchmarkId::new("full", n), &a, |b, a| {
            b.iter(|| eigendecompose(a.as_ref(), J, &EigenMethod::Full).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("randomized", n), &a, |b, a| {
            b.iter(|| eigendecompose(a.as_ref(), J, &EigenMethod::randomized(7)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, eigen);
criterion_main!(benches);
