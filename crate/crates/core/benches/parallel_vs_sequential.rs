use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polya_threshold::consensus::{expected_stationary_exact, expected_stationary_mc};
use polya_threshold::{Execution, UrnParams};

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn exact_enumeration(c: &mut Criterion) {
    let params = UrnParams::new(5.0, 5.0, 2.0).unwrap();
    let mut group = c.benchmark_group("pi_e_exact_n16");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| expected_stationary_exact(&params, 16, 24, exec).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let params = UrnParams::new(5.0, 5.0, 2.0).unwrap();
    let mut group = c.benchmark_group("pi_e_monte_carlo_n100_10k");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| expected_stationary_mc(&params, 100, 10_000, 1, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exact_enumeration, monte_carlo);
criterion_main!(benches);
