use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use schmidt_core::diophantine::{badness_scan_with, trajectory_minima_with, AffineSystem};
use schmidt_core::exec::Execution;
use schmidt_core::lattice::FlowSchedule;
use schmidt_core::Scalar;

fn modes() -> [(&'static str, Execution); 2] {
    [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)]
}

fn badness(c: &mut Criterion) {
    let golden = AffineSystem::scalar(Scalar::named("golden", 256).unwrap(), Scalar::zero());
    let third = AffineSystem::scalar(Scalar::ratio(1, 3), Scalar::ratio(1, 6));
    let mut g = c.benchmark_group("badness_scan");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new("golden_1e5", name), &exec, |b, &e| {
            b.iter(|| badness_scan_with(&golden, 100_000, e))
        });
        g.bench_with_input(BenchmarkId::new("third_sixth_1e5", name), &exec, |b, &e| {
            b.iter(|| badness_scan_with(&third, 100_000, e))
        });
    }
    g.finish();
}

fn trajectory(c: &mut Criterion) {
    let f = FlowSchedule::new(1, 1, Scalar::ratio(1, 2)).unwrap();
    let sys = AffineSystem::scalar(Scalar::ratio(1, 3), Scalar::ratio(1, 6));
    let mut g = c.benchmark_group("trajectory_minima");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new("third_sixth_L40", name), &exec, |b, &e| {
            b.iter(|| trajectory_minima_with(&sys, &f, 40, e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, badness, trajectory);
criterion_main!(benches);
