use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dsurf::canon::canonize_with;
use dsurf::dnum::DNum;
use dsurf::exec::Exec;
use dsurf::gallery;
use dsurf::geom::FdConfig;

fn sweep(c: &mut Criterion) {
    let s2 = gallery::s2();
    let mut group = c.benchmark_group("sweep_s2");
    group.sample_size(20);
    for n in [32usize, 64] {
        for exec in [Exec::Sequential, Exec::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &n, |b, &n| {
                b.iter(|| s2.sweep(n, n, exec, FdConfig::default()).unwrap())
            });
        }
    }
    group.finish();
}

fn canon(c: &mut Criterion) {
    let s5 = gallery::s5();
    let mut group = c.benchmark_group("canonize_s5");
    group.sample_size(20);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| canonize_with(&s5, DNum::new(1.5, 0.0), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, canon);
criterion_main!(benches);
