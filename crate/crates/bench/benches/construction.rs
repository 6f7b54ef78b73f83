use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dressing_bench::{dressed, free_base, seeds, working_grid};
use dressing_core::dressing::{dress, kernel, undress};
use dressing_core::evolution::{snapshot, AlphaSchedule};
use dressing_core::numerics::ComplexSampledFunction;

fn bench_dress(c: &mut Criterion) {
    let u0 = free_base();
    let mut group = c.benchmark_group("dress");
    for n in [1usize, 2, 3] {
        let s = seeds(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| {
            b.iter(|| dress(&u0, s).unwrap())
        });
    }
    group.finish();
}

fn bench_undress(c: &mut Criterion) {
    let d = dressed(2);
    c.bench_function("undress/2", |b| b.iter(|| undress(&d).unwrap()));
}

fn bench_kernel(c: &mut Criterion) {
    let d = dressed(2);
    c.bench_function("kernel/2", |b| b.iter(|| kernel(&d)));
}

fn bench_snapshot(c: &mut Criterion) {
    let u0 = free_base();
    let s = seeds(2);
    let sched = AlphaSchedule::LaxPower {
        exponent: 1,
        betas: None,
    };
    c.bench_function("snapshot/kdv-2", |b| {
        b.iter(|| snapshot(&u0, &s, &sched, 0.1).unwrap())
    });
}

fn bench_continuum_transform(c: &mut Criterion) {
    let d = dressed(2);
    let wave = ComplexSampledFunction::plane_wave(working_grid(), 1.0);
    c.bench_function("continuum-transform/2", |b| {
        b.iter(|| dressing_core::dressing::continuum_transform(&d, &wave, 1.0).unwrap())
    });
}

criterion_group!(
    benches,
    bench_dress,
    bench_undress,
    bench_kernel,
    bench_snapshot,
    bench_continuum_transform
);
criterion_main!(benches);
