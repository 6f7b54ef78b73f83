use criterion::{criterion_group, criterion_main, Criterion};

use dressing_bench::{dressed, free_base, working_grid};
use dressing_core::greens::{discrete_g_hierarchy, g_convolution_check, xi_pair};
use dressing_core::numerics::{differentiate, SampledFunction};
use dressing_core::schrodinger::{reflection_transmission, shoot_bound_states, PotentialModel};

fn bench_shooting(c: &mut Criterion) {
    let d = dressed(2);
    c.bench_function("shoot-bound-states/2", |b| {
        b.iter(|| shoot_bound_states(d.u_n(), 2.5, 1e-9).unwrap())
    });
}

fn bench_scattering(c: &mut Criterion) {
    let u = PotentialModel::gaussian_barrier(working_grid(), 0.5, 1.0).unwrap();
    c.bench_function("reflection-transmission/k=1", |b| {
        b.iter(|| reflection_transmission(&u, 1.0).unwrap())
    });
}

fn bench_xi_pair(c: &mut Criterion) {
    let u = free_base();
    c.bench_function("xi-pair/free", |b| b.iter(|| xi_pair(&u, -1.0).unwrap()));
}

fn bench_differentiate(c: &mut Criterion) {
    let f = SampledFunction::from_fn(working_grid(), |x| (-x * x / 8.0).exp()).unwrap();
    for order in [1usize, 2, 3] {
        c.bench_function(&format!("differentiate/order-{order}"), |b| {
            b.iter(|| differentiate(&f, order).unwrap())
        });
    }
}

fn bench_convolution(c: &mut Criterion) {
    let d = dressed(1);
    let h = discrete_g_hierarchy(&d, 1.0, 1, true).unwrap();
    let mut group = c.benchmark_group("greens-convolution");
    group.sample_size(10);
    group.bench_function("n=1", |b| b.iter(|| g_convolution_check(&h, 0).unwrap()));
    group.finish();
}

criterion_group!(
    benches,
    bench_shooting,
    bench_scattering,
    bench_xi_pair,
    bench_differentiate,
    bench_convolution
);
criterion_main!(benches);
