use criterion::{criterion_group, criterion_main, Criterion};
use gsek::kernels::{gauss_weierstrass, resolvent_kernel, sharp_kernel};
use gsek::quantities::{k_potential_value, s_value, sup_s, SupOptions};
use gsek::{parse, QuadConfig, SpacePoint};
use std::hint::black_box;

fn kernels(c: &mut Criterion) {
    let x = SpacePoint::new(vec![0.1, -0.4, 0.3]).unwrap();
    let y = SpacePoint::new(vec![1.2, 0.5, -0.7]).unwrap();
    c.bench_function("gauss_weierstrass d3", |b| b.iter(|| gauss_weierstrass(black_box(0.7), &x, &y)));
    c.bench_function("sharp_kernel d3", |b| b.iter(|| sharp_kernel(black_box(1.0), &x, &y)));
    c.bench_function("resolvent_kernel d2", |b| {
        let x2 = SpacePoint::new(vec![0.1, -0.4]).unwrap();
        let z2 = SpacePoint::new(vec![1.2, 0.5]).unwrap();
        let a2 = SpacePoint::new(vec![0.3, 0.2]).unwrap();
        b.iter(|| resolvent_kernel(black_box(0.5), &a2, &x2, &z2))
    });
}

fn functionals(c: &mut Criterion) {
    let cfg = QuadConfig::with_tol(1e-8, 1e-6);
    let ball3 = parse("ball:1,1", 3).unwrap();
    let x = SpacePoint::new(vec![0.2, 0.1, 0.0]).unwrap();
    let y = SpacePoint::new(vec![-0.3, 0.4, 0.1]).unwrap();
    c.bench_function("s_value ball d3", |b| b.iter(|| s_value(&ball3, black_box(1.0), &x, &y, &cfg)));
    let k = SpacePoint::new(vec![2.0, 0.0, 0.0]).unwrap();
    c.bench_function("k_potential_value ball d3", |b| b.iter(|| k_potential_value(&ball3, black_box(1.0), &x, &k, &cfg)));
    let ball1 = parse("ball:1,1", 1).unwrap();
    let mut g = c.benchmark_group("sups");
    g.sample_size(10);
    g.bench_function("sup_s ball d1", |b| b.iter(|| sup_s(&ball1, black_box(1.0), &cfg, &SupOptions::default())));
    g.finish();
}

criterion_group!(benches, kernels, functionals);
criterion_main!(benches);
