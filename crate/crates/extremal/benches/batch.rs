//! Compares the concurrent grid evaluation against the single-thread
//! path on the two workloads that fan out: an epsilon sweep over a
//! mid-size operator, and the boundary sampling oracle.
//!
//! Build with `--no-default-features` to measure the build without the
//! rayon dependency; in that build both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use extremal::{
    boundary_sample_oracle, boundary_sample_oracle_sequential, linear_grid, sweep_epsilon,
    sweep_epsilon_sequential, Operator, SolverConfig,
};

fn shifted_random(rng: &mut ChaCha8Rng, n: usize) -> Operator<f64> {
    let mut m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    for i in 0..n {
        m[(i, i)] += n as f64;
    }
    Operator::new(m).unwrap()
}

fn bench_epsilon_sweep(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 48;
    let op = shifted_random(&mut rng, n);
    let x0 = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let x0_norm = x0.norm();
    let grid = linear_grid(0.1 * x0_norm, 0.9 * x0_norm, 64).unwrap();
    let config = SolverConfig::default();

    let mut group = c.benchmark_group("epsilon_sweep_64x48");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| sweep_epsilon(black_box(&op), black_box(&x0), &grid, &config).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| sweep_epsilon_sequential(black_box(&op), black_box(&x0), &grid, &config).unwrap())
    });
    group.finish();
}

fn bench_boundary_oracle(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let op = shifted_random(&mut rng, 4);
    let x0 = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
    let epsilon = 0.4 * x0.norm();

    let mut group = c.benchmark_group("boundary_oracle_2e5x4");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            boundary_sample_oracle(black_box(&op), black_box(&x0), epsilon, 200_000, 7).unwrap()
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            boundary_sample_oracle_sequential(black_box(&op), black_box(&x0), epsilon, 200_000, 7)
                .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_epsilon_sweep, bench_boundary_oracle);
criterion_main!(benches);
