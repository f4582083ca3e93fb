//! Seeded random instances shared by the integration suites.

use extremal::{Operator, Problem};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    let mut v = gaussian_vector(rng, n);
    let norm = v.norm();
    v /= norm;
    v
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    g.qr().q()
}

/// Full-rank operator with singular values log-uniform in
/// `[sigma_max / cond_max, sigma_max]`, so the condition number never
/// exceeds `cond_max`.
pub fn random_operator(rng: &mut ChaCha8Rng, n: usize, cond_max: f64) -> Operator<f64> {
    let u = random_orthogonal(rng, n);
    let v = random_orthogonal(rng, n);
    let sigma_max = 10f64.powf(rng.random_range(-0.3..0.3));
    let span = cond_max.log10();
    let sigma = DVector::from_fn(n, |i, _| {
        if i == 0 {
            sigma_max
        } else {
            sigma_max * 10f64.powf(rng.random_range(-span..0.0))
        }
    });
    Operator::new(u * DMatrix::from_diagonal(&sigma) * v.transpose()).unwrap()
}

/// Feasible instance with the center norm drawn from `norm_range` and
/// epsilon drawn as a `frac_range` fraction of it.
pub fn random_problem_in(
    rng: &mut ChaCha8Rng,
    n: usize,
    cond_max: f64,
    norm_range: (f64, f64),
    frac_range: (f64, f64),
) -> Problem<f64> {
    let op = random_operator(rng, n, cond_max);
    let mut x0 = random_unit(rng, n);
    x0 *= rng.random_range(norm_range.0..norm_range.1);
    let epsilon = rng.random_range(frac_range.0..frac_range.1) * x0.norm();
    Problem::new(op, x0, epsilon).unwrap()
}

pub fn random_problem(rng: &mut ChaCha8Rng, n: usize, cond_max: f64) -> Problem<f64> {
    random_problem_in(rng, n, cond_max, (0.5, 2.0), (0.1, 0.9))
}
