//! Seeded random instances shared by the unit tests.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operators::{Operator, Problem};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Orthogonal factor from the QR of a Gaussian matrix.
pub(crate) fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    g.qr().q()
}

/// Full-rank operator with singular values log-uniform in
/// `[sigma_max / cond, sigma_max]`, so the condition number never
/// exceeds `cond`.
pub(crate) fn random_operator(rng: &mut ChaCha8Rng, n: usize, cond: f64) -> Operator<f64> {
    let u = random_orthogonal(rng, n);
    let v = random_orthogonal(rng, n);
    let sigma_max = 10f64.powf(rng.random_range(-0.3..0.3));
    let span = cond.log10();
    let sigma = DVector::from_fn(n, |i, _| {
        if i == 0 {
            sigma_max
        } else {
            sigma_max * 10f64.powf(rng.random_range(-span..0.0))
        }
    });
    Operator::new(u * DMatrix::from_diagonal(&sigma) * v.transpose()).unwrap()
}

/// Feasible instance on a random operator: unit-scale center, epsilon a
/// moderate fraction of its norm.
pub(crate) fn random_problem(rng: &mut ChaCha8Rng, n: usize, cond: f64) -> Problem<f64> {
    let op = random_operator(rng, n, cond);
    let mut x0 = gaussian_vector(rng, n);
    x0 /= x0.norm();
    x0 *= rng.random_range(0.5..2.0);
    let epsilon = rng.random_range(0.1..0.9) * x0.norm();
    Problem::new(op, x0, epsilon).unwrap()
}
