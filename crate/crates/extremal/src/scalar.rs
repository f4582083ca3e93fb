//! Scalar field abstraction: real (`f64`) or complex (`Complex<f64>`) entries.

use nalgebra::{Complex, ComplexField};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::fmt::sci17;

/// Entry type of vectors and operators. Both fields share `f64` as the
/// underlying real field, so norms, multipliers and all diagnostics are
/// plain doubles regardless of the entry type.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + 'static {
    const IS_COMPLEX: bool;

    /// Standard Gaussian draw; for complex entries both parts are Gaussian.
    /// Used for sphere sampling, where only the direction matters.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// JSON representation of one entry: a bare number for real scalars,
    /// a `[re, im]` pair for complex ones. Numbers carry 17 significant digits.
    fn json_repr(&self) -> String;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn json_repr(&self) -> String {
        sci17(*self)
    }
}

impl Scalar for Complex<f64> {
    const IS_COMPLEX: bool = true;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    fn json_repr(&self) -> String {
        format!("[{},{}]", sci17(self.re), sci17(self.im))
    }
}

/// Real pairing `[u|v] = Re <u|v>` of the underlying real prehilbertian
/// structure. Coincides with the ordinary inner product over the reals.
pub fn real_pairing<S: Scalar>(
    u: &nalgebra::DVector<S>,
    v: &nalgebra::DVector<S>,
) -> f64 {
    u.dotc(v).real()
}
