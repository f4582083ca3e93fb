//! Minimal-norm solutions under a residual ball constraint.
//!
//! For a full-row-rank linear map `T`, a center `x0`, and a radius
//! `0 < epsilon < ||x0||`, there is a unique vector `y` of minimal norm
//! with `||Ty - x0|| <= epsilon`. It sits on the constraint boundary,
//! satisfies the stationarity identity `T*(Ty - x0) = r y` for a single
//! negative multiplier `r`, and its image `Ty` is confined to the
//! spherical cap `||Ty||^2 <= ||x0||^2 - epsilon^2`. This crate computes
//! that vector, quantifies each of those conditions, and exposes the
//! machinery used to study how the solution moves with `epsilon` and
//! with the center:
//!
//! - [`operators`]: dense real or complex operators, validated problem
//!   instances, problem-document parsing.
//! - [`solver`]: the discrepancy iteration ([`solve_extremal`]) solving
//!   `||Ty(lambda) - x0|| = epsilon` in the regularization parameter
//!   `lambda = -r`, plus the stationarity report ([`kkt_verify`]).
//! - [`sweeps`]: epsilon, ray, and direction sweeps, continuity and
//!   smoothness probes, CSV emission.
//! - [`oracle`]: independent brute-force searches (boundary angle scan,
//!   seeded sphere sampling, parameter bisection) that certify the
//!   solver on small instances.
//!
//! Grid sweeps and the sampling oracle evaluate independent points
//! concurrently when the default `parallel` feature is enabled; outputs
//! are bit-identical with and without it.

// Guards written as `!(x > 0.0)` are deliberate: they reject NaN together
// with the wrong sign.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fmt;
pub mod operators;
pub mod oracle;
pub mod scalar;
pub mod solver;
pub mod sweeps;

#[cfg(test)]
pub(crate) mod testgen;

pub use error::{Error, Result};
pub use operators::{load_problem, AnyProblem, Operator, Problem};
pub use oracle::{
    angle_grid_oracle_2d, boundary_sample_oracle, boundary_sample_oracle_sequential, compare,
    lambda_grid_oracle, ComparisonReport, OracleMethod, OracleResult,
};
pub use scalar::{real_pairing, Scalar};
pub use solver::{kkt_verify, residual_at, solve_extremal, ExtremalResult, KktReport, SolverConfig};
pub use sweeps::{
    continuity_probe, geometric_grid, linear_grid, smoothness_probe, sweep_direction,
    sweep_epsilon, sweep_epsilon_sequential, sweep_ray, Curve, CurveSample, ProbeReport, ProbeRow,
};
