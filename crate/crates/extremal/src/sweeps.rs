//! One-parameter families of extremal problems: epsilon sweeps, ray and
//! direction sweeps of the center, and the continuity and smoothness
//! probes, all emitting plot-ready CSV.
//!
//! Grid points are independent solves over a shared immutable operator;
//! with the `parallel` feature they are evaluated concurrently and
//! reassembled in grid order, so the output does not depend on
//! scheduling. A sweep whose grid contains an invalid or non-converging
//! point aborts as a whole, naming the offending point; partial curves
//! would poison the monotonicity checks built on top of them.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fmt::sci17;
use crate::operators::{Operator, Problem};
use crate::scalar::Scalar;
use crate::solver::{solve_extremal, ExtremalResult, SolverConfig};

/// One point of a parameter sweep.
#[derive(Clone, Debug)]
pub struct CurveSample<S: Scalar> {
    pub param: f64,
    pub y_norm: f64,
    pub r: f64,
    /// Achieved `||Ty - x0||` at this point.
    pub residual: f64,
    /// The extremal vector itself, for callers that re-verify samples.
    pub y: Option<DVector<S>>,
}

/// Ordered samples of a one-parameter family; params strictly increasing,
/// every sample from a converged solve.
#[derive(Clone, Debug)]
pub struct Curve<S: Scalar> {
    pub parameter_name: String,
    pub samples: Vec<CurveSample<S>>,
}

impl<S: Scalar> Curve<S> {
    /// CSV with header `param,y_norm,r,residual`, one sample per line,
    /// 17-significant-digit scientific notation, line-feed terminated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,y_norm,r,residual\n");
        for s in &self.samples {
            out.push_str(&sci17(s.param));
            out.push(',');
            out.push_str(&sci17(s.y_norm));
            out.push(',');
            out.push_str(&sci17(s.r));
            out.push(',');
            out.push_str(&sci17(s.residual));
            out.push('\n');
        }
        out
    }
}

/// One row of a probe: the step, the measured quantity, and the derived
/// verdict number for that row (difference of norms for continuity,
/// Richardson ratio of the following triple for smoothness).
#[derive(Clone, Debug)]
pub struct ProbeRow {
    pub step: f64,
    pub measurement: f64,
    pub derived: Option<f64>,
}

/// Evidence table of a regularity probe; steps strictly decreasing
/// toward zero.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub probe_kind: String,
    pub rows: Vec<ProbeRow>,
}

impl ProbeReport {
    /// CSV with header `step,measurement`, formatted like [`Curve::to_csv`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,measurement\n");
        for row in &self.rows {
            out.push_str(&sci17(row.step));
            out.push(',');
            out.push_str(&sci17(row.measurement));
            out.push('\n');
        }
        out
    }
}

/// Inclusive, uniformly spaced grid with exact endpoints.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid count must be at least 2, got {count}"
        )));
    }
    if !(start.is_finite() && stop.is_finite() && stop > start) {
        return Err(Error::InvalidConfig(format!(
            "grid requires finite stop > start, got [{start}, {stop}]"
        )));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect())
}

/// Inclusive, geometrically spaced grid with exact endpoints; requires
/// `0 < start < stop`.
pub fn geometric_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid count must be at least 2, got {count}"
        )));
    }
    if !(start > 0.0 && start.is_finite() && stop.is_finite() && stop > start) {
        return Err(Error::InvalidConfig(format!(
            "geometric grid requires finite stop > start > 0, got [{start}, {stop}]"
        )));
    }
    let log_start = start.ln();
    let log_step = (stop.ln() - log_start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                start
            } else if i + 1 == count {
                stop
            } else {
                (log_start + log_step * i as f64).exp()
            }
        })
        .collect())
}

fn require_grid(grid: &[f64], order: &'static str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("grid must be non-empty".into()));
    }
    for (i, &v) in grid.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::at_grid_point(i, v, Error::NonFinite { context: "grid" }));
        }
    }
    for (i, pair) in grid.windows(2).enumerate() {
        let ok = match order {
            "strictly increasing" => pair[1] > pair[0],
            _ => pair[1] < pair[0],
        };
        if !ok {
            return Err(Error::GridOrder {
                order,
                index: i + 1,
            });
        }
    }
    Ok(())
}

/// Runs `f` over grid points, concurrently when the `parallel` feature is
/// enabled and `parallel` is true. Results come back in grid order; on
/// failure the error of the earliest offending grid point is returned
/// regardless of scheduling.
fn grid_map<T, F>(items: &[f64], parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, f64) -> Result<T> + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        let results: Vec<Result<T>> = items
            .par_iter()
            .copied()
            .enumerate()
            .map(|(i, v)| f(i, v))
            .collect();
        let mut out = Vec::with_capacity(results.len());
        for result in results {
            out.push(result?);
        }
        return Ok(out);
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    items
        .iter()
        .copied()
        .enumerate()
        .map(|(i, v)| f(i, v))
        .collect()
}

fn sample_from<S: Scalar>(param: f64, result: ExtremalResult<S>) -> CurveSample<S> {
    CurveSample {
        param,
        y_norm: result.y_norm(),
        r: result.r,
        residual: result.residual_norm,
        y: Some(result.y),
    }
}

fn sweep_epsilon_impl<S: Scalar>(
    op: &Operator<S>,
    x0: &DVector<S>,
    eps_grid: &[f64],
    config: &SolverConfig,
    parallel: bool,
) -> Result<Curve<S>> {
    require_grid(eps_grid, "strictly increasing")?;
    let x0_norm = x0.norm();
    for (i, &epsilon) in eps_grid.iter().enumerate() {
        if !(epsilon > 0.0 && epsilon < x0_norm) {
            return Err(Error::at_grid_point(
                i,
                epsilon,
                Error::EpsilonOutOfRange {
                    epsilon,
                    x0_norm,
                },
            ));
        }
    }
    let samples = grid_map(eps_grid, parallel, |i, epsilon| {
        let problem = Problem::new(op.clone(), x0.clone(), epsilon)
            .map_err(|e| Error::at_grid_point(i, epsilon, e))?;
        let result =
            solve_extremal(&problem, config).map_err(|e| Error::at_grid_point(i, epsilon, e))?;
        Ok(sample_from(epsilon, result))
    })?;
    Ok(Curve {
        parameter_name: "epsilon".into(),
        samples,
    })
}

/// Sweeps the radius over a strictly increasing grid in `(0, ||x0||)`.
/// Along the curve `||y||` is strictly decreasing and `lambda = -r`
/// strictly increasing (shrinking the feasible ball can only cost norm).
pub fn sweep_epsilon<S: Scalar>(
    op: &Operator<S>,
    x0: &DVector<S>,
    eps_grid: &[f64],
    config: &SolverConfig,
) -> Result<Curve<S>> {
    sweep_epsilon_impl(op, x0, eps_grid, config, true)
}

/// [`sweep_epsilon`] on a single thread; identical output.
pub fn sweep_epsilon_sequential<S: Scalar>(
    op: &Operator<S>,
    x0: &DVector<S>,
    eps_grid: &[f64],
    config: &SolverConfig,
) -> Result<Curve<S>> {
    sweep_epsilon_impl(op, x0, eps_grid, config, false)
}

/// Sweeps the center along its own ray: `t -> y_{t x0, epsilon}` for
/// `t > epsilon / ||x0||`. The norm column is non-decreasing in `t`.
pub fn sweep_ray<S: Scalar>(
    op: &Operator<S>,
    x0: &DVector<S>,
    epsilon: f64,
    t_grid: &[f64],
    config: &SolverConfig,
) -> Result<Curve<S>> {
    require_grid(t_grid, "strictly increasing")?;
    let x0_norm = x0.norm();
    if x0_norm == 0.0 {
        return Err(Error::ZeroVector {
            context: "ray sweep x0",
        });
    }
    let samples = grid_map(t_grid, true, |i, t| {
        let center_norm = t * x0_norm;
        if !(center_norm > epsilon) {
            return Err(Error::at_grid_point(
                i,
                t,
                Error::CenterInsideBall {
                    param: t,
                    center_norm,
                    epsilon,
                },
            ));
        }
        let problem = Problem::new(op.clone(), x0 * S::from_real(t), epsilon)
            .map_err(|e| Error::at_grid_point(i, t, e))?;
        let result = solve_extremal(&problem, config).map_err(|e| Error::at_grid_point(i, t, e))?;
        Ok(sample_from(t, result))
    })?;
    Ok(Curve {
        parameter_name: "t".into(),
        samples,
    })
}

/// Sweeps the center along an arbitrary direction: `t -> y_{x0 + t u, epsilon}`
/// for centers strictly outside the closed ball of radius `epsilon`. No
/// monotonicity holds in general; the curve may dip and rise.
pub fn sweep_direction<S: Scalar>(
    op: &Operator<S>,
    x0: &DVector<S>,
    u: &DVector<S>,
    epsilon: f64,
    t_grid: &[f64],
    config: &SolverConfig,
) -> Result<Curve<S>> {
    require_grid(t_grid, "strictly increasing")?;
    if u.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            context: "sweep direction u",
            expected: x0.len(),
            actual: u.len(),
        });
    }
    let samples = grid_map(t_grid, true, |i, t| {
        let center = x0 + u * S::from_real(t);
        let center_norm = center.norm();
        if !(center_norm > epsilon) {
            return Err(Error::at_grid_point(
                i,
                t,
                Error::CenterInsideBall {
                    param: t,
                    center_norm,
                    epsilon,
                },
            ));
        }
        let problem = Problem::new(op.clone(), center, epsilon)
            .map_err(|e| Error::at_grid_point(i, t, e))?;
        let result = solve_extremal(&problem, config).map_err(|e| Error::at_grid_point(i, t, e))?;
        Ok(sample_from(t, result))
    })?;
    Ok(Curve {
        parameter_name: "t".into(),
        samples,
    })
}

/// Perturbs the center by `delta u` for a unit `u` over strictly
/// decreasing deltas and measures `||y_{x0 + delta u} - y_{x0}||`
/// (measurement) and `| ||y_{x0 + delta u}|| - ||y_{x0}|| |` (derived).
/// Both shrink toward zero as delta does.
pub fn continuity_probe<S: Scalar>(
    op: &Operator<S>,
    x0: &DVector<S>,
    u: &DVector<S>,
    epsilon: f64,
    deltas: &[f64],
    config: &SolverConfig,
) -> Result<ProbeReport> {
    require_grid(deltas, "strictly decreasing")?;
    if let Some((i, &d)) = deltas.iter().enumerate().find(|(_, &d)| !(d > 0.0)) {
        return Err(Error::at_grid_point(
            i,
            d,
            Error::InvalidConfig("probe steps must be positive".into()),
        ));
    }
    if u.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            context: "continuity probe u",
            expected: x0.len(),
            actual: u.len(),
        });
    }
    let u_norm = u.norm();
    if (u_norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit { norm: u_norm });
    }

    let base_problem = Problem::new(op.clone(), x0.clone(), epsilon)?;
    let base = solve_extremal(&base_problem, config)?;
    let base_norm = base.y_norm();

    let rows = grid_map(deltas, true, |i, delta| {
        let center = x0 + u * S::from_real(delta);
        let center_norm = center.norm();
        if !(center_norm > epsilon) {
            return Err(Error::at_grid_point(
                i,
                delta,
                Error::CenterInsideBall {
                    param: delta,
                    center_norm,
                    epsilon,
                },
            ));
        }
        let problem = Problem::new(op.clone(), center, epsilon)
            .map_err(|e| Error::at_grid_point(i, delta, e))?;
        let shifted =
            solve_extremal(&problem, config).map_err(|e| Error::at_grid_point(i, delta, e))?;
        Ok(ProbeRow {
            step: delta,
            measurement: (&shifted.y - &base.y).norm(),
            derived: Some((shifted.y_norm() - base_norm).abs()),
        })
    })?;
    Ok(ProbeReport {
        probe_kind: "continuity".into(),
        rows,
    })
}

/// Central-difference estimates `D_h` of `d||y_epsilon||/d epsilon` over a
/// strictly decreasing step ladder. The derived column of row `i` is the
/// Richardson ratio `(D_i - D_{i+1}) / (D_{i+1} - D_{i+2})`, which sits
/// near 4 on a halving ladder when the map has three continuous
/// derivatives; it is omitted for the last two rows and when the
/// denominator vanishes (the affine identity family).
pub fn smoothness_probe<S: Scalar>(
    op: &Operator<S>,
    x0: &DVector<S>,
    epsilon: f64,
    h_sequence: &[f64],
    config: &SolverConfig,
) -> Result<ProbeReport> {
    require_grid(h_sequence, "strictly decreasing")?;
    if let Some((i, &h)) = h_sequence.iter().enumerate().find(|(_, &h)| !(h > 0.0)) {
        return Err(Error::at_grid_point(
            i,
            h,
            Error::InvalidConfig("probe steps must be positive".into()),
        ));
    }
    let x0_norm = x0.norm();
    let h_max = h_sequence[0];
    if !(epsilon - h_max > 0.0) {
        return Err(Error::EpsilonOutOfRange {
            epsilon: epsilon - h_max,
            x0_norm,
        });
    }
    if !(epsilon + h_max < x0_norm) {
        return Err(Error::EpsilonOutOfRange {
            epsilon: epsilon + h_max,
            x0_norm,
        });
    }

    let estimates = grid_map(h_sequence, true, |i, h| {
        let wrap = |e| Error::at_grid_point(i, h, e);
        let plus = solve_extremal(
            &Problem::new(op.clone(), x0.clone(), epsilon + h).map_err(wrap)?,
            config,
        )
        .map_err(|e| Error::at_grid_point(i, h, e))?;
        let minus = solve_extremal(
            &Problem::new(op.clone(), x0.clone(), epsilon - h)
                .map_err(|e| Error::at_grid_point(i, h, e))?,
            config,
        )
        .map_err(|e| Error::at_grid_point(i, h, e))?;
        Ok((plus.y_norm() - minus.y_norm()) / (2.0 * h))
    })?;

    let rows = estimates
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let derived = if i + 2 < estimates.len() {
                let numerator = estimates[i] - estimates[i + 1];
                let denominator = estimates[i + 1] - estimates[i + 2];
                (denominator != 0.0).then(|| numerator / denominator)
            } else {
                None
            };
            ProbeRow {
                step: h_sequence[i],
                measurement: d,
                derived,
            }
        })
        .collect();
    Ok(ProbeReport {
        probe_kind: "smoothness".into(),
        rows,
    })
}
