//! Secular-equation solver for the minimal-norm vector, plus the
//! stationarity report that quantifies every structural condition the
//! solution must satisfy.
//!
//! The extremal vector for `(T, x0, epsilon)` is the unique minimal-norm
//! `y` with `||Ty - x0|| <= epsilon`. It lies on the constraint boundary
//! and solves `(T*T + lambda I) y = T* x0` for the unique `lambda > 0`
//! with `phi(lambda) = ||Ty(lambda) - x0|| = epsilon`; the multiplier of
//! the stationarity identity `T*(Ty - x0) = r y` is `r = -lambda`.
//! [`solve_extremal`] finds that root with a bracketed, safeguarded
//! Newton iteration on `phi^2 - epsilon^2`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operators::{check_finite_vector, Operator, Problem};
use crate::scalar::{real_pairing, Scalar};

/// Iteration controls for [`solve_extremal`].
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Convergence target on the boundary equation:
    /// `| ||Ty - x0|| - epsilon | <= tol_residual_rel * max(epsilon, 1)`.
    pub tol_residual_rel: f64,
    /// Budget of secular-equation evaluations (bracketing included).
    pub max_iterations: u32,
    /// Geometric step used to grow or shrink lambda while bracketing.
    pub bracket_growth: f64,
    /// Starting lambda; defaults to `epsilon ||T||^2 / (||x0|| - epsilon)`,
    /// which is exact when `T` is a multiple of the identity.
    pub lambda_init: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_residual_rel: 1e-10,
            max_iterations: 200,
            bracket_growth: 4.0,
            lambda_init: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_residual_rel > 0.0 && self.tol_residual_rel.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tol_residual_rel must be positive and finite, got {}",
                self.tol_residual_rel
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.bracket_growth > 1.0 && self.bracket_growth.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "bracket_growth must exceed 1, got {}",
                self.bracket_growth
            )));
        }
        if let Some(lambda) = self.lambda_init {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "lambda_init must be positive and finite, got {lambda}"
                )));
            }
        }
        Ok(())
    }
}

/// Quantified residuals of the structural conditions at a candidate `y`.
/// The verifier computes numbers only; thresholds belong to callers.
#[derive(Clone, Debug)]
pub struct KktReport {
    /// Multiplier recovered from `y` alone: `[T*(Ty - x0) | y] / ||y||^2`.
    pub multiplier_estimate: f64,
    /// Whether the recovered multiplier is negative.
    pub multiplier_sign_ok: bool,
    /// `||T*(Ty - x0) - r y|| / max(||T*(Ty - x0)||, tiny)` with the
    /// recovered `r`; zero iff the gradient is exactly collinear with `y`.
    pub collinearity_residual: f64,
    /// `| ||Ty - x0|| - epsilon |` (boundary attainment).
    pub boundary_gap: f64,
    /// `(||x0||^2 - epsilon^2) - ||Ty||^2`; nonnegative when `Ty` lies in
    /// the spherical cap that contains the optimum.
    pub cap_slack: f64,
    /// `[Ty - x0 | Ty]`; equals `r ||y||^2` at a stationary point, hence
    /// negative.
    pub obtuse_pairing: f64,
    /// Imaginary contamination of the multiplier estimate before taking
    /// the real pairing; `None` over the reals.
    pub imag_leak: Option<f64>,
}

/// A converged solve: the extremal vector and its diagnostics.
#[derive(Clone, Debug)]
pub struct ExtremalResult<S: Scalar> {
    pub y: DVector<S>,
    /// Stationarity multiplier, `r = -lambda < 0`.
    pub r: f64,
    /// Achieved `||Ty - x0||`.
    pub residual_norm: f64,
    /// Secular-equation evaluations spent.
    pub iterations: u32,
    pub kkt: KktReport,
}

impl<S: Scalar> ExtremalResult<S> {
    /// Regularization parameter, `lambda = -r > 0`.
    pub fn lambda(&self) -> f64 {
        -self.r
    }

    pub fn y_norm(&self) -> f64 {
        self.y.norm()
    }
}

struct SecularPoint<S: Scalar> {
    lambda: f64,
    y: DVector<S>,
    phi: f64,
    /// `d(phi^2)/d(lambda) = 2 lambda [(T*T + lambda I)^{-1} y | y] > 0`.
    slope: f64,
}

fn secular_point<S: Scalar>(
    op: &Operator<S>,
    tx0: &DVector<S>,
    x0: &DVector<S>,
    lambda: f64,
) -> Result<SecularPoint<S>> {
    let chol = op.shifted_gram_cholesky(lambda)?;
    let y = op.refined_solve(lambda, &chol, tx0);
    let ty = op.apply(&y)?;
    let e = &ty - x0;
    let phi = e.norm();
    if !phi.is_finite() {
        return Err(Error::NonFinite {
            context: "secular residual",
        });
    }
    let z = chol.solve(&y);
    let slope = 2.0 * lambda * real_pairing(&z, &y);
    Ok(SecularPoint {
        lambda,
        y,
        phi,
        slope,
    })
}

/// Evaluates the regularized solution `y(lambda) = (T*T + lambda I)^{-1} T* x0`
/// and its discrepancy `phi(lambda) = ||Ty(lambda) - x0||`, which is strictly
/// increasing in `lambda`.
pub fn residual_at<S: Scalar>(
    op: &Operator<S>,
    x0: &DVector<S>,
    lambda: f64,
) -> Result<(DVector<S>, f64)> {
    if x0.len() != op.nrows() {
        return Err(Error::DimensionMismatch {
            context: "residual_at x0",
            expected: op.nrows(),
            actual: x0.len(),
        });
    }
    check_finite_vector(x0, "residual_at x0")?;
    let tx0 = op.apply_adjoint(x0)?;
    let point = secular_point(op, &tx0, x0, lambda)?;
    Ok((point.y, point.phi))
}

/// Computes the stationarity report for a candidate `y`; see [`KktReport`].
pub fn kkt_verify<S: Scalar>(
    op: &Operator<S>,
    x0: &DVector<S>,
    epsilon: f64,
    y: &DVector<S>,
) -> Result<KktReport> {
    if y.len() != op.ncols() {
        return Err(Error::DimensionMismatch {
            context: "kkt_verify y",
            expected: op.ncols(),
            actual: y.len(),
        });
    }
    if x0.len() != op.nrows() {
        return Err(Error::DimensionMismatch {
            context: "kkt_verify x0",
            expected: op.nrows(),
            actual: x0.len(),
        });
    }
    check_finite_vector(y, "kkt_verify y")?;
    let y_norm_sq = y.norm_squared();
    if y_norm_sq == 0.0 {
        return Err(Error::ZeroVector {
            context: "kkt_verify y",
        });
    }

    let ty = op.apply(y)?;
    let e = &ty - x0;
    let grad = op.apply_adjoint(&e)?;
    let pairing = grad.dotc(y);
    let multiplier_estimate = pairing.real() / y_norm_sq;

    let mut defect = grad.clone();
    defect.axpy(S::from_real(-multiplier_estimate), y, S::one());
    let collinearity_residual = defect.norm() / grad.norm().max(f64::MIN_POSITIVE);

    Ok(KktReport {
        multiplier_estimate,
        multiplier_sign_ok: multiplier_estimate < 0.0,
        collinearity_residual,
        boundary_gap: (e.norm() - epsilon).abs(),
        cap_slack: (x0.norm_squared() - epsilon * epsilon) - ty.norm_squared(),
        obtuse_pairing: real_pairing(&e, &ty),
        imag_leak: S::IS_COMPLEX.then(|| (pairing.imaginary() / y_norm_sq).abs()),
    })
}

const LAMBDA_MIN: f64 = 1e-300;
const LAMBDA_MAX: f64 = 1e300;

fn decades_between(a: f64, b: f64) -> u32 {
    let hi = a.max(b);
    let lo = a.min(b).max(LAMBDA_MIN);
    (hi / lo).log10().ceil().max(1.0) as u32
}

/// Solves for the extremal vector of a validated problem.
///
/// Safeguarded Newton on `h(lambda) = phi(lambda)^2 - epsilon^2`: every
/// evaluation tightens a bracket `phi(lo) < epsilon < phi(hi)` (found by
/// geometric scan from the starting lambda), and a Newton step that
/// leaves the bracket is replaced by its geometric midpoint. Converges
/// when `|phi - epsilon|` meets the configured tolerance; deterministic
/// for fixed inputs and config.
pub fn solve_extremal<S: Scalar>(
    problem: &Problem<S>,
    config: &SolverConfig,
) -> Result<ExtremalResult<S>> {
    config.validate()?;
    let op = problem.op();
    let x0 = problem.x0();
    let epsilon = problem.epsilon();
    let x0_norm = problem.x0_norm();

    // defensive re-check; Problem construction already enforces this
    let distance = op.distance_to_range(x0)?;
    if distance >= epsilon {
        return Err(Error::Infeasible { distance, epsilon });
    }

    let tx0 = op.apply_adjoint(x0)?;
    let target = config.tol_residual_rel * epsilon.max(1.0);
    // |phi - epsilon| cannot resolve below the rounding floor of the norms
    let floor = 8.0 * f64::EPSILON * (x0_norm + epsilon);
    // aim well inside the contract so the final gate holds with margin
    let inner = (1e-3 * target).max(floor);

    let center = config.lambda_init.unwrap_or_else(|| {
        let t = op.norm();
        (epsilon * t * t / (x0_norm - epsilon)).max(f64::MIN_POSITIVE)
    });

    let mut lo: Option<f64> = None; // largest lambda seen with phi < epsilon
    let mut hi: Option<f64> = None; // smallest lambda seen with phi > epsilon
    let mut next = center;
    let mut iterations: u32 = 0;

    loop {
        let point = secular_point(op, &tx0, x0, next)?;
        iterations += 1;
        let gap = point.phi - epsilon;

        if gap.abs() <= inner {
            let kkt = kkt_verify(op, x0, epsilon, &point.y)?;
            return Ok(ExtremalResult {
                y: point.y,
                r: -point.lambda,
                residual_norm: point.phi,
                iterations,
                kkt,
            });
        }
        if gap < 0.0 {
            lo = Some(point.lambda);
        } else {
            hi = Some(point.lambda);
        }

        if iterations >= config.max_iterations {
            if gap.abs() <= target {
                // budget exhausted but the contract already holds
                let kkt = kkt_verify(op, x0, epsilon, &point.y)?;
                return Ok(ExtremalResult {
                    y: point.y,
                    r: -point.lambda,
                    residual_norm: point.phi,
                    iterations,
                    kkt,
                });
            }
            return Err(Error::MaxIterationsExceeded {
                iterations,
                gap: gap.abs(),
            });
        }

        next = match (lo, hi) {
            (Some(l), Some(h)) => {
                let value = (point.phi - epsilon) * (point.phi + epsilon);
                let newton = point.lambda - value / point.slope;
                if newton.is_finite() && newton > l && newton < h {
                    newton
                } else {
                    // geometric midpoint: lambda stays positive and the
                    // bracket's log-width halves
                    (l * h).sqrt()
                }
            }
            (Some(l), None) => {
                let grown = l * config.bracket_growth;
                if grown >= LAMBDA_MAX {
                    return Err(Error::BracketNotFound {
                        decades: decades_between(l, center),
                        center,
                    });
                }
                grown
            }
            (None, Some(h)) => {
                let shrunk = h / config.bracket_growth;
                if shrunk <= LAMBDA_MIN {
                    return Err(Error::BracketNotFound {
                        decades: decades_between(h, center),
                        center,
                    });
                }
                shrunk
            }
            (None, None) => unreachable!("first evaluation lands in one side"),
        };
    }
}
