//! Dense operators, problem instances, and problem-document I/O.
//!
//! An [`Operator`] is a finite-dimensional dense linear map together with
//! cached spectral data (singular values, range basis, Gram matrix). Full
//! row rank plays the role of dense range at this scale. A [`Problem`]
//! bundles an operator with a center `x0` and a radius `epsilon`, with all
//! feasibility invariants checked at construction.

use std::sync::Arc;

use nalgebra::{Cholesky, Complex, DMatrix, DVector, Dyn};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

struct OperatorData<S: Scalar> {
    matrix: DMatrix<S>,
    /// `T* T`, the normal-equations Gram matrix (n x n).
    gram: DMatrix<S>,
    /// Left singular vectors, orthonormal basis adapted to the range.
    u: DMatrix<S>,
    /// Singular values in descending order.
    singular_values: Vec<f64>,
    /// Numerical rank cutoff: `max(m, n) * eps * sigma_max`.
    rank_tol: f64,
}

/// Immutable dense linear map with cached spectral data. Cloning is cheap
/// (shared storage), so operators can be fanned out across workers.
#[derive(Clone)]
pub struct Operator<S: Scalar> {
    data: Arc<OperatorData<S>>,
}

fn check_finite_matrix<S: Scalar>(m: &DMatrix<S>, context: &'static str) -> Result<()> {
    if m.iter().all(|e| e.real().is_finite() && e.imaginary().is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

pub(crate) fn check_finite_vector<S: Scalar>(v: &DVector<S>, context: &'static str) -> Result<()> {
    if v.iter().all(|e| e.real().is_finite() && e.imaginary().is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

impl<S: Scalar> Operator<S> {
    /// Builds an operator from its dense matrix, computing the SVD and the
    /// Gram matrix once up front.
    pub fn new(matrix: DMatrix<S>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::EmptyOperator);
        }
        check_finite_matrix(&matrix, "operator matrix")?;

        let gram = matrix.ad_mul(&matrix);
        let svd = matrix.clone().svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
        let sigma_max = singular_values.first().copied().unwrap_or(0.0);
        let rank_tol = matrix.nrows().max(matrix.ncols()) as f64 * f64::EPSILON * sigma_max;

        Ok(Self {
            data: Arc::new(OperatorData {
                matrix,
                gram,
                u,
                singular_values,
                rank_tol,
            }),
        })
    }

    pub fn nrows(&self) -> usize {
        self.data.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<S> {
        &self.data.matrix
    }

    /// Operator norm `||T||` (largest singular value).
    pub fn norm(&self) -> f64 {
        self.data.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Smallest singular value of the map.
    pub fn sigma_min(&self) -> f64 {
        self.data.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Surjectivity stand-in for dense range: full row rank.
    pub fn is_surjective(&self) -> bool {
        self.nrows() <= self.ncols() && self.sigma_min() > self.data.rank_tol
    }

    /// Applies `T` to a vector.
    pub fn apply(&self, v: &DVector<S>) -> Result<DVector<S>> {
        if v.len() != self.ncols() {
            return Err(Error::DimensionMismatch {
                context: "apply",
                expected: self.ncols(),
                actual: v.len(),
            });
        }
        Ok(&self.data.matrix * v)
    }

    /// Applies the adjoint `T*` (conjugate transpose) to a vector.
    pub fn apply_adjoint(&self, v: &DVector<S>) -> Result<DVector<S>> {
        if v.len() != self.nrows() {
            return Err(Error::DimensionMismatch {
                context: "apply_adjoint",
                expected: self.nrows(),
                actual: v.len(),
            });
        }
        Ok(self.data.matrix.ad_mul_to_vec(v))
    }

    /// Distance from `x0` to the range of `T`, via the cached orthonormal
    /// range basis: the norm of the component of `x0` outside the span of
    /// the numerically nonzero singular directions.
    pub fn distance_to_range(&self, x0: &DVector<S>) -> Result<f64> {
        if x0.len() != self.nrows() {
            return Err(Error::DimensionMismatch {
                context: "distance_to_range",
                expected: self.nrows(),
                actual: x0.len(),
            });
        }
        let rank = self
            .data
            .singular_values
            .iter()
            .take_while(|&&s| s > self.data.rank_tol)
            .count();
        let mut residual = x0.clone();
        for j in 0..rank {
            let uj = self.data.u.column(j);
            let coeff = uj.dotc(x0);
            residual.axpy(-coeff, &uj, S::one());
        }
        Ok(residual.norm())
    }

    /// Cholesky factorization of the shifted Gram matrix `T*T + lambda I`.
    pub(crate) fn shifted_gram_cholesky(&self, lambda: f64) -> Result<Cholesky<S, Dyn>> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveLambda { lambda });
        }
        let mut shifted = self.data.gram.clone();
        let shift = S::from_real(lambda);
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += shift;
        }
        shifted
            .cholesky()
            .ok_or(Error::FactorizationFailed { lambda })
    }

    /// Solves the factored system with one step of iterative refinement.
    pub(crate) fn refined_solve(
        &self,
        lambda: f64,
        chol: &Cholesky<S, Dyn>,
        rhs: &DVector<S>,
    ) -> DVector<S> {
        let mut y = chol.solve(rhs);
        // residual rhs - (gram + lambda I) y, then one correction
        let mut res = rhs - &self.data.gram * &y;
        res.axpy(S::from_real(-lambda), &y, S::one());
        let dy = chol.solve(&res);
        y += dy;
        y
    }

    /// Solves `(T*T + lambda I) y = rhs` for `lambda > 0`. The shifted Gram
    /// matrix is Hermitian positive definite, so the solve is well posed;
    /// one step of iterative refinement keeps the linear-system residual at
    /// working precision.
    pub fn regularized_solve(&self, rhs: &DVector<S>, lambda: f64) -> Result<DVector<S>> {
        if rhs.len() != self.ncols() {
            return Err(Error::DimensionMismatch {
                context: "regularized_solve",
                expected: self.ncols(),
                actual: rhs.len(),
            });
        }
        check_finite_vector(rhs, "regularized_solve rhs")?;
        let chol = self.shifted_gram_cholesky(lambda)?;
        Ok(self.refined_solve(lambda, &chol, rhs))
    }
}

impl<S: Scalar> std::fmt::Debug for Operator<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Operator")
            .field("nrows", &self.nrows())
            .field("ncols", &self.ncols())
            .field("norm", &self.norm())
            .field("sigma_min", &self.sigma_min())
            .finish()
    }
}

trait AdMulVec<S: Scalar> {
    fn ad_mul_to_vec(&self, v: &DVector<S>) -> DVector<S>;
}

impl<S: Scalar> AdMulVec<S> for DMatrix<S> {
    fn ad_mul_to_vec(&self, v: &DVector<S>) -> DVector<S> {
        let mut out = DVector::<S>::zeros(self.ncols());
        for j in 0..self.ncols() {
            out[j] = self.column(j).dotc(v);
        }
        out
    }
}

/// A validated extremal-vector instance `(T, x0, epsilon)`.
#[derive(Clone, Debug)]
pub struct Problem<S: Scalar> {
    op: Operator<S>,
    x0: DVector<S>,
    epsilon: f64,
    x0_norm: f64,
}

impl<S: Scalar> Problem<S> {
    /// Validates and builds a problem: `x0` finite with positive norm,
    /// `0 < epsilon < ||x0||`, and `dist(x0, range T) < epsilon`.
    pub fn new(op: Operator<S>, x0: DVector<S>, epsilon: f64) -> Result<Self> {
        if x0.len() != op.nrows() {
            return Err(Error::DimensionMismatch {
                context: "problem center x0",
                expected: op.nrows(),
                actual: x0.len(),
            });
        }
        check_finite_vector(&x0, "problem center x0")?;
        if !epsilon.is_finite() {
            return Err(Error::NonFinite { context: "epsilon" });
        }
        let x0_norm = x0.norm();
        if !(epsilon > 0.0) || epsilon >= x0_norm {
            return Err(Error::EpsilonOutOfRange {
                epsilon,
                x0_norm,
            });
        }
        let distance = op.distance_to_range(&x0)?;
        if distance >= epsilon {
            return Err(Error::Infeasible { distance, epsilon });
        }
        Ok(Self {
            op,
            x0,
            epsilon,
            x0_norm,
        })
    }

    pub fn op(&self) -> &Operator<S> {
        &self.op
    }

    pub fn x0(&self) -> &DVector<S> {
        &self.x0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn x0_norm(&self) -> f64 {
        self.x0_norm
    }
}

/// A parsed problem document; the scalar field is chosen by the document.
#[derive(Clone, Debug)]
pub enum AnyProblem {
    Real(Problem<f64>),
    Complex(Problem<Complex<f64>>),
}

impl AnyProblem {
    pub fn field_name(&self) -> &'static str {
        match self {
            AnyProblem::Real(_) => "real",
            AnyProblem::Complex(_) => "complex",
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    matrix: Vec<Vec<EntryRepr>>,
    x0: Vec<EntryRepr>,
    epsilon: f64,
    field: Option<String>,
}

fn real_entry(e: &EntryRepr, context: &str) -> Result<f64> {
    match e {
        EntryRepr::Real(x) => Ok(*x),
        EntryRepr::Pair(_) => Err(Error::Parse(format!(
            "{context}: complex [re,im] entry in a real-field document"
        ))),
    }
}

fn complex_entry(e: &EntryRepr) -> Complex<f64> {
    match e {
        EntryRepr::Real(x) => Complex::new(*x, 0.0),
        EntryRepr::Pair([re, im]) => Complex::new(*re, *im),
    }
}

fn doc_shape(doc: &ProblemDoc) -> Result<(usize, usize)> {
    let m = doc.matrix.len();
    if m == 0 {
        return Err(Error::EmptyOperator);
    }
    let n = doc.matrix[0].len();
    if n == 0 {
        return Err(Error::EmptyOperator);
    }
    for (i, row) in doc.matrix.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "matrix row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    if doc.x0.len() != m {
        return Err(Error::DimensionMismatch {
            context: "document x0",
            expected: m,
            actual: doc.x0.len(),
        });
    }
    Ok((m, n))
}

/// Parses and validates a problem document.
///
/// The document is JSON with fields `matrix` (row-major array of rows),
/// `x0`, `epsilon`, and optional `field` (`"real"`, the default, or
/// `"complex"`). In a complex document each entry may be either a bare
/// number or a two-element `[re, im]` pair.
pub fn load_problem(source: &str) -> Result<AnyProblem> {
    let doc: ProblemDoc =
        serde_json::from_str(source).map_err(|e| Error::Parse(e.to_string()))?;
    let (m, n) = doc_shape(&doc)?;

    match doc.field.as_deref() {
        None | Some("real") => {
            let mut entries = Vec::with_capacity(m * n);
            for (i, row) in doc.matrix.iter().enumerate() {
                for e in row {
                    entries.push(real_entry(e, &format!("matrix row {i}"))?);
                }
            }
            let matrix = DMatrix::from_row_slice(m, n, &entries);
            let mut x0 = Vec::with_capacity(m);
            for e in &doc.x0 {
                x0.push(real_entry(e, "x0")?);
            }
            let op = Operator::new(matrix)?;
            let problem = Problem::new(op, DVector::from_vec(x0), doc.epsilon)?;
            Ok(AnyProblem::Real(problem))
        }
        Some("complex") => {
            let mut entries = Vec::with_capacity(m * n);
            for row in &doc.matrix {
                entries.extend(row.iter().map(complex_entry));
            }
            let matrix = DMatrix::from_row_slice(m, n, &entries);
            let x0: Vec<_> = doc.x0.iter().map(complex_entry).collect();
            let op = Operator::new(matrix)?;
            let problem = Problem::new(op, DVector::from_vec(x0), doc.epsilon)?;
            Ok(AnyProblem::Complex(problem))
        }
        Some(other) => Err(Error::Parse(format!(
            "field must be \"real\" or \"complex\", got \"{other}\""
        ))),
    }
}
