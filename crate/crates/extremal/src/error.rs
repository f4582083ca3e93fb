//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{context} contains a non-finite entry")]
    NonFinite { context: &'static str },

    #[error("{context} must be nonzero")]
    ZeroVector { context: &'static str },

    #[error("operator must have at least one row and one column")]
    EmptyOperator,

    #[error("epsilon_out_of_range: epsilon {epsilon} must lie in (0, {x0_norm})")]
    EpsilonOutOfRange { epsilon: f64, x0_norm: f64 },

    #[error("infeasible: dist(x0, range T) = {distance:.6e} is not below epsilon = {epsilon:.6e}")]
    Infeasible { distance: f64, epsilon: f64 },

    #[error("lambda must be positive, got {lambda}")]
    NonPositiveLambda { lambda: f64 },

    #[error("problem document: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operator is singular (sigma_min = {sigma_min:.6e})")]
    SingularOperator { sigma_min: f64 },

    #[error("direction vector must have unit norm, got {norm}")]
    NotUnit { norm: f64 },

    #[error("grid must be {order}: violation at index {index}")]
    GridOrder { order: &'static str, index: usize },

    #[error("center at parameter {param} lies inside the closed ball of radius {epsilon} (norm {center_norm:.6e})")]
    CenterInsideBall {
        param: f64,
        center_norm: f64,
        epsilon: f64,
    },

    #[error("grid point {index} (value {value:.6e}): {source}")]
    AtGridPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("shifted normal-equations matrix failed to factorize at lambda = {lambda:.6e}")]
    FactorizationFailed { lambda: f64 },

    #[error("no bracket for the secular equation within {decades} decades around lambda = {center:.6e}")]
    BracketNotFound { decades: u32, center: f64 },

    #[error(
        "secular iteration did not converge after {iterations} iterations (residual gap {gap:.6e})"
    )]
    MaxIterationsExceeded { iterations: u32, gap: f64 },
}

impl Error {
    /// True for failures of the numerical iteration itself, as opposed to
    /// rejected inputs. Callers that map errors onto process exit codes
    /// distinguish the two classes.
    pub fn is_convergence_failure(&self) -> bool {
        match self {
            Error::MaxIterationsExceeded { .. }
            | Error::BracketNotFound { .. }
            | Error::FactorizationFailed { .. } => true,
            Error::AtGridPoint { source, .. } => source.is_convergence_failure(),
            _ => false,
        }
    }

    pub(crate) fn at_grid_point(index: usize, value: f64, source: Error) -> Error {
        Error::AtGridPoint {
            index,
            value,
            source: Box::new(source),
        }
    }
}
