use thiserror::Error;

/// Errors raised by the tomography toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TomoError {
    #[error("dimension mismatch: {context} (expected {expected}, got {found})")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("operator is not Hermitian: asymmetry {asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("vector lies outside the span of the frame (residual norm {residual:.3e})")]
    Span { residual: f64 },

    #[error("infeasible point: {constraint} violated by {violation:.3e}")]
    Feasibility {
        constraint: String,
        violation: f64,
    },

    #[error("invalid state: {0}")]
    State(String),

    #[error(
        "design conditions violated: |sum n| = {mean_residual:.3e}, \
         second moment deviation from I/3 = {moment_residual:.3e}"
    )]
    Design {
        mean_residual: f64,
        moment_residual: f64,
    },

    #[error("quorum is not informationally complete: rank {rank} < {required}")]
    Completeness { rank: usize, required: usize },

    #[error("invalid measurement data: {0}")]
    Data(String),

    #[error("resource cap exceeded: {requested} elements requested, cap is {cap}")]
    Resource { requested: usize, cap: usize },

    #[error("quorum ill-conditioned after {attempts} attempts (condition number {condition:.3e})")]
    Conditioning {
        attempts: usize,
        condition: f64,
        spectrum: Vec<f64>,
    },

    #[error("numerical self-check failed: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, TomoError>;

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(TomoError::Dimension {
            context,
            expected,
            found,
        })
    }
}
