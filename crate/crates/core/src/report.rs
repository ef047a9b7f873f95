use crate::operator::HermitianOperator;
use crate::state::{self, DensityMatrix};

/// Outcome of a linear-inversion reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyReport {
    /// Measured probabilities or relative frequencies fed to the inversion.
    pub probabilities: Vec<f64>,
    /// Reconstructed operator; PSD only for consistent data.
    pub reconstructed: HermitianOperator,
    pub trace: f64,
    pub min_eigenvalue: f64,
    /// Against the reference state, when one was supplied.
    pub fidelity: Option<f64>,
    pub trace_distance: Option<f64>,
    /// Gram condition number of the quorum used.
    pub condition_number: Option<f64>,
}

impl TomographyReport {
    pub fn assess(
        reconstructed: HermitianOperator,
        probabilities: Vec<f64>,
        reference: Option<&DensityMatrix>,
        condition_number: Option<f64>,
    ) -> Self {
        let trace = reconstructed.trace();
        let min_eigenvalue = reconstructed.min_eigenvalue();
        let (fidelity, trace_distance) = match reference {
            Some(rho) if rho.dim() == reconstructed.dim() => (
                Some(state::fidelity(rho.matrix(), reconstructed.matrix())),
                Some(state::trace_distance(rho.matrix(), reconstructed.matrix())),
            ),
            _ => (None, None),
        };
        Self {
            probabilities,
            reconstructed,
            trace,
            min_eigenvalue,
            fidelity,
            trace_distance,
            condition_number,
        }
    }

    /// True when the reconstruction is itself a valid density matrix.
    pub fn is_physical(&self, tolerance: f64) -> bool {
        (self.trace - 1.0).abs() <= tolerance && self.min_eigenvalue >= -tolerance
    }
}
