//! Pegg-Barnett phase states in an `(s+1)`-dimensional truncated Fock space.
//!
//! `|theta_m> = (s+1)^{-1/2} sum_n exp(i n theta_m) |n>` on the grid
//! `theta_m = theta_0 + 2 pi m / (s+1)`. The phase projectors are orthogonal,
//! so reconstructing from the phase distribution recovers exactly the
//! phase-diagonal part of a state. Off-diagonal phase coherences are not
//! measured by this quorum and are reported as discarded mass.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{check_dim, Result, TomoError};
use crate::linalg::{self, CMatrix, CVector};
use crate::operator::HermitianOperator;
use crate::state::DensityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBasis {
    s: usize,
    theta0: f64,
    thetas: Vec<f64>,
    states: Vec<CVector>,
}

impl PhaseBasis {
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.s + 1
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// The grid `theta_m`.
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn states(&self) -> &[CVector] {
        &self.states
    }

    pub fn projector(&self, m: usize) -> HermitianOperator {
        HermitianOperator::projector(&self.states[m])
    }

    pub fn projectors(&self) -> Vec<HermitianOperator> {
        (0..=self.s).map(|m| self.projector(m)).collect()
    }

    /// `2 pi / (s+1)`, the grid spacing and the density-to-probability weight.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.dim() as f64
    }

    /// `<theta_m|rho|theta_m>`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        check_dim("state dimension", self.dim(), rho.dim())?;
        Ok(self
            .states
            .iter()
            .map(|v| v.dotc(&(rho.matrix() * v)).re)
            .collect())
    }

    /// `sum_m p_m |theta_m><theta_m|`.
    pub fn resum(&self, probabilities: &[f64]) -> Result<HermitianOperator> {
        check_dim("phase probability count", self.dim(), probabilities.len())?;
        HermitianOperator::real_combination(probabilities, &self.projectors())
    }
}

/// Phase states on the grid anchored at `theta0`.
pub fn phase_states(s: usize, theta0: f64) -> Result<PhaseBasis> {
    if !theta0.is_finite() {
        return Err(TomoError::Range(format!("reference phase {theta0} is not finite")));
    }
    let dim = s + 1;
    let norm = 1.0 / (dim as f64).sqrt();
    let thetas: Vec<f64> = (0..dim)
        .map(|m| theta0 + 2.0 * PI * m as f64 / dim as f64)
        .collect();
    let states = thetas
        .iter()
        .map(|&t| CVector::from_fn(dim, |n, _| Complex64::from_polar(norm, n as f64 * t)))
        .collect();
    Ok(PhaseBasis {
        s,
        theta0,
        thetas,
        states,
    })
}

/// Hermitian phase operator `sum_m theta_m |theta_m><theta_m|`.
pub fn phase_operator(basis: &PhaseBasis) -> HermitianOperator {
    HermitianOperator::real_combination(&basis.thetas, &basis.projectors())
        .expect("phase projectors share a dimension")
}

/// Phase probability density sampled on the grid, per radian.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    thetas: Vec<f64>,
    values: Vec<f64>,
}

impl PhaseDistribution {
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Density values `P_m`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn spacing(&self) -> f64 {
        2.0 * PI / self.values.len() as f64
    }

    /// Discrete probabilities `P_m 2 pi / (s+1)`.
    pub fn probabilities(&self) -> Vec<f64> {
        let w = self.spacing();
        self.values.iter().map(|p| p * w).collect()
    }

    /// `sum_m P_m 2 pi / (s+1)`, one for a normalized state.
    pub fn normalization(&self) -> f64 {
        self.probabilities().iter().sum()
    }

    /// Density from discrete probabilities on a basis grid.
    pub fn from_probabilities(basis: &PhaseBasis, probabilities: &[f64]) -> Result<Self> {
        check_dim("phase probability count", basis.dim(), probabilities.len())?;
        let w = basis.spacing();
        Ok(Self {
            thetas: basis.thetas.clone(),
            values: probabilities.iter().map(|p| p / w).collect(),
        })
    }

    /// CSV with header `theta,P`.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["theta", "P"])?;
        for (t, p) in self.thetas.iter().zip(&self.values) {
            w.write_record([t.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `P_m = (s+1)/(2 pi) <theta_m|rho|theta_m>`.
pub fn phase_distribution(rho: &DensityMatrix, basis: &PhaseBasis) -> Result<PhaseDistribution> {
    let probabilities = basis.probabilities(rho)?;
    PhaseDistribution::from_probabilities(basis, &probabilities)
}

/// `sum_m p_m |theta_m><theta_m|` with `p_m = 2 pi P_m / (s+1)`: the state
/// itself when it is phase-diagonal, its dephased part otherwise.
pub fn phase_diagonal_reconstruct(
    distribution: &PhaseDistribution,
    basis: &PhaseBasis,
) -> Result<HermitianOperator> {
    check_dim("distribution length", basis.dim(), distribution.values.len())?;
    basis.resum(&distribution.probabilities())
}

/// Frobenius norm of the phase-basis off-diagonal part of `rho`, i.e. what
/// [`phase_diagonal_reconstruct`] cannot recover.
pub fn offdiagonal_mass(rho: &DensityMatrix, basis: &PhaseBasis) -> Result<f64> {
    let dephased = basis.resum(&basis.probabilities(rho)?)?;
    Ok(linalg::frobenius(&(rho.matrix() - dephased.matrix())))
}

/// Round trip of a known state through the phase measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReconstruction {
    pub distribution: PhaseDistribution,
    pub reconstructed: HermitianOperator,
    pub discarded_offdiagonal: f64,
}

pub fn phase_tomography(rho: &DensityMatrix, basis: &PhaseBasis) -> Result<PhaseReconstruction> {
    let distribution = phase_distribution(rho, basis)?;
    let reconstructed = phase_diagonal_reconstruct(&distribution, basis)?;
    let discarded_offdiagonal = linalg::frobenius(&(rho.matrix() - reconstructed.matrix()));
    Ok(PhaseReconstruction {
        distribution,
        reconstructed,
        discarded_offdiagonal,
    })
}

/// Fock state `|n><n|` in the `(s+1)`-dimensional space.
pub fn number_state(s: usize, n: usize) -> Result<DensityMatrix> {
    if n > s {
        return Err(TomoError::Range(format!("number state {n} outside 0..={s}")));
    }
    let mut v = CVector::zeros(s + 1);
    v[n] = linalg::ONE;
    DensityMatrix::pure(&v)
}

/// Number-basis matrix of `|theta><theta|` for a single phase value.
pub fn phase_projector_number_basis(s: usize, theta: f64) -> CMatrix {
    let dim = s + 1;
    CMatrix::from_fn(dim, dim, |np, n| {
        Complex64::from_polar(1.0 / dim as f64, (np as f64 - n as f64) * theta)
    })
}
