//! Density matrices, distance measures and random state generation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Result, TomoError};
use crate::linalg::{self, CMatrix, CVector};
use crate::operator::HermitianOperator;

/// Absolute tolerance on unit trace and on the smallest eigenvalue.
pub const STATE_TOLERANCE: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > STATE_TOLERANCE {
            return Err(TomoError::State(format!("trace is {trace}, expected 1")));
        }
        let min = op.min_eigenvalue();
        if min < -STATE_TOLERANCE {
            return Err(TomoError::State(format!(
                "not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { op })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    /// `|psi><psi|` for a state vector, normalized internally.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(TomoError::State("state vector has zero or non-finite norm".into()));
        }
        Ok(Self {
            op: HermitianOperator::projector(&psi.unscale(norm)),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// `p_0 |e_0><e_0| + ...` in an orthonormal basis given as columns.
    pub fn diagonal_in(basis: &[CVector], weights: &[f64]) -> Result<Self> {
        check_dim("weights vs basis", basis.len(), weights.len())?;
        let dim = basis
            .first()
            .map(|v| v.len())
            .ok_or_else(|| TomoError::State("empty basis".into()))?;
        let mut acc = CMatrix::zeros(dim, dim);
        for (v, &w) in basis.iter().zip(weights) {
            acc += linalg::outer(v).scale(w);
        }
        Self::from_matrix(acc)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            op: self.op.kron(&other.op),
        }
    }

    /// `tr(N rho)` for a Hermitian measurement operator.
    pub fn expectation(&self, observable: &HermitianOperator) -> Result<f64> {
        check_dim("observable", self.dim(), observable.dim())?;
        Ok(observable.matrix().dotc(self.matrix()).re)
    }
}

/// `(1/2) sum |eig(a - b)|`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    0.5 * linalg::hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>()
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
///
/// `rho` must be PSD; `sigma` may be a slightly unphysical estimate, in which
/// case negative eigenvalues of the inner product are clamped to zero.
pub fn fidelity(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let root = linalg::psd_sqrt(rho);
    let inner = &root * sigma * &root;
    let s: f64 = linalg::hermitian_eigenvalues(&inner)
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .sum();
    s * s
}

/// Haar-like random pure state from a complex Gaussian vector.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| {
        linalg::c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    v.unscale(norm)
}

/// Random full-rank density matrix `M M† / tr(M M†)` with Gaussian `M`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    random_density_matrix_of_rank(dim, dim, rng)
}

/// Random density matrix of rank at most `rank` (Gaussian `dim x rank` factor).
pub fn random_density_matrix_of_rank<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let m = CMatrix::from_fn(dim, rank.max(1), |_, _| {
        linalg::c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut rho = &m * m.adjoint();
    let tr = linalg::trace(&rho).re;
    rho.unscale_mut(tr);
    let rho = (&rho + rho.adjoint()).scale(0.5);
    DensityMatrix {
        op: HermitianOperator::new(rho).expect("M M† is Hermitian"),
    }
}

/// GHZ state `(|0...0> + |1...1>)/sqrt 2` on `qubits` qubits.
pub fn ghz(qubits: u32) -> DensityMatrix {
    let dim = 1usize << qubits;
    let mut v = CVector::zeros(dim);
    v[0] = linalg::c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[dim - 1] = linalg::c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityMatrix {
        op: HermitianOperator::projector(&v),
    }
}

/// Werner-type mixture `v |GHZ><GHZ| + (1 - v) I / 2^M`. For two qubits this
/// is the usual Bell-state Werner family.
pub fn werner(qubits: u32, visibility: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(TomoError::Range(format!("visibility {visibility} outside [0, 1]")));
    }
    let dim = 1usize << qubits;
    let pure = ghz(qubits);
    let mixed = linalg::identity(dim).scale((1.0 - visibility) / dim as f64);
    DensityMatrix::from_matrix(pure.matrix().scale(visibility) + mixed)
}
