//! Semidefinite programs in inequality form and the truncation problem.
//!
//! Primal: minimize `c^T x` subject to `F(x) = F0 + sum_i x_i F_i >= 0`.
//! Dual: maximize `-tr(F0 Z)` subject to `Z >= 0`, `tr(F_i Z) = c_i`.
//! For a feasible pair the duality gap is `c^T x + tr(F0 Z) = tr(F(x) Z) >= 0`,
//! and the pair is optimal iff `F(x) Z = Z F(x) = 0`.
//!
//! No solver is provided. The truncation problem has a closed-form optimum
//! (the dual-frame coefficients of the state), and this module checks
//! feasibility, gap and slackness of candidate points.

use crate::error::{check_dim, Result, TomoError};
use crate::linalg::{self, CMatrix};
use crate::operator::{expand, DualFrame, HermitianOperator};
use crate::state::DensityMatrix;

/// Absolute tolerance on eigenvalues and on the dual equality constraints.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
/// A pair is certified optimal when its slackness residual is at most this.
pub const SLACKNESS_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    f0: HermitianOperator,
    fs: Vec<HermitianOperator>,
    c: Vec<f64>,
}

impl SdpProblem {
    pub fn new(f0: HermitianOperator, fs: Vec<HermitianOperator>, c: Vec<f64>) -> Result<Self> {
        for f in &fs {
            check_dim("constraint matrix dimension", f0.dim(), f.dim())?;
        }
        check_dim("cost vector length", fs.len(), c.len())?;
        if c.iter().any(|v| !v.is_finite()) {
            return Err(TomoError::Range("cost vector must be finite".into()));
        }
        Ok(Self { f0, fs, c })
    }

    pub fn dim(&self) -> usize {
        self.f0.dim()
    }

    pub fn num_variables(&self) -> usize {
        self.fs.len()
    }

    pub fn f0(&self) -> &HermitianOperator {
        &self.f0
    }

    pub fn constraints(&self) -> &[HermitianOperator] {
        &self.fs
    }

    pub fn cost(&self) -> &[f64] {
        &self.c
    }

    /// `c^T x`.
    pub fn primal_objective(&self, x: &[f64]) -> Result<f64> {
        check_dim("primal variable count", self.fs.len(), x.len())?;
        Ok(self.c.iter().zip(x).map(|(c, x)| c * x).sum())
    }

    /// `-tr(F0 Z)`.
    pub fn dual_objective(&self, z: &HermitianOperator) -> Result<f64> {
        check_dim("dual variable dimension", self.dim(), z.dim())?;
        Ok(-self.f0.matrix().dotc(z.matrix()).re)
    }

    fn constraint_matrix(&self, x: &[f64]) -> Result<CMatrix> {
        check_dim("primal variable count", self.fs.len(), x.len())?;
        let mut m = self.f0.matrix().clone();
        for (xi, fi) in x.iter().zip(&self.fs) {
            m += fi.matrix().scale(*xi);
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpPoint {
    x: Vec<f64>,
    z: Option<HermitianOperator>,
}

impl SdpPoint {
    pub fn primal(x: Vec<f64>) -> Self {
        Self { x, z: None }
    }

    /// Pairs `x` with a dual variable, which must be PSD within
    /// `1e-9 max(1, lambda_max)`.
    pub fn new(x: Vec<f64>, z: HermitianOperator) -> Result<Self> {
        let eig = z.eigenvalues();
        let largest = eig.last().copied().unwrap_or(0.0);
        let min = eig[0];
        if min < -FEASIBILITY_TOLERANCE * largest.max(1.0) {
            return Err(TomoError::Feasibility {
                constraint: "dual variable Z >= 0".into(),
                violation: -min,
            });
        }
        Ok(Self { x, z: Some(z) })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn z(&self) -> Option<&HermitianOperator> {
        self.z.as_ref()
    }
}

/// `F(x)` together with its smallest eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintValue {
    pub matrix: HermitianOperator,
    pub min_eigenvalue: f64,
}

impl ConstraintValue {
    pub fn is_feasible(&self) -> bool {
        self.min_eigenvalue >= -FEASIBILITY_TOLERANCE
    }
}

pub fn evaluate_constraint(problem: &SdpProblem, x: &[f64]) -> Result<ConstraintValue> {
    let m = problem.constraint_matrix(x)?;
    let matrix = HermitianOperator::new(m)?;
    let min_eigenvalue = matrix.min_eigenvalue();
    Ok(ConstraintValue {
        matrix,
        min_eigenvalue,
    })
}

/// Checks primal and dual feasibility and returns `(F(x), Z)`.
fn feasible_pair<'a>(
    problem: &SdpProblem,
    point: &'a SdpPoint,
) -> Result<(ConstraintValue, &'a HermitianOperator)> {
    let z = point
        .z
        .as_ref()
        .ok_or_else(|| TomoError::Range("point carries no dual variable".into()))?;
    check_dim("dual variable dimension", problem.dim(), z.dim())?;
    let fx = evaluate_constraint(problem, &point.x)?;
    if !fx.is_feasible() {
        return Err(TomoError::Feasibility {
            constraint: "primal F(x) >= 0".into(),
            violation: -fx.min_eigenvalue,
        });
    }
    for (i, (fi, ci)) in problem.fs.iter().zip(&problem.c).enumerate() {
        let value = fi.matrix().dotc(z.matrix()).re;
        let violation = (value - ci).abs();
        if violation > FEASIBILITY_TOLERANCE * (1.0 + ci.abs()) {
            return Err(TomoError::Feasibility {
                constraint: format!("dual equality tr(F_{i} Z) = c_{i}"),
                violation,
            });
        }
    }
    Ok((fx, z))
}

/// `tr(F(x) Z)` for a primal/dual feasible pair.
pub fn duality_gap(problem: &SdpProblem, point: &SdpPoint) -> Result<f64> {
    let (fx, z) = feasible_pair(problem, point)?;
    let gap = linalg::trace(&(fx.matrix.matrix() * z.matrix()));
    let scale = 1.0 + linalg::frobenius(fx.matrix.matrix()) * linalg::frobenius(z.matrix());
    if gap.im.abs() > FEASIBILITY_TOLERANCE * scale {
        return Err(TomoError::Numerical(format!(
            "duality gap has imaginary part {:.3e}",
            gap.im
        )));
    }
    Ok(gap.re)
}

/// `max(|F(x) Z|_F, |Z F(x)|_F)` for a primal/dual feasible pair.
pub fn check_slackness(problem: &SdpProblem, point: &SdpPoint) -> Result<f64> {
    let (fx, z) = feasible_pair(problem, point)?;
    let left = linalg::frobenius(&(fx.matrix.matrix() * z.matrix()));
    let right = linalg::frobenius(&(z.matrix() * fx.matrix.matrix()));
    Ok(left.max(right))
}

pub fn is_certified_optimal(slackness_residual: f64) -> bool {
    slackness_residual <= SLACKNESS_THRESHOLD
}

/// Truncating a state onto a retained operator basis `{N_j}`.
///
/// As an SDP: `F0 = rho`, `F_j = -N_j`, `x_j = lambda_j`, so that
/// `F(x) = rho - sum_j lambda_j N_j`, with cost `c_j = -tr(N_j)`; the
/// objective maximizes the trace kept by the truncated state.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationProblem {
    rho: DensityMatrix,
    frame: DualFrame,
}

/// Closed-form truncation and its slack.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    /// `lambda_j = (Q_j|rho)`.
    pub coefficients: Vec<f64>,
    /// `rho^n = sum_j lambda_j N_j`.
    pub truncated: HermitianOperator,
    /// Ascending eigenvalues of `rho - rho^n`.
    pub slack_spectrum: Vec<f64>,
    /// `tr(rho^n) = sum_j lambda_j tr(N_j)`.
    pub truncated_trace: f64,
}

impl Truncation {
    pub fn slack_is_psd(&self) -> bool {
        self.slack_spectrum
            .first()
            .is_none_or(|&v| v >= -FEASIBILITY_TOLERANCE)
    }
}

impl TruncationProblem {
    pub fn new(rho: DensityMatrix, frame: DualFrame) -> Result<Self> {
        check_dim("state vs frame dimension", frame.dim(), rho.dim())?;
        Ok(Self { rho, frame })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn frame(&self) -> &DualFrame {
        &self.frame
    }

    pub fn sdp(&self) -> SdpProblem {
        let basis = self.frame.basis().elements();
        SdpProblem {
            f0: self.rho.operator().clone(),
            fs: basis.iter().map(|n| n.scale(-1.0)).collect(),
            c: basis.iter().map(|n| -n.trace()).collect(),
        }
    }

    /// Dual certificate for the closed-form optimum: the projector onto the
    /// kernel of `F(lambda)`.
    pub fn certificate(&self) -> Result<SdpPoint> {
        let truncation = extract_coefficients(self)?;
        let slack = self.rho.operator().sub(&truncation.truncated)?;
        let (values, vectors) = linalg::hermitian_eigen(slack.matrix());
        let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let dim = values.len();
        let mut z = CMatrix::zeros(dim, dim);
        for (k, v) in values.iter().enumerate() {
            if v.abs() <= FEASIBILITY_TOLERANCE * scale {
                let col = vectors.column(k);
                z += col * col.adjoint();
            }
        }
        let z = HermitianOperator::new((&z + z.adjoint()).scale(0.5))?;
        SdpPoint::new(truncation.coefficients, z)
    }
}

pub fn extract_coefficients(problem: &TruncationProblem) -> Result<Truncation> {
    let coefficients: Vec<f64> = expand(&problem.frame, problem.rho.operator())?
        .into_iter()
        .map(|c| c.re)
        .collect();
    let truncated = HermitianOperator::real_combination(&coefficients, problem.frame.basis().elements())?;
    let slack = problem.rho.operator().sub(&truncated)?;
    let truncated_trace = coefficients
        .iter()
        .zip(problem.frame.basis().elements())
        .map(|(l, n)| l * n.trace())
        .sum();
    Ok(Truncation {
        coefficients,
        truncated,
        slack_spectrum: slack.eigenvalues(),
        truncated_trace,
    })
}
