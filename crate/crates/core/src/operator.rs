//! Operator space with the trace inner product `(A|B) = tr(A† B)`.
//!
//! An [`OperatorBasis`] `{N_j}` spans (part of) the space of `D x D`
//! operators. Its Gram superoperator `G = sum_j |N_j)(N_j|` is represented by
//! the Gram matrix `G_jk = (N_j|N_k)`, and the dual operators
//! `Q_j = G^{-1} |N_j)` give the two resolutions of the identity
//!
//! ```text
//! A = sum_j N_j (Q_j|A) = sum_j Q_j (N_j|A)
//! ```
//!
//! Rank-deficient or overcomplete bases are handled with a spectral
//! pseudo-inverse; the expansions are then exact on the span only.

use num_complex::Complex64;

use crate::error::{check_dim, Result, TomoError};
use crate::linalg::{self, CMatrix, CVector};

/// Dense Hermitian `dim x dim` operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Relative Hermiticity tolerance applied at construction.
    pub const TOLERANCE: f64 = 1e-9;

    /// Wraps `matrix`, rejecting non-square or non-Hermitian input.
    ///
    /// The check is `max |m_ij - conj(m_ji)| <= 1e-9 (1 + max |m_ij|)`. Input
    /// that passes is stored as given, not symmetrized.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_dim("operator must be square", matrix.nrows(), matrix.ncols())?;
        if matrix.nrows() == 0 {
            return Err(TomoError::Range("operator dimension must be at least 1".into()));
        }
        let tolerance = Self::TOLERANCE * (1.0 + linalg::max_abs(&matrix));
        let asymmetry = linalg::hermitian_asymmetry(&matrix);
        if asymmetry > tolerance || !asymmetry.is_finite() {
            return Err(TomoError::NotHermitian {
                asymmetry,
                tolerance,
            });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: linalg::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v = CVector::from_iterator(diag.len(), diag.iter().map(|&x| linalg::c(x, 0.0)));
        Self {
            matrix: CMatrix::from_diagonal(&v),
        }
    }

    /// Rank-one `|v><v|` (no normalization applied).
    pub fn projector(v: &CVector) -> Self {
        Self {
            matrix: linalg::outer(v),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Real part of the trace (the imaginary part vanishes for Hermitian input).
    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim("operator sum", self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim("operator difference", self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: linalg::kron(&self.matrix, &other.matrix),
        }
    }

    /// `sum_j w_j ops_j` with real weights; `ops` must be non-empty.
    pub fn real_combination(weights: &[f64], ops: &[HermitianOperator]) -> Result<Self> {
        check_dim("weight count", ops.len(), weights.len())?;
        let first = ops
            .first()
            .ok_or_else(|| TomoError::Range("empty operator list".into()))?;
        let dim = first.dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, op) in weights.iter().zip(ops) {
            check_dim("operator list", dim, op.dim())?;
            acc += op.matrix.scale(*w);
        }
        Ok(Self { matrix: acc })
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        linalg::frobenius(&(&self.matrix - &other.matrix))
    }
}

/// `(a|b) = tr(a† b)`.
pub fn trace_inner_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<Complex64> {
    check_dim("trace inner product", a.dim(), b.dim())?;
    Ok(a.matrix.dotc(&b.matrix))
}

/// Ordered list of operators sharing one Hilbert-space dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<HermitianOperator>,
    labels: Vec<String>,
}

impl OperatorBasis {
    /// Builds a basis with labels `N0, N1, ...`.
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let labels = (0..elements.len()).map(|j| format!("N{j}")).collect();
        Self::with_labels(elements, labels)
    }

    pub fn with_labels(elements: Vec<HermitianOperator>, labels: Vec<String>) -> Result<Self> {
        let dim = elements
            .first()
            .map(HermitianOperator::dim)
            .ok_or_else(|| TomoError::Range("operator basis must be non-empty".into()))?;
        for e in &elements {
            check_dim("basis element dimension", dim, e.dim())?;
        }
        check_dim("label count", elements.len(), labels.len())?;
        Ok(Self {
            dim,
            elements,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Matrix of the Gram superoperator in the basis that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSuperoperator {
    entries: CMatrix,
    eigenvalues: Vec<f64>,
    rank: usize,
}

impl GramSuperoperator {
    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Smallest and largest nonzero eigenvalue: the optimal frame bounds of
    /// the basis viewed as an operator frame on its span.
    pub fn frame_bounds(&self) -> (f64, f64) {
        let largest = self.eigenvalues.last().copied().unwrap_or(0.0);
        let smallest = self
            .eigenvalues
            .iter()
            .copied()
            .find(|&v| v > linalg::PINV_CUTOFF * largest)
            .unwrap_or(0.0);
        (smallest, largest)
    }

    /// `lambda_max / lambda_min` over the whole spectrum; infinite when the
    /// Gram matrix is singular.
    pub fn condition_number(&self) -> f64 {
        let largest = self.eigenvalues.last().copied().unwrap_or(0.0);
        let smallest = self.eigenvalues.first().copied().unwrap_or(0.0);
        if smallest <= linalg::PINV_CUTOFF * largest {
            f64::INFINITY
        } else {
            largest / smallest
        }
    }
}

pub fn build_gram(basis: &OperatorBasis) -> GramSuperoperator {
    let n = basis.len();
    let mut entries = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let value = basis.elements[j].matrix.dotc(&basis.elements[k].matrix);
            entries[(j, k)] = value;
            entries[(k, j)] = value.conj();
        }
    }
    let eigenvalues = linalg::hermitian_eigenvalues(&entries);
    let rank = linalg::psd_rank(&eigenvalues);
    GramSuperoperator {
        entries,
        eigenvalues,
        rank,
    }
}

/// A basis together with its dual operators.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFrame {
    basis: OperatorBasis,
    duals: Vec<HermitianOperator>,
    gram: GramSuperoperator,
    complete: bool,
}

impl DualFrame {
    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    pub fn duals(&self) -> &[HermitianOperator] {
        &self.duals
    }

    pub fn gram(&self) -> &GramSuperoperator {
        &self.gram
    }

    /// True when the basis spans all `D^2` operator dimensions.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
}

/// Computes `Q_j = sum_k N_k (G^+)_{kj}` with the spectral pseudo-inverse of
/// the Gram matrix.
pub fn build_dual_frame(basis: &OperatorBasis) -> DualFrame {
    let gram = build_gram(basis);
    let (pinv, _) = linalg::hermitian_pinv(&gram.entries);
    let dim = basis.dim;
    let duals = (0..basis.len())
        .map(|j| {
            let mut acc = CMatrix::zeros(dim, dim);
            for (k, nk) in basis.elements.iter().enumerate() {
                acc += &nk.matrix * pinv[(k, j)];
            }
            // Hermitian up to rounding because G^+ is Hermitian and real for
            // Hermitian bases.
            let acc = (&acc + acc.adjoint()).scale(0.5);
            HermitianOperator { matrix: acc }
        })
        .collect();
    let complete = gram.rank == dim * dim;
    DualFrame {
        basis: basis.clone(),
        duals,
        gram,
        complete,
    }
}

/// Coefficients `c_j = (Q_j|a)` of `a = sum_j c_j N_j`.
pub fn expand(frame: &DualFrame, a: &HermitianOperator) -> Result<Vec<Complex64>> {
    check_dim("operator to expand", frame.dim(), a.dim())?;
    Ok(frame.duals.iter().map(|q| q.matrix.dotc(&a.matrix)).collect())
}

/// `sum_j c_j N_j`.
pub fn reconstruct(frame: &DualFrame, coefficients: &[Complex64]) -> Result<HermitianOperator> {
    check_dim("coefficient count", frame.len(), coefficients.len())?;
    let dim = frame.dim();
    let mut acc = CMatrix::zeros(dim, dim);
    for (cj, nj) in coefficients.iter().zip(&frame.basis.elements) {
        acc += &nj.matrix * *cj;
    }
    HermitianOperator::new(acc)
}

/// Expectation values `(N_j|a) = tr(N_j a)`: the data a measurement of the
/// basis operators yields.
pub fn measure(frame: &DualFrame, a: &HermitianOperator) -> Result<Vec<f64>> {
    check_dim("measured operator", frame.dim(), a.dim())?;
    Ok(frame
        .basis
        .elements
        .iter()
        .map(|n| n.matrix.dotc(&a.matrix).re)
        .collect())
}

/// `sum_j v_j Q_j`: inverts [`measure`] on the span of the basis.
pub fn reconstruct_from_measurements(frame: &DualFrame, values: &[f64]) -> Result<HermitianOperator> {
    check_dim("measurement count", frame.len(), values.len())?;
    HermitianOperator::real_combination(values, &frame.duals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE, ZERO};

    fn pauli() -> [HermitianOperator; 4] {
        let m = |v: [Complex64; 4]| HermitianOperator::new(CMatrix::from_row_slice(2, 2, &v)).unwrap();
        [
            m([ONE, ZERO, ZERO, ONE]),
            m([ZERO, ONE, ONE, ZERO]),
            m([ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]),
            m([ONE, ZERO, ZERO, -ONE]),
        ]
    }

    fn tetrahedron_basis() -> OperatorBasis {
        let [id, x, y, z] = pauli();
        let s = 1.0 / 3f64.sqrt();
        let dirs = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        let elems = dirs
            .iter()
            .map(|n| {
                HermitianOperator::real_combination(&[0.5, 0.5 * n[0], 0.5 * n[1], 0.5 * n[2]], &[id.clone(), x.clone(), y.clone(), z.clone()])
                    .unwrap()
            })
            .collect();
        OperatorBasis::new(elems).unwrap()
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(HermitianOperator::new(m), Err(TomoError::NotHermitian { .. })));
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(HermitianOperator::new(rect), Err(TomoError::Dimension { .. })));
    }

    #[test]
    fn inner_product_examples() {
        let [id, x, y, _] = pauli();
        assert_eq!(trace_inner_product(&id, &id).unwrap(), c(2.0, 0.0));
        assert!(trace_inner_product(&x, &y).unwrap().norm() < 1e-15);
        let big = HermitianOperator::identity(3);
        assert!(matches!(trace_inner_product(&id, &big), Err(TomoError::Dimension { .. })));
    }

    #[test]
    fn normalized_pauli_gram_is_identity() {
        let basis = OperatorBasis::new(pauli().iter().map(|p| p.scale(0.5f64.sqrt())).collect()).unwrap();
        let gram = build_gram(&basis);
        assert!(linalg::frobenius(&(gram.entries() - linalg::identity(4))) < 1e-14);
        assert_eq!(gram.rank(), 4);
        let frame = build_dual_frame(&basis);
        assert!(frame.is_complete());
        for (q, n) in frame.duals().iter().zip(basis.elements()) {
            assert!(q.frobenius_distance(n) < 1e-14);
        }
    }

    #[test]
    fn tetrahedron_gram_spectrum() {
        let gram = build_gram(&tetrahedron_basis());
        let expected = [2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 2.0];
        for (got, want) in gram.eigenvalues().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn single_element_gram() {
        let basis = OperatorBasis::new(vec![HermitianOperator::identity(2)]).unwrap();
        let gram = build_gram(&basis);
        assert_eq!(gram.entries()[(0, 0)], c(2.0, 0.0));
        assert_eq!(gram.rank(), 1);
        assert!(!build_dual_frame(&basis).is_complete());
    }

    #[test]
    fn tetrahedron_duals_and_coefficients() {
        let basis = tetrahedron_basis();
        let frame = build_dual_frame(&basis);
        let [id, x, y, z] = pauli();
        let s = 1.0 / 3f64.sqrt();
        let dirs = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        for (q, n) in frame.duals().iter().zip(dirs) {
            // (1/K)(1 + 3 sigma.n), K = 4
            let want = HermitianOperator::real_combination(
                &[0.25, 0.75 * n[0], 0.75 * n[1], 0.75 * n[2]],
                &[id.clone(), x.clone(), y.clone(), z.clone()],
            )
            .unwrap();
            assert!(q.frobenius_distance(&want) < 1e-12);
        }
        let bloch = [0.3, -0.2, 0.5];
        let rho = HermitianOperator::real_combination(
            &[0.5, 0.5 * bloch[0], 0.5 * bloch[1], 0.5 * bloch[2]],
            &[id.clone(), x.clone(), y.clone(), z.clone()],
        )
        .unwrap();
        let coeffs = expand(&frame, &rho).unwrap();
        for (cj, n) in coeffs.iter().zip(dirs) {
            let sn = bloch[0] * n[0] + bloch[1] * n[1] + bloch[2] * n[2];
            assert!((cj - c((1.0 + 3.0 * sn) / 4.0, 0.0)).norm() < 1e-12);
        }
        let mixed = id.scale(0.5);
        for cj in expand(&frame, &mixed).unwrap() {
            assert!((cj - c(0.25, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_coefficients_give_zero_operator() {
        let frame = build_dual_frame(&tetrahedron_basis());
        let op = reconstruct(&frame, &[ZERO; 4]).unwrap();
        assert_eq!(op, HermitianOperator::zeros(2));
        assert!(matches!(reconstruct(&frame, &[ZERO; 3]), Err(TomoError::Dimension { .. })));
    }

    #[test]
    fn rank_deficient_basis_projects_onto_span() {
        let [id, x, _, z] = pauli();
        let basis = OperatorBasis::new(vec![id.clone(), z.clone()]).unwrap();
        let frame = build_dual_frame(&basis);
        assert!(!frame.is_complete());
        let rho = HermitianOperator::real_combination(&[0.5, 0.15, 0.1], &[id.clone(), x, z.clone()]).unwrap();
        let back = reconstruct(&frame, &expand(&frame, &rho).unwrap()).unwrap();
        let want = HermitianOperator::real_combination(&[0.5, 0.1], &[id, z]).unwrap();
        assert!(back.frobenius_distance(&want) < 1e-14);
    }
}
