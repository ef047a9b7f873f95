//! Dense complex linear algebra helpers shared by every module.
//!
//! Everything is stored as `nalgebra::DMatrix<Complex64>`; target dimensions
//! are small (at most a few hundred), so the dense Hermitian eigensolver in
//! nalgebra is used throughout.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative cutoff below which Gram / frame-operator eigenvalues count as zero.
pub const PINV_CUTOFF: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |m_ij - conj(m_ji)|`.
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in ascending order with the matching eigenvectors
/// as the columns of the second component.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    // Symmetrize so tiny rounding asymmetries never leak into the solver.
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Pseudo-inverse of a Hermitian PSD matrix, treating eigenvalues below
/// `PINV_CUTOFF * max eigenvalue` as zero. Returns the inverse and the rank.
pub fn hermitian_pinv(m: &CMatrix) -> (CMatrix, usize) {
    let (values, vectors) = hermitian_eigen(m);
    let largest = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cutoff = PINV_CUTOFF * largest;
    let n = values.len();
    let mut inv = CMatrix::zeros(n, n);
    let mut rank = 0;
    for (k, &lambda) in values.iter().enumerate() {
        if lambda > cutoff {
            rank += 1;
            let v = vectors.column(k);
            inv += (v * v.adjoint()).scale(1.0 / lambda);
        }
    }
    (inv, rank)
}

/// Rank of a Hermitian PSD matrix under the pseudo-inverse cutoff.
pub fn psd_rank(values: &[f64]) -> usize {
    let largest = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    values.iter().filter(|&&v| v > PINV_CUTOFF * largest).count()
}

/// Principal square root of a Hermitian matrix; negative eigenvalues are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        if lambda > 0.0 {
            let v = vectors.column(k);
            out += (v * v.adjoint()).scale(lambda.sqrt());
        }
    }
    out
}

/// `exp(-i H)` for Hermitian `H`, through its spectral decomposition.
pub fn unitary_exp(h: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(h);
    let phases = CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::from_polar(1.0, -v)),
    ));
    &vectors * phases * vectors.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Partial transpose over one tensor factor of a multipartite operator.
pub fn partial_transpose(m: &CMatrix, dims: &[usize], subsystem: usize) -> CMatrix {
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total, "operator dimension must equal product of factors");
    let decompose = |mut idx: usize| {
        let mut digits = vec![0usize; dims.len()];
        for (slot, &d) in digits.iter_mut().zip(dims).rev() {
            *slot = idx % d;
            idx /= d;
        }
        digits
    };
    let compose = |digits: &[usize]| digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x);
    let mut out = CMatrix::zeros(total, total);
    for row in 0..total {
        for col in 0..total {
            let mut r = decompose(row);
            let mut s = decompose(col);
            std::mem::swap(&mut r[subsystem], &mut s[subsystem]);
            out[(compose(&r), compose(&s))] = m[(row, col)];
        }
    }
    out
}

/// `x† y`, conjugate-linear in the first argument.
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    x.dotc(y)
}
