//! Finite frames in `C^n`: analysis and synthesis maps, the frame operator,
//! canonical frame coefficients and the projection method.
//!
//! Inner products are conjugate-linear in the first slot,
//! `<x, y> = sum_k conj(x_k) y_k`. The analysis map therefore returns
//! `<f_i, f>`, which makes synthesis its adjoint and
//! `S = synthesis . analysis = sum_i f_i f_i†`.

use num_complex::Complex64;

use crate::error::{check_dim, Result, TomoError};
use crate::linalg::{self, CMatrix, CVector};

/// Absolute tolerance used when deciding whether a vector lies in the span.
pub const SPAN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct VectorFrame {
    dim: usize,
    vectors: Vec<CVector>,
    bounds: Option<(f64, f64)>,
}

impl VectorFrame {
    pub fn new(vectors: Vec<CVector>) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| TomoError::Range("frame must contain at least one vector".into()))?;
        if dim == 0 {
            return Err(TomoError::Range("frame vectors must be non-empty".into()));
        }
        for v in &vectors {
            check_dim("frame vector length", dim, v.len())?;
        }
        Ok(Self {
            dim,
            vectors,
            bounds: None,
        })
    }

    /// Attaches frame bounds; requires `0 < lower <= upper`.
    pub fn with_bounds(mut self, lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && lower <= upper) {
            return Err(TomoError::Range(format!(
                "frame bounds must satisfy 0 < A <= B, got ({lower}, {upper})"
            )));
        }
        self.bounds = Some((lower, upper));
        Ok(self)
    }

    /// Records the optimal bounds computed by [`frame_operator`].
    pub fn with_optimal_bounds(self) -> Result<Self> {
        let (a, b) = frame_operator(&self).bounds();
        self.with_bounds(a, b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    /// The first `n` vectors as a frame for their own span.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(TomoError::Range(format!(
                "sub-frame size {n} outside 1..={}",
                self.len()
            )));
        }
        Self::new(self.vectors[..n].to_vec())
    }

    /// Synthesis matrix `T` whose columns are the frame vectors.
    pub fn synthesis_matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.vectors)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameOperatorData {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
}

impl FrameOperatorData {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Optimal bounds on the span: smallest nonzero and largest eigenvalue.
    pub fn bounds(&self) -> (f64, f64) {
        let largest = self.eigenvalues.last().copied().unwrap_or(0.0);
        let smallest = self
            .eigenvalues
            .iter()
            .copied()
            .find(|&v| v > linalg::PINV_CUTOFF * largest)
            .unwrap_or(largest);
        (smallest, largest)
    }

    pub fn rank(&self) -> usize {
        linalg::psd_rank(&self.eigenvalues)
    }

    pub fn is_tight(&self, tolerance: f64) -> bool {
        let (a, b) = self.bounds();
        (b - a).abs() <= tolerance * b.max(1.0)
    }
}

/// `T* f = {<f_i, f>}`.
pub fn analysis(frame: &VectorFrame, f: &CVector) -> Result<Vec<Complex64>> {
    check_dim("analysed vector", frame.dim, f.len())?;
    Ok(frame.vectors.iter().map(|fi| linalg::inner(fi, f)).collect())
}

/// `T c = sum_i c_i f_i`.
pub fn synthesis(frame: &VectorFrame, coeffs: &[Complex64]) -> Result<CVector> {
    check_dim("coefficient count", frame.len(), coeffs.len())?;
    let mut acc = CVector::zeros(frame.dim);
    for (fi, ci) in frame.vectors.iter().zip(coeffs) {
        acc += fi * *ci;
    }
    Ok(acc)
}

pub fn frame_operator(frame: &VectorFrame) -> FrameOperatorData {
    let t = frame.synthesis_matrix();
    let mut matrix = &t * t.adjoint();
    // Exactly Hermitian for the eigensolver and for downstream comparisons.
    matrix = (&matrix + matrix.adjoint()).scale(0.5);
    let eigenvalues = linalg::hermitian_eigenvalues(&matrix);
    FrameOperatorData {
        matrix,
        eigenvalues,
    }
}

/// Canonical coefficients `<S^+ f_i, f>`; `f` must lie in the span.
pub fn frame_coefficients(frame: &VectorFrame, f: &CVector) -> Result<Vec<Complex64>> {
    check_dim("expanded vector", frame.dim, f.len())?;
    let data = frame_operator(frame);
    let (pinv, _) = linalg::hermitian_pinv(&data.matrix);
    let sf = &pinv * f;
    let projected = &data.matrix * &sf;
    let residual = (&projected - f).norm();
    if residual > SPAN_TOLERANCE * f.norm().max(1.0) {
        return Err(TomoError::Span { residual });
    }
    Ok(frame.vectors.iter().map(|fi| linalg::inner(fi, &sf)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// Finite-section coefficients `<S_n^+ f_i, f>`, `i < n`.
    pub coefficients: Vec<Complex64>,
    /// `P_n f`, the orthogonal projection onto `span{f_1..f_n}`.
    pub projected: CVector,
    /// `|P_n f - f|`.
    pub error: f64,
}

/// Projection method on the first `n` frame vectors.
pub fn projection_method(frame: &VectorFrame, f: &CVector, n: usize) -> Result<Projection> {
    check_dim("projected vector", frame.dim, f.len())?;
    let sub = frame.prefix(n)?;
    let data = frame_operator(&sub);
    let (pinv, _) = linalg::hermitian_pinv(&data.matrix);
    let sf = &pinv * f;
    let coefficients: Vec<Complex64> = sub.vectors.iter().map(|fi| linalg::inner(fi, &sf)).collect();
    let projected = synthesis(&sub, &coefficients)?;
    let error = (&projected - f).norm();
    Ok(Projection {
        coefficients,
        projected,
        error,
    })
}

/// One row of [`projection_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepStep {
    pub n: usize,
    pub error: f64,
    /// `max_{i<n} |<S_n^+ f_i, f> - <S^+ f_i, f>|` against the full-frame
    /// coefficients. Not required to decrease.
    pub coefficient_deviation: f64,
}

/// Runs the projection method for `n = 1..=len` and compares the finite
/// section coefficients with the canonical ones. `f` must lie in the span of
/// the whole frame.
pub fn projection_sweep(frame: &VectorFrame, f: &CVector) -> Result<Vec<SweepStep>> {
    let full = frame_coefficients(frame, f)?;
    (1..=frame.len())
        .map(|n| {
            let p = projection_method(frame, f, n)?;
            let coefficient_deviation = p
                .coefficients
                .iter()
                .zip(&full)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            Ok(SweepStep {
                n,
                error: p.error,
                coefficient_deviation,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE, ZERO};

    fn e(dim: usize, k: usize) -> CVector {
        let mut v = CVector::zeros(dim);
        v[k] = ONE;
        v
    }

    fn repeated_frame() -> VectorFrame {
        VectorFrame::new(vec![e(2, 0), e(2, 0), e(2, 1)]).unwrap()
    }

    fn mercedes_benz() -> VectorFrame {
        let vs = (0..3)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                CVector::from_vec(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)])
            })
            .collect();
        VectorFrame::new(vs).unwrap()
    }

    #[test]
    fn analysis_examples() {
        let frame = VectorFrame::new((0..3).map(|k| e(3, k)).collect()).unwrap();
        let f = CVector::from_vec(vec![ONE, c(0.0, 2.0), ZERO]);
        assert_eq!(analysis(&frame, &f).unwrap(), vec![ONE, c(0.0, 2.0), ZERO]);
        assert_eq!(analysis(&repeated_frame(), &e(2, 0)).unwrap(), vec![ONE, ONE, ZERO]);
        assert_eq!(analysis(&frame, &CVector::zeros(3)).unwrap(), vec![ZERO; 3]);
        assert!(matches!(analysis(&frame, &e(2, 0)), Err(TomoError::Dimension { .. })));
    }

    #[test]
    fn synthesis_examples() {
        let frame = repeated_frame();
        assert_eq!(synthesis(&frame, &[ZERO, ZERO, ONE]).unwrap(), e(2, 1));
        assert_eq!(synthesis(&frame, &[ONE, ONE, ZERO]).unwrap(), e(2, 0) * c(2.0, 0.0));
        assert_eq!(synthesis(&frame, &[ZERO; 3]).unwrap(), CVector::zeros(2));
        assert!(matches!(synthesis(&frame, &[ONE]), Err(TomoError::Dimension { .. })));
    }

    #[test]
    fn frame_operator_examples() {
        let onb = VectorFrame::new((0..4).map(|k| e(4, k)).collect()).unwrap();
        let data = frame_operator(&onb);
        assert_eq!(data.bounds(), (1.0, 1.0));
        assert!(data.is_tight(1e-12));

        let data = frame_operator(&repeated_frame());
        assert!(linalg::frobenius(&(data.matrix() - CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0, 0.0), ONE])))) < 1e-15);
        let (a, b) = data.bounds();
        assert!((a - 1.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);

        let data = frame_operator(&mercedes_benz());
        assert!(linalg::frobenius(&(data.matrix() - linalg::identity(2).scale(1.5))) < 1e-14);
        assert!(data.is_tight(1e-12));
        let frame = mercedes_benz().with_optimal_bounds().unwrap();
        let (a, b) = frame.bounds().unwrap();
        assert!((a - 1.5).abs() < 1e-13 && (b - 1.5).abs() < 1e-13);
    }

    #[test]
    fn frame_coefficients_examples() {
        let coeffs = frame_coefficients(&repeated_frame(), &e(2, 0)).unwrap();
        for (got, want) in coeffs.iter().zip([0.5, 0.5, 0.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-15);
        }
        // Tight frame: analysis / A.
        let frame = mercedes_benz();
        let f = CVector::from_vec(vec![c(0.3, 0.1), c(-1.2, 0.0)]);
        let plain = analysis(&frame, &f).unwrap();
        for (got, want) in frame_coefficients(&frame, &f).unwrap().iter().zip(plain) {
            assert!((got - want / 1.5).norm() < 1e-14);
        }
    }

    #[test]
    fn outside_span_is_rejected() {
        let frame = VectorFrame::new(vec![e(3, 0), e(3, 1)]).unwrap();
        match frame_coefficients(&frame, &e(3, 2)) {
            Err(TomoError::Span { residual }) => assert!((residual - 1.0).abs() < 1e-14),
            other => panic!("expected span error, got {other:?}"),
        }
    }

    #[test]
    fn projection_edge_cases() {
        let frame = mercedes_benz();
        let f = CVector::from_vec(vec![c(0.4, 0.0), c(0.2, -0.3)]);
        let full = projection_method(&frame, &f, 3).unwrap();
        assert!(full.error < 1e-12);
        let f1 = frame.vectors()[0].clone();
        let one = projection_method(&frame, &f1, 1).unwrap();
        assert!(one.error < 1e-15);
        assert!(matches!(projection_method(&frame, &f, 0), Err(TomoError::Range(_))));
        assert!(matches!(projection_method(&frame, &f, 4), Err(TomoError::Range(_))));
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(repeated_frame().with_bounds(0.0, 1.0).is_err());
        assert!(repeated_frame().with_bounds(2.0, 1.0).is_err());
        assert!(VectorFrame::new(vec![]).is_err());
    }
}
