//! Qudit and qubit tomography with generalized Gell-Mann generators and
//! rank-one projector quorums.
//!
//! The `D^2 - 1` generators of SU(D) are ordered as the diagonal block
//! `Gamma_a` (`a = 2..D`), then the symmetric `Gamma+_ab` and finally the
//! antisymmetric `Gamma-_ab` (`1 <= a < b <= D`, lexicographic). Together with
//! `lambda_0 = I / sqrt(D)` they form an orthonormal operator basis.
//!
//! A projector quorum `{N_a}` is reconstructed through its dual operators,
//! `rho = sum_a tr(N_a rho) Q_a`. For quorums with the design property the
//! duals have the closed form `Q_a = D(D+1)/K (N_a - I/(D+1))`; everything
//! else falls back to Gram inversion.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use crate::error::{check_dim, Result, TomoError};
use crate::linalg::{self, c, CMatrix, CVector, I, ONE, ZERO};
use crate::operator::{build_dual_frame, HermitianOperator, OperatorBasis};
use crate::report::TomographyReport;
use crate::state::{self, DensityMatrix};

/// Tolerance for the qubit design conditions.
pub const DESIGN_TOLERANCE: f64 = 1e-9;
/// Default cap on the number of product projectors `K^M`.
pub const DEFAULT_PRODUCT_CAP: usize = 4096;
/// Accepted slack on measured probabilities outside `[0, 1]`.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// Orthonormal SU(D) generator basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SuDBasis {
    d: usize,
    generators: Vec<HermitianOperator>,
    labels: Vec<String>,
    identity_element: HermitianOperator,
}

impl SuDBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    /// `lambda_1 .. lambda_{D^2-1}`.
    pub fn generators(&self) -> &[HermitianOperator] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `lambda_0 = I / sqrt(D)`.
    pub fn identity_element(&self) -> &HermitianOperator {
        &self.identity_element
    }

    /// All `D^2` elements, `lambda_0` first.
    pub fn operator_basis(&self) -> OperatorBasis {
        let mut elems = vec![self.identity_element.clone()];
        elems.extend(self.generators.iter().cloned());
        let mut labels = vec!["I/sqrt(D)".to_string()];
        labels.extend(self.labels.iter().cloned());
        OperatorBasis::with_labels(elems, labels).expect("generators share a dimension")
    }

    /// Position of `Gamma_a` (1-based `a`, `2 <= a <= D`).
    pub fn diagonal_index(&self, a: usize) -> usize {
        assert!(a >= 2 && a <= self.d, "diagonal generator index out of range");
        a - 2
    }

    fn pair_offset(&self, a: usize, b: usize) -> usize {
        assert!(a >= 1 && a < b && b <= self.d, "pair index out of range");
        // pairs (1,2), (1,3), ..., (1,D), (2,3), ...
        let before: usize = (1..a).map(|r| self.d - r).sum();
        before + (b - a - 1)
    }

    /// Position of `Gamma+_ab` (1-based, `a < b`).
    pub fn symmetric_index(&self, a: usize, b: usize) -> usize {
        self.d - 1 + self.pair_offset(a, b)
    }

    /// Position of `Gamma-_ab` (1-based, `a < b`).
    pub fn antisymmetric_index(&self, a: usize, b: usize) -> usize {
        self.d - 1 + self.d * (self.d - 1) / 2 + self.pair_offset(a, b)
    }

    /// Rebuilds the matrix unit `|a><b|` (1-based) from the generators using
    /// the inversion identities.
    pub fn matrix_unit(&self, a: usize, b: usize) -> CMatrix {
        let d = self.d;
        let gen = |k: usize| self.generators[k].matrix();
        if a == b {
            // |a><a| = I/D - (a-1)/sqrt(a(a-1)) Gamma_a + sum_{b>a} Gamma_b / sqrt(b(b-1))
            let mut m = linalg::identity(d).scale(1.0 / d as f64);
            if a >= 2 {
                let af = a as f64;
                m -= gen(self.diagonal_index(a)).scale((af - 1.0) / (af * (af - 1.0)).sqrt());
            }
            for bb in a + 1..=d {
                let bf = bb as f64;
                m += gen(self.diagonal_index(bb)).scale(1.0 / (bf * (bf - 1.0)).sqrt());
            }
            m
        } else if a < b {
            (gen(self.symmetric_index(a, b)) + gen(self.antisymmetric_index(a, b)) * I).scale(FRAC_1_SQRT_2)
        } else {
            (gen(self.symmetric_index(b, a)) - gen(self.antisymmetric_index(b, a)) * I).scale(FRAC_1_SQRT_2)
        }
    }

    /// `c_j = D tr(rho lambda_j)`; `rho` must have unit trace.
    pub fn expand(&self, rho: &HermitianOperator) -> Result<BlochVector> {
        check_dim("state dimension", self.d, rho.dim())?;
        let trace = rho.trace();
        if (trace - 1.0).abs() > state::STATE_TOLERANCE {
            return Err(TomoError::State(format!("trace is {trace}, expected 1")));
        }
        let d = self.d as f64;
        let c = self
            .generators
            .iter()
            .map(|g| d * g.matrix().dotc(rho.matrix()).re)
            .collect();
        Ok(BlochVector { d: self.d, c })
    }

    /// `(I + sum_j c_j lambda_j) / D`.
    pub fn contract(&self, v: &BlochVector) -> Result<BlochState> {
        check_dim("Bloch vector dimension", self.d, v.d)?;
        let d = self.d as f64;
        let mut m = linalg::identity(self.d).scale(1.0 / d);
        for (cj, g) in v.c.iter().zip(&self.generators) {
            m += g.matrix().scale(cj / d);
        }
        let operator = HermitianOperator::new(m)?;
        let min_eigenvalue = operator.min_eigenvalue();
        Ok(BlochState {
            is_state: min_eigenvalue >= -state::STATE_TOLERANCE,
            operator,
            min_eigenvalue,
        })
    }
}

pub fn su_generators(d: usize) -> Result<SuDBasis> {
    if d < 2 {
        return Err(TomoError::Range(format!("SU(D) needs D >= 2, got {d}")));
    }
    let unit = |a: usize, b: usize| {
        let mut m = CMatrix::zeros(d, d);
        m[(a - 1, b - 1)] = ONE;
        m
    };
    let mut generators = Vec::with_capacity(d * d - 1);
    let mut labels = Vec::with_capacity(d * d - 1);
    for a in 2..=d {
        let mut m = CMatrix::zeros(d, d);
        for b in 1..a {
            m += unit(b, b);
        }
        m -= unit(a, a).scale((a - 1) as f64);
        let af = a as f64;
        generators.push(m.scale(1.0 / (af * (af - 1.0)).sqrt()));
        labels.push(format!("G_{a}"));
    }
    for a in 1..=d {
        for b in a + 1..=d {
            generators.push((unit(a, b) + unit(b, a)).scale(FRAC_1_SQRT_2));
            labels.push(format!("G+_{a}{b}"));
        }
    }
    for a in 1..=d {
        for b in a + 1..=d {
            generators.push((unit(a, b) - unit(b, a)) * c(0.0, -FRAC_1_SQRT_2));
            labels.push(format!("G-_{a}{b}"));
        }
    }
    let generators = generators
        .into_iter()
        .map(HermitianOperator::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(SuDBasis {
        d,
        generators,
        labels,
        identity_element: HermitianOperator::identity(d).scale(1.0 / (d as f64).sqrt()),
    })
}

/// Generalized Bloch vector, `rho = (I + c . lambda) / D`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    d: usize,
    c: Vec<f64>,
}

impl BlochVector {
    pub fn new(d: usize, c: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(TomoError::Range(format!("Bloch vectors need D >= 2, got {d}")));
        }
        check_dim("Bloch vector length", d * d - 1, c.len())?;
        if c.iter().any(|v| !v.is_finite()) {
            return Err(TomoError::Range("Bloch vector must be finite".into()));
        }
        Ok(Self { d, c })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn components(&self) -> &[f64] {
        &self.c
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Operator produced by [`bloch_contract`] and whether it is a valid state.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochState {
    pub operator: HermitianOperator,
    pub min_eigenvalue: f64,
    pub is_state: bool,
}

pub fn bloch_expand(rho: &HermitianOperator) -> Result<BlochVector> {
    su_generators(rho.dim())?.expand(rho)
}

pub fn bloch_contract(v: &BlochVector) -> Result<BlochState> {
    su_generators(v.d)?.contract(v)
}

/// `[sigma_x, sigma_y, sigma_z]`.
pub fn pauli_matrices() -> [CMatrix; 3] {
    [
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// `(1 + a n . sigma) / 2` scaled by `scale`, i.e. `scale/2 (1 + a n.sigma)`.
fn pauli_combination(scale: f64, a: f64, n: &[f64; 3]) -> HermitianOperator {
    let [x, y, z] = pauli_matrices();
    let m = (linalg::identity(2) + (x.scale(n[0]) + y.scale(n[1]) + z.scale(n[2])).scale(a)).scale(scale);
    HermitianOperator::new(m).expect("Pauli combinations are Hermitian")
}

/// Qubit projector `(1 + n . sigma) / 2`.
pub fn qubit_projector(n: &[f64; 3]) -> HermitianOperator {
    pauli_combination(0.5, 1.0, n)
}

/// Closed-form qubit dual `(1 + 3 n . sigma) / K`.
pub fn qubit_design_dual(n: &[f64; 3], k: usize) -> HermitianOperator {
    pauli_combination(1.0 / k as f64, 3.0, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedDesign {
    Tetrahedron,
    Octahedron,
    Icosahedron,
}

impl NamedDesign {
    pub const ALL: [NamedDesign; 3] = [Self::Tetrahedron, Self::Octahedron, Self::Icosahedron];

    pub fn name(self) -> &'static str {
        match self {
            Self::Tetrahedron => "tetrahedron",
            Self::Octahedron => "octahedron",
            Self::Icosahedron => "icosahedron",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == name)
    }

    /// Unit Bloch directions of the vertices.
    pub fn directions(self) -> Vec<[f64; 3]> {
        let raw: Vec<[f64; 3]> = match self {
            Self::Tetrahedron => vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
            Self::Octahedron => vec![
                [1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0],
            ],
            Self::Icosahedron => {
                let phi = (1.0 + 5f64.sqrt()) / 2.0;
                let mut v = Vec::with_capacity(12);
                for s1 in [1.0, -1.0] {
                    for s2 in [1.0, -1.0] {
                        v.push([0.0, s1, s2 * phi]);
                        v.push([s1, s2 * phi, 0.0]);
                        v.push([s2 * phi, 0.0, s1]);
                    }
                }
                v
            }
        };
        raw.into_iter().map(normalize3).collect()
    }
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

#[derive(Debug, Clone, PartialEq)]
pub enum QubitDesign {
    Named(NamedDesign),
    Explicit(Vec<[f64; 3]>),
}

/// Residuals of the two qubit design conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignResiduals {
    /// `|sum_a n_a|`.
    pub mean: f64,
    /// `max_jk |(1/K) sum_a n_aj n_ak - delta_jk / 3|`.
    pub second_moment: f64,
}

impl DesignResiduals {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.mean <= tolerance && self.second_moment <= tolerance
    }
}

pub fn design_residuals(directions: &[[f64; 3]]) -> DesignResiduals {
    let k = directions.len() as f64;
    let mut sum = [0.0; 3];
    let mut moment = [[0.0; 3]; 3];
    for n in directions {
        for j in 0..3 {
            sum[j] += n[j];
            for l in 0..3 {
                moment[j][l] += n[j] * n[l] / k;
            }
        }
    }
    let mean = (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]).sqrt();
    let mut second_moment = 0.0f64;
    for (j, row) in moment.iter().enumerate() {
        for (l, value) in row.iter().enumerate() {
            let target = if j == l { 1.0 / 3.0 } else { 0.0 };
            second_moment = second_moment.max((value - target).abs());
        }
    }
    DesignResiduals { mean, second_moment }
}

/// Rank-one projector quorum with precomputed duals.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorQuorum {
    d: usize,
    directions: Vec<Vec<f64>>,
    projectors: Vec<HermitianOperator>,
    duals: Vec<HermitianOperator>,
    labels: Vec<String>,
    gram_rank: usize,
    condition_number: f64,
}

impl ProjectorQuorum {
    /// Quorum from arbitrary pure states; duals by Gram inversion.
    ///
    /// Directions are the normalized generalized Bloch vectors of the states.
    pub fn from_states(d: usize, states: &[CVector]) -> Result<Self> {
        if states.is_empty() {
            return Err(TomoError::Range("quorum needs at least one state".into()));
        }
        let basis = su_generators(d)?;
        let mut projectors = Vec::with_capacity(states.len());
        let mut directions = Vec::with_capacity(states.len());
        for psi in states {
            check_dim("quorum state length", d, psi.len())?;
            let rho = DensityMatrix::pure(psi)?;
            let bloch = basis.expand(rho.operator())?;
            let norm = bloch.norm();
            directions.push(bloch.c.iter().map(|v| v / norm).collect());
            projectors.push(rho.operator().clone());
        }
        let labels = (0..states.len()).map(|k| format!("N{k}")).collect();
        Self::with_generic_duals(d, directions, projectors, labels)
    }

    /// `k` Haar-random pure states; informationally complete with
    /// probability one when `k >= D^2`.
    pub fn random<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Result<Self> {
        let states: Vec<CVector> = (0..k).map(|_| state::random_pure_state(d, rng)).collect();
        Self::from_states(d, &states)
    }

    fn with_generic_duals(
        d: usize,
        directions: Vec<Vec<f64>>,
        projectors: Vec<HermitianOperator>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let basis = OperatorBasis::with_labels(projectors.clone(), labels.clone())?;
        let frame = build_dual_frame(&basis);
        Ok(Self {
            d,
            directions,
            duals: frame.duals().to_vec(),
            projectors,
            labels,
            gram_rank: frame.gram().rank(),
            condition_number: frame.gram().condition_number(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.projectors.len()
    }

    /// Qubit quorums: unit vectors in `R^3` (Pauli order x, y, z). Qudit
    /// quorums: unit generalized Bloch directions in generator order. Empty
    /// for product quorums.
    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        &self.projectors
    }

    pub fn duals(&self) -> &[HermitianOperator] {
        &self.duals
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram_rank(&self) -> usize {
        self.gram_rank
    }

    pub fn is_complete(&self) -> bool {
        self.gram_rank == self.d * self.d
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn operator_basis(&self) -> OperatorBasis {
        OperatorBasis::with_labels(self.projectors.clone(), self.labels.clone())
            .expect("quorum projectors share a dimension")
    }

    /// Exact outcome probabilities `tr(N_a rho)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.projectors.iter().map(|n| rho.expectation(n)).collect()
    }

    /// `sum_a p_a Q_a`.
    pub fn invert(&self, probabilities: &[f64]) -> Result<HermitianOperator> {
        check_dim("probability count", self.k(), probabilities.len())?;
        HermitianOperator::real_combination(probabilities, &self.duals)
    }
}

/// Qubit quorum from a named design or an explicit direction list.
///
/// Explicit directions are normalized; zero vectors are rejected. The design
/// conditions must hold within `1e-9`.
pub fn qubit_design_quorum(design: &QubitDesign) -> Result<ProjectorQuorum> {
    let directions = match design {
        QubitDesign::Named(named) => named.directions(),
        QubitDesign::Explicit(list) => list
            .iter()
            .map(|v| {
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if n > 0.0 && n.is_finite() {
                    Ok(normalize3(*v))
                } else {
                    Err(TomoError::Data(format!("direction {v:?} cannot be normalized")))
                }
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let residuals = design_residuals(&directions);
    if !residuals.holds(DESIGN_TOLERANCE) {
        return Err(TomoError::Design {
            mean_residual: residuals.mean,
            moment_residual: residuals.second_moment,
        });
    }
    let projectors = directions.iter().map(qubit_projector).collect();
    let labels = match design {
        QubitDesign::Named(named) => (0..directions.len()).map(|k| format!("{}{k}", &named.name()[..3])).collect(),
        QubitDesign::Explicit(_) => (0..directions.len()).map(|k| format!("n{k}")).collect(),
    };
    ProjectorQuorum::with_generic_duals(
        2,
        directions.iter().map(|n| n.to_vec()).collect(),
        projectors,
        labels,
    )
}

/// Result of comparing a quorum against the design-form Gram superoperator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditGramCheck {
    /// Max entry deviation of the Gram superoperator (in the `lambda` basis)
    /// from `K/(D(D+1)) ((D+1)|I)(I|/D + T)`.
    pub gram_residual: f64,
    /// `D(D+1)/K (N_a - I/(D+1))`.
    pub closed_form_duals: Vec<HermitianOperator>,
    /// Gram pseudo-inverse duals.
    pub generic_duals: Vec<HermitianOperator>,
    /// Max entry deviation between the two dual families.
    pub dual_mismatch: f64,
}

impl QuditGramCheck {
    pub fn design_form_holds(&self, tolerance: f64) -> bool {
        self.gram_residual <= tolerance
    }

    /// Closed-form duals when the design form holds, generic ones otherwise.
    pub fn preferred_duals(&self, tolerance: f64) -> &[HermitianOperator] {
        if self.design_form_holds(tolerance) {
            &self.closed_form_duals
        } else {
            &self.generic_duals
        }
    }
}

pub fn qudit_quorum_gram(quorum: &ProjectorQuorum) -> Result<QuditGramCheck> {
    let d = quorum.d;
    let basis = quorum.operator_basis();
    let frame = build_dual_frame(&basis);
    let rank = frame.gram().rank();
    if rank < d * d {
        return Err(TomoError::Completeness {
            rank,
            required: d * d,
        });
    }
    let k = quorum.k() as f64;
    let df = d as f64;
    let lambdas = su_generators(d)?.operator_basis();
    let n2 = d * d;
    // Superoperator matrix sum_a (l_x|N_a)(N_a|l_y) in the orthonormal basis.
    let overlaps = CMatrix::from_fn(n2, quorum.k(), |x, a| {
        lambdas.elements()[x].matrix().dotc(quorum.projectors[a].matrix())
    });
    let superop = &overlaps * overlaps.adjoint();
    let mut expected = CMatrix::zeros(n2, n2);
    let prefactor = k / (df * (df + 1.0));
    expected[(0, 0)] = c(prefactor * (df + 1.0), 0.0);
    for x in 1..n2 {
        expected[(x, x)] = c(prefactor, 0.0);
    }
    let gram_residual = linalg::max_abs(&(superop - expected));

    let scale = df * (df + 1.0) / k;
    let shift = HermitianOperator::identity(d).scale(1.0 / (df + 1.0));
    let closed_form_duals = quorum
        .projectors
        .iter()
        .map(|n| n.sub(&shift).map(|m| m.scale(scale)))
        .collect::<Result<Vec<_>>>()?;
    let generic_duals = frame.duals().to_vec();
    let dual_mismatch = closed_form_duals
        .iter()
        .zip(&generic_duals)
        .map(|(a, b)| linalg::max_abs(&(a.matrix() - b.matrix())))
        .fold(0.0, f64::max);
    Ok(QuditGramCheck {
        gram_residual,
        closed_form_duals,
        generic_duals,
        dual_mismatch,
    })
}

pub(crate) fn check_probabilities(expected: usize, probabilities: &[f64]) -> Result<()> {
    check_dim("probability count", expected, probabilities.len())?;
    if let Some((i, p)) = probabilities
        .iter()
        .enumerate()
        .find(|(_, p)| !(**p >= -PROBABILITY_SLACK && **p <= 1.0 + PROBABILITY_SLACK))
    {
        return Err(TomoError::Data(format!("probability {i} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Linear inversion `rho = sum_a p_a Q_a`, with diagnostics against an
/// optional reference state.
pub fn reconstruct_from_probabilities(
    quorum: &ProjectorQuorum,
    probabilities: &[f64],
    reference: Option<&DensityMatrix>,
) -> Result<TomographyReport> {
    check_probabilities(quorum.k(), probabilities)?;
    let rho = quorum.invert(probabilities)?;
    Ok(TomographyReport::assess(
        rho,
        probabilities.to_vec(),
        reference,
        Some(quorum.condition_number),
    ))
}

/// Tensor-power quorum `N(a_1..a_M) = N_{a_1} x ... x N_{a_M}` with Kronecker
/// product duals; indices run with the first factor most significant.
pub fn product_quorum(base: &ProjectorQuorum, m: u32) -> Result<ProjectorQuorum> {
    product_quorum_with_cap(base, m, DEFAULT_PRODUCT_CAP)
}

pub fn product_quorum_with_cap(base: &ProjectorQuorum, m: u32, cap: usize) -> Result<ProjectorQuorum> {
    if m == 0 {
        return Err(TomoError::Range("product quorum needs M >= 1".into()));
    }
    if m == 1 {
        return Ok(base.clone());
    }
    let count = base
        .k()
        .checked_pow(m)
        .filter(|&n| n <= cap)
        .ok_or(TomoError::Resource {
            requested: base.k().saturating_pow(m),
            cap,
        })?;
    let mut projectors = base.projectors.clone();
    let mut duals = base.duals.clone();
    let mut labels = base.labels.clone();
    for _ in 1..m {
        let mut next_p = Vec::with_capacity(projectors.len() * base.k());
        let mut next_q = Vec::with_capacity(projectors.len() * base.k());
        let mut next_l = Vec::with_capacity(projectors.len() * base.k());
        for ((p, q), l) in projectors.iter().zip(&duals).zip(&labels) {
            for ((bp, bq), bl) in base.projectors.iter().zip(&base.duals).zip(&base.labels) {
                next_p.push(p.kron(bp));
                next_q.push(q.kron(bq));
                next_l.push(format!("{l}.{bl}"));
            }
        }
        projectors = next_p;
        duals = next_q;
        labels = next_l;
    }
    debug_assert_eq!(projectors.len(), count);
    Ok(ProjectorQuorum {
        d: base.d.pow(m),
        directions: Vec::new(),
        projectors,
        duals,
        labels,
        gram_rank: base.gram_rank.pow(m),
        condition_number: base.condition_number.powi(m as i32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qubit_generators_are_scaled_paulis() {
        let basis = su_generators(2).unwrap();
        let [x, y, z] = pauli_matrices();
        let s = FRAC_1_SQRT_2;
        assert!(linalg::max_abs(&(basis.generators()[0].matrix() - z.scale(s))) < 1e-15);
        assert!(linalg::max_abs(&(basis.generators()[1].matrix() - x.scale(s))) < 1e-15);
        assert!(linalg::max_abs(&(basis.generators()[2].matrix() - y.scale(s))) < 1e-15);
    }

    #[test]
    fn qutrit_generators_are_gell_mann_over_sqrt2() {
        let basis = su_generators(3).unwrap();
        assert_eq!(basis.generators().len(), 8);
        let r = |v: [f64; 9]| CMatrix::from_iterator(3, 3, v.iter().map(|&x| c(x, 0.0))).transpose();
        let lambda3 = r([1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
        let lambda8 = r([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -2.0]).scale(1.0 / 3f64.sqrt());
        let lambda1 = r([0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let mut lambda2 = CMatrix::zeros(3, 3);
        lambda2[(0, 1)] = -I;
        lambda2[(1, 0)] = I;
        let s = FRAC_1_SQRT_2;
        // Gamma_2 = (|1><1| - |2><2|)/sqrt 2 = lambda_3/sqrt 2
        assert!(linalg::max_abs(&(basis.generators()[0].matrix() - lambda3.scale(s))) < 1e-15);
        assert!(linalg::max_abs(&(basis.generators()[1].matrix() - lambda8.scale(s))) < 1e-15);
        assert!(linalg::max_abs(&(basis.generators()[basis.symmetric_index(1, 2)].matrix() - lambda1.scale(s))) < 1e-15);
        assert!(linalg::max_abs(&(basis.generators()[basis.antisymmetric_index(1, 2)].matrix() - lambda2.scale(s))) < 1e-15);
        assert_eq!(su_generators(5).unwrap().generators().len(), 24);
        assert!(matches!(su_generators(1), Err(TomoError::Range(_))));
    }

    #[test]
    fn bloch_examples() {
        let basis = su_generators(3).unwrap();
        let mixed = DensityMatrix::maximally_mixed(3);
        assert!(basis.expand(mixed.operator()).unwrap().norm() < 1e-15);

        let one = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        let v = bloch_expand(&one).unwrap();
        assert!((v.components()[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!(v.components()[1].abs() < 1e-15 && v.components()[2].abs() < 1e-15);

        let bad = HermitianOperator::from_real_diagonal(&[1.0, 1.0]);
        assert!(matches!(bloch_expand(&bad), Err(TomoError::State(_))));
    }

    #[test]
    fn contract_flags_unphysical_vectors() {
        let zero = BlochVector::new(4, vec![0.0; 15]).unwrap();
        let st = bloch_contract(&zero).unwrap();
        assert!(st.operator.frobenius_distance(&HermitianOperator::identity(4).scale(0.25)) < 1e-15);
        // Qubit generator normalization: |n| = 1 on the Pauli sphere is |c| = sqrt 2.
        let s2 = 2f64.sqrt();
        let pure = bloch_contract(&BlochVector::new(2, vec![0.0, s2 * 0.6, s2 * 0.8]).unwrap()).unwrap();
        assert!(pure.is_state && pure.min_eigenvalue.abs() < 1e-14);
        let bad = bloch_contract(&BlochVector::new(2, vec![3.0 * s2, 0.0, 0.0]).unwrap()).unwrap();
        assert!(!bad.is_state);
        assert!((bad.min_eigenvalue + 1.0).abs() < 1e-14);
        assert!(BlochVector::new(2, vec![0.0; 2]).is_err());
    }

    #[test]
    fn named_designs_pass_and_antipodal_pair_fails() {
        for design in NamedDesign::ALL {
            let q = qubit_design_quorum(&QubitDesign::Named(design)).unwrap();
            assert!(q.is_complete(), "{design:?}");
            let r = design_residuals(&design.directions());
            assert!(r.holds(1e-12), "{design:?}: {r:?}");
        }
        let err = qubit_design_quorum(&QubitDesign::Explicit(vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])).unwrap_err();
        match err {
            TomoError::Design {
                mean_residual,
                moment_residual,
            } => {
                assert!(mean_residual < 1e-15);
                assert!((moment_residual - 2.0 / 3.0).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tetrahedron_closed_form_duals_agree() {
        for design in [NamedDesign::Tetrahedron, NamedDesign::Octahedron] {
            let q = qubit_design_quorum(&QubitDesign::Named(design)).unwrap();
            let check = qudit_quorum_gram(&q).unwrap();
            assert!(check.gram_residual < 1e-12);
            assert!(check.dual_mismatch < 1e-10);
            for (dual, n) in check.closed_form_duals.iter().zip(design.directions()) {
                let want = qubit_design_dual(&n, q.k());
                assert!(linalg::max_abs(&(dual.matrix() - want.matrix())) < 1e-14);
            }
        }
    }

    #[test]
    fn incomplete_quorum_is_reported() {
        let s = FRAC_1_SQRT_2;
        let states = vec![
            CVector::from_vec(vec![ONE, ZERO]),
            CVector::from_vec(vec![ZERO, ONE]),
            CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
        ];
        let q = ProjectorQuorum::from_states(2, &states).unwrap();
        assert!(!q.is_complete());
        assert!(matches!(qudit_quorum_gram(&q), Err(TomoError::Completeness { rank: 3, required: 4 })));
    }

    #[test]
    fn random_qutrit_quorum_falls_back_to_generic_duals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = ProjectorQuorum::random(3, 12, &mut rng).unwrap();
        assert!(q.is_complete());
        let check = qudit_quorum_gram(&q).unwrap();
        assert!(!check.design_form_holds(1e-8));
        let rho = state::random_density_matrix(3, &mut rng);
        let p = q.probabilities(&rho).unwrap();
        let report = reconstruct_from_probabilities(&q, &p, Some(&rho)).unwrap();
        assert!(report.trace_distance.unwrap() < 1e-9);
    }

    #[test]
    fn probability_validation() {
        let q = qubit_design_quorum(&QubitDesign::Named(NamedDesign::Tetrahedron)).unwrap();
        assert!(matches!(reconstruct_from_probabilities(&q, &[0.5; 3], None), Err(TomoError::Dimension { .. })));
        assert!(matches!(
            reconstruct_from_probabilities(&q, &[0.5, 0.5, 1.2, 0.5], None),
            Err(TomoError::Data(_))
        ));
        let report = reconstruct_from_probabilities(&q, &[0.5; 4], None).unwrap();
        assert!(report.reconstructed.frobenius_distance(&HermitianOperator::identity(2).scale(0.5)) < 1e-14);
    }

    #[test]
    fn product_cap_and_identity() {
        let q = qubit_design_quorum(&QubitDesign::Named(NamedDesign::Tetrahedron)).unwrap();
        assert_eq!(product_quorum(&q, 1).unwrap(), q);
        let pair = product_quorum(&q, 2).unwrap();
        assert_eq!(pair.k(), 16);
        assert_eq!(pair.d(), 4);
        assert!(pair.is_complete());
        assert!(matches!(product_quorum_with_cap(&q, 3, 63), Err(TomoError::Resource { requested: 64, cap: 63 })));
        assert!(matches!(product_quorum(&q, 7), Err(TomoError::Resource { .. })));
    }
}
