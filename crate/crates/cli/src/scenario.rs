//! Scenario files: what to measure, on which state, and how.

use std::f64::consts::PI;

use qtomo::linalg::{c, CMatrix, CVector};
use qtomo::operator::{build_gram, OperatorBasis};
use qtomo::phase::{phase_states, PhaseBasis};
use qtomo::qudit::{
    product_quorum, qubit_design_quorum, su_generators, BlochVector, NamedDesign, ProjectorQuorum, QubitDesign,
};
use qtomo::sampling::LinearTomography;
use qtomo::spin::{build_spin_quorum_seeded, spin_coherent_state, Spin, SpinQuorum};
use qtomo::state::{ghz, random_density_matrix, random_density_matrix_of_rank, werner};
use qtomo::{DensityMatrix, HermitianOperator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Largest qubit count accepted for `nqubit` scenarios.
pub const MAX_QUBITS: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Qubit,
    Nqubit,
    Qudit,
    Phase,
    Spin,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Qubit => "qubit",
            Kind::Nqubit => "nqubit",
            Kind::Qudit => "qudit",
            Kind::Phase => "phase",
            Kind::Spin => "spin",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    MaximallyMixed,
    Ghz,
    Werner,
    /// Computational (number, `|s - k>`) basis state `index`.
    Basis,
}

/// Complex numbers are `[re, im]` pairs; matrices are lists of rows.
pub type ComplexPair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Named {
        name: NamedState,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        visibility: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        index: Option<usize>,
    },
    /// Generalized Bloch vector `c` with `rho = (I + c . lambda)/D`.
    Bloch(Vec<f64>),
    Matrix(Vec<Vec<ComplexPair>>),
    /// Unnormalized state vector.
    Pure(Vec<ComplexPair>),
    Random {
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rank: Option<usize>,
    },
    /// Weights on the phase grid (phase scenarios only).
    PhaseDiagonal(Vec<f64>),
    /// Spin coherent state (spin scenarios only).
    Coherent { theta: f64, phi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum QuorumSpec {
    /// Named qubit design; the single-qubit factor for `nqubit`.
    Design(String),
    /// Qubit Bloch directions (normalized on use).
    Directions(Vec<[f64; 3]>),
    /// Haar-random pure states.
    Random {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Explicit pure states.
    States(Vec<Vec<ComplexPair>>),
    SpinScheme {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        polar: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        jitter_seed: Option<u64>,
    },
    PhaseGrid {
        #[serde(default)]
        theta0: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub shots_per_setting: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Qudit dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Number of qubits for `nqubit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<u32>,
    /// Phase-space truncation: the space has dimension `s + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<i64>,
    /// Spin quantum number, a nonnegative half-integer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<f64>,
    pub state: StateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quorum: Option<QuorumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

impl Scenario {
    pub fn parse(text: &str) -> CliResult<Self> {
        let scenario: Scenario = serde_json::from_str(text)?;
        scenario.validate().map_err(|e| e.anchor(text))?;
        Ok(scenario)
    }

    fn forbid(&self, present: bool, field: &str) -> CliResult<()> {
        if present {
            Err(CliError::validation(format!("not used by kind {}", self.kind.name())).at(field))
        } else {
            Ok(())
        }
    }

    /// Kind-specific required fields and obvious range checks.
    pub fn validate(&self) -> CliResult<()> {
        let k = self.kind;
        self.forbid(self.dim.is_some() && k != Kind::Qudit, "dim")?;
        self.forbid(self.qubits.is_some() && k != Kind::Nqubit, "qubits")?;
        self.forbid(self.s.is_some() && k != Kind::Phase, "s")?;
        self.forbid(self.spin.is_some() && k != Kind::Spin, "spin")?;
        match k {
            Kind::Qudit => match self.dim {
                None => return Err(CliError::validation("`dim` is required for kind qudit").at("kind")),
                Some(d) if d < 2 => return Err(CliError::validation("must be at least 2").at("dim")),
                _ => {}
            },
            Kind::Nqubit => match self.qubits {
                None => return Err(CliError::validation("`qubits` is required for kind nqubit").at("kind")),
                Some(m) if !(1..=MAX_QUBITS).contains(&m) => {
                    return Err(CliError::validation(format!("must be in 1..={MAX_QUBITS}")).at("qubits"))
                }
                _ => {}
            },
            Kind::Phase => match self.s {
                None => return Err(CliError::validation("`s` is required for kind phase").at("kind")),
                Some(s) if s < 0 => return Err(CliError::validation(format!("truncation s = {s} is negative")).at("s")),
                _ => {}
            },
            Kind::Spin => match self.spin {
                None => return Err(CliError::validation("`spin` is required for kind spin").at("kind")),
                Some(s) => {
                    let spin = Spin::from_f64(s).map_err(|e| CliError::from(e).at("spin"))?;
                    if spin.twice() == 0 {
                        return Err(CliError::validation("spin must be at least 1/2").at("spin"));
                    }
                }
            },
            Kind::Qubit => {}
        }
        if let Some(sampling) = &self.sampling {
            if sampling.shots_per_setting == 0 {
                return Err(CliError::validation("must be at least 1").at("shots_per_setting"));
            }
        }
        if matches!(self.state, StateSpec::PhaseDiagonal(_)) && k != Kind::Phase {
            return Err(CliError::validation("phase_diagonal states need kind phase").at("state"));
        }
        if matches!(self.state, StateSpec::Coherent { .. }) && k != Kind::Spin {
            return Err(CliError::validation("coherent states need kind spin").at("state"));
        }
        Ok(())
    }

    /// Hilbert-space dimension.
    pub fn hilbert_dim(&self) -> usize {
        match self.kind {
            Kind::Qubit => 2,
            Kind::Nqubit => 1usize << self.qubits.unwrap_or(1),
            Kind::Qudit => self.dim.unwrap_or(2),
            Kind::Phase => self.s.unwrap_or(0) as usize + 1,
            Kind::Spin => Spin::from_f64(self.spin.unwrap_or(0.5)).map(Spin::dim).unwrap_or(2),
        }
    }

    fn spin_value(&self) -> Spin {
        Spin::from_f64(self.spin.unwrap_or(0.5)).expect("validated spin")
    }

    fn phase_s(&self) -> usize {
        self.s.unwrap_or(0) as usize
    }

    /// Builds the reference state.
    pub fn build_state(&self) -> CliResult<DensityMatrix> {
        self.state_inner().map_err(|e| e.at("state"))
    }

    fn state_inner(&self) -> CliResult<DensityMatrix> {
        let dim = self.hilbert_dim();
        let state = match &self.state {
            StateSpec::Named {
                name,
                visibility,
                index,
            } => match name {
                NamedState::MaximallyMixed => DensityMatrix::maximally_mixed(dim),
                NamedState::Ghz | NamedState::Werner => {
                    let qubits = match self.kind {
                        Kind::Qubit => 1,
                        Kind::Nqubit => self.qubits.unwrap_or(1),
                        _ => return Err(CliError::validation("GHZ and Werner states need qubit kinds")),
                    };
                    if *name == NamedState::Ghz {
                        ghz(qubits)
                    } else {
                        let v = visibility.ok_or_else(|| CliError::validation("werner needs `visibility`"))?;
                        werner(qubits, v)?
                    }
                }
                NamedState::Basis => {
                    let k = index.unwrap_or(0);
                    if k >= dim {
                        return Err(CliError::validation(format!("basis index {k} outside 0..{dim}")));
                    }
                    let mut v = CVector::zeros(dim);
                    v[k] = c(1.0, 0.0);
                    DensityMatrix::pure(&v)?
                }
            },
            StateSpec::Bloch(components) => {
                let basis = su_generators(dim)?;
                let state = basis.contract(&BlochVector::new(dim, components.clone())?)?;
                if !state.is_state {
                    return Err(CliError::validation(format!(
                        "Bloch vector gives minimum eigenvalue {:.3e}",
                        state.min_eigenvalue
                    )));
                }
                DensityMatrix::from_matrix(state.operator.into_matrix())?
            }
            StateSpec::Matrix(rows) => DensityMatrix::from_matrix(matrix_from_rows(rows, dim)?)?,
            StateSpec::Pure(entries) => DensityMatrix::pure(&vector_from_pairs(entries, dim)?)?,
            StateSpec::Random { seed, rank } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                match rank {
                    Some(r) if *r == 0 || *r > dim => {
                        return Err(CliError::validation(format!("rank {r} outside 1..={dim}")))
                    }
                    Some(r) => random_density_matrix_of_rank(dim, *r, &mut rng),
                    None => random_density_matrix(dim, &mut rng),
                }
            }
            StateSpec::PhaseDiagonal(weights) => {
                let basis = phase_states(self.phase_s(), 0.0)?;
                let basis = match &self.quorum {
                    Some(QuorumSpec::PhaseGrid { theta0 }) => phase_states(self.phase_s(), *theta0)?,
                    _ => basis,
                };
                DensityMatrix::diagonal_in(basis.states(), weights)?
            }
            StateSpec::Coherent { theta, phi } => {
                let st = spin_coherent_state(self.spin_value(), *theta, phi.rem_euclid(2.0 * PI))?;
                DensityMatrix::pure(&st.vector)?
            }
        };
        if state.dim() != dim {
            return Err(CliError::validation(format!(
                "state has dimension {}, scenario needs {dim}",
                state.dim()
            )));
        }
        Ok(state)
    }

    /// Builds the measurement scheme. `strict_design` makes qubit design
    /// violations fatal; otherwise they are reported by the caller.
    pub fn build_scheme(&self, seed: u64, design_tolerance: f64, strict_design: bool) -> CliResult<Scheme> {
        self.scheme_inner(seed, design_tolerance, strict_design)
            .map_err(|e| e.at("quorum"))
    }

    fn scheme_inner(&self, seed: u64, design_tolerance: f64, strict_design: bool) -> CliResult<Scheme> {
        let dim = self.hilbert_dim();
        let quorum = self.quorum.clone().unwrap_or_else(|| default_quorum(self.kind, dim));
        let mismatch = || {
            CliError::validation(format!(
                "quorum type {} is not available for kind {}",
                quorum_name(&quorum),
                self.kind.name()
            ))
        };
        match self.kind {
            Kind::Qubit | Kind::Nqubit => {
                let base = match &quorum {
                    QuorumSpec::Design(_) | QuorumSpec::Directions(_) => {
                        qubit_quorum(&quorum, design_tolerance, strict_design)?
                    }
                    QuorumSpec::Random { .. } | QuorumSpec::States(_) if self.kind == Kind::Qubit => {
                        generic_quorum(&quorum, 2, seed)?
                    }
                    _ => return Err(mismatch()),
                };
                let label = quorum_label(&quorum);
                if self.kind == Kind::Qubit {
                    Ok(Scheme::Projector {
                        label: format!("qubit/{label}"),
                        quorum: base.clone(),
                        base,
                        factors: 1,
                    })
                } else {
                    let m = self.qubits.unwrap_or(1);
                    Ok(Scheme::Projector {
                        label: format!("nqubit/{label}^{m}"),
                        quorum: product_quorum(&base, m)?,
                        base,
                        factors: m,
                    })
                }
            }
            Kind::Qudit => match &quorum {
                QuorumSpec::Random { .. } | QuorumSpec::States(_) => {
                    let q = generic_quorum(&quorum, dim, seed)?;
                    Ok(Scheme::Projector {
                        label: format!("qudit/{}", quorum_label(&quorum)),
                        quorum: q.clone(),
                        base: q,
                        factors: 1,
                    })
                }
                _ => Err(mismatch()),
            },
            Kind::Phase => match &quorum {
                QuorumSpec::PhaseGrid { theta0 } => {
                    if !theta0.is_finite() {
                        return Err(CliError::validation("theta0 must be finite"));
                    }
                    Ok(Scheme::Phase {
                        label: format!("phase/grid(s={},theta0={theta0})", self.phase_s()),
                        basis: phase_states(self.phase_s(), *theta0)?,
                    })
                }
                _ => Err(mismatch()),
            },
            Kind::Spin => match &quorum {
                QuorumSpec::SpinScheme { polar, jitter_seed } => {
                    let spin = self.spin_value();
                    let q = build_spin_quorum_seeded(spin, polar.as_deref(), jitter_seed.unwrap_or(seed))?;
                    let layout = if polar.is_some() { "custom" } else { "default" };
                    Ok(Scheme::Spin {
                        label: format!("spin/cones(s={spin},{layout})"),
                        quorum: q,
                    })
                }
                _ => Err(mismatch()),
            },
        }
    }
}

fn default_quorum(kind: Kind, dim: usize) -> QuorumSpec {
    match kind {
        Kind::Qubit | Kind::Nqubit => QuorumSpec::Design("tetrahedron".into()),
        Kind::Qudit => QuorumSpec::Random {
            count: dim * dim,
            seed: None,
        },
        Kind::Phase => QuorumSpec::PhaseGrid { theta0: 0.0 },
        Kind::Spin => QuorumSpec::SpinScheme {
            polar: None,
            jitter_seed: None,
        },
    }
}

fn quorum_name(q: &QuorumSpec) -> &'static str {
    match q {
        QuorumSpec::Design(_) => "design",
        QuorumSpec::Directions(_) => "directions",
        QuorumSpec::Random { .. } => "random",
        QuorumSpec::States(_) => "states",
        QuorumSpec::SpinScheme { .. } => "spin_scheme",
        QuorumSpec::PhaseGrid { .. } => "phase_grid",
    }
}

fn quorum_label(q: &QuorumSpec) -> String {
    match q {
        QuorumSpec::Design(name) => name.clone(),
        QuorumSpec::Directions(list) => format!("directions[{}]", list.len()),
        QuorumSpec::Random { count, .. } => format!("random[{count}]"),
        QuorumSpec::States(list) => format!("states[{}]", list.len()),
        other => quorum_name(other).to_string(),
    }
}

/// Residuals of the qubit design conditions for a direction spec, if it is
/// one.
pub fn design_directions(q: &QuorumSpec) -> CliResult<Option<Vec<[f64; 3]>>> {
    Ok(match q {
        QuorumSpec::Design(name) => Some(named_design(name)?.directions()),
        QuorumSpec::Directions(list) => Some(list.iter().map(|v| normalize(*v)).collect::<CliResult<_>>()?),
        _ => None,
    })
}

fn named_design(name: &str) -> CliResult<NamedDesign> {
    NamedDesign::from_name(name).ok_or_else(|| {
        CliError::validation(format!(
            "unknown design `{name}` (expected tetrahedron, octahedron or icosahedron)"
        ))
    })
}

fn normalize(v: [f64; 3]) -> CliResult<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(CliError::validation(format!("direction {v:?} cannot be normalized")));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

fn qubit_quorum(q: &QuorumSpec, design_tolerance: f64, strict_design: bool) -> CliResult<ProjectorQuorum> {
    let directions = design_directions(q)?.expect("design or directions");
    let residuals = qtomo::qudit::design_residuals(&directions);
    if !residuals.holds(design_tolerance) {
        let err = CliError::from(qtomo::TomoError::Design {
            mean_residual: residuals.mean,
            moment_residual: residuals.second_moment,
        });
        if strict_design {
            return Err(err);
        }
        // Not a design: duals by Gram inversion of the Bloch projectors.
        let states: Vec<CVector> = directions.iter().map(|n| bloch_ket(*n)).collect();
        return Ok(ProjectorQuorum::from_states(2, &states)?);
    }
    let design = match q {
        QuorumSpec::Design(name) => QubitDesign::Named(named_design(name)?),
        _ => QubitDesign::Explicit(directions),
    };
    Ok(qubit_design_quorum(&design)?)
}

/// Pure state with Bloch direction `n`.
fn bloch_ket(n: [f64; 3]) -> CVector {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    CVector::from_vec(vec![
        c((theta / 2.0).cos(), 0.0),
        c(phi.cos() * (theta / 2.0).sin(), phi.sin() * (theta / 2.0).sin()),
    ])
}

fn generic_quorum(q: &QuorumSpec, dim: usize, seed: u64) -> CliResult<ProjectorQuorum> {
    match q {
        QuorumSpec::Random { count, seed: own } => {
            if *count == 0 {
                return Err(CliError::validation("count must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(own.unwrap_or(seed));
            Ok(ProjectorQuorum::random(dim, *count, &mut rng)?)
        }
        QuorumSpec::States(list) => {
            let states = list
                .iter()
                .map(|s| vector_from_pairs(s, dim))
                .collect::<CliResult<Vec<_>>>()?;
            Ok(ProjectorQuorum::from_states(dim, &states)?)
        }
        _ => unreachable!("generic quorum from {}", quorum_name(q)),
    }
}

fn vector_from_pairs(entries: &[ComplexPair], dim: usize) -> CliResult<CVector> {
    if entries.len() != dim {
        return Err(CliError::validation(format!(
            "vector has {} entries, expected {dim}",
            entries.len()
        )));
    }
    Ok(CVector::from_iterator(dim, entries.iter().map(|p| c(p[0], p[1]))))
}

pub fn matrix_from_rows(rows: &[Vec<ComplexPair>], dim: usize) -> CliResult<CMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::validation(format!("matrix must be {dim}x{dim}")));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// A built measurement scheme.
#[derive(Debug, Clone)]
pub enum Scheme {
    Projector {
        label: String,
        quorum: ProjectorQuorum,
        /// Single-factor quorum (equal to `quorum` unless a product).
        base: ProjectorQuorum,
        factors: u32,
    },
    Spin {
        label: String,
        quorum: SpinQuorum,
    },
    Phase {
        label: String,
        basis: PhaseBasis,
    },
}

impl Scheme {
    pub fn label(&self) -> &str {
        match self {
            Scheme::Projector { label, .. } | Scheme::Spin { label, .. } | Scheme::Phase { label, .. } => label,
        }
    }

    pub fn projectors(&self) -> Vec<HermitianOperator> {
        match self {
            Scheme::Projector { quorum, .. } => quorum.projectors().to_vec(),
            Scheme::Spin { quorum, .. } => quorum.projectors().to_vec(),
            Scheme::Phase { basis, .. } => basis.projectors(),
        }
    }

    pub fn operator_basis(&self) -> OperatorBasis {
        OperatorBasis::new(self.projectors()).expect("scheme projectors share a dimension")
    }

    /// Gram rank in operator space.
    pub fn rank(&self) -> usize {
        match self {
            Scheme::Projector { quorum, .. } => quorum.gram_rank(),
            Scheme::Spin { quorum, .. } => quorum.rank(),
            Scheme::Phase { basis, .. } => basis.dim(),
        }
    }

    pub fn is_complete(&self) -> bool {
        let d = LinearTomography::dim(self);
        self.rank() == d * d
    }

    /// Gram condition number (`None` when singular).
    pub fn condition_number(&self) -> Option<f64> {
        let value = match self {
            Scheme::Projector { quorum, .. } => quorum.condition_number(),
            Scheme::Spin { quorum, .. } => quorum.condition_number(),
            // Orthonormal projectors: the Gram matrix is the identity.
            Scheme::Phase { .. } => 1.0,
        };
        value.is_finite().then_some(value)
    }

    /// Smallest nonzero and largest Gram eigenvalues.
    pub fn frame_bounds(&self) -> (f64, f64) {
        match self {
            Scheme::Projector { base, factors, .. } => {
                // The Gram matrix of a tensor power is the tensor power of
                // the base Gram matrix.
                let (lo, hi) = build_gram(&base.operator_basis()).frame_bounds();
                (lo.powi(*factors as i32), hi.powi(*factors as i32))
            }
            Scheme::Spin { quorum, .. } => {
                let ev = quorum.gram_spectrum();
                let hi = ev.iter().cloned().fold(0.0, f64::max);
                let lo = ev
                    .iter()
                    .cloned()
                    .filter(|v| *v > qtomo::linalg::PINV_CUTOFF * hi)
                    .fold(f64::INFINITY, f64::min);
                (lo, hi)
            }
            Scheme::Phase { .. } => (1.0, 1.0),
        }
    }
}

impl LinearTomography for Scheme {
    fn settings(&self) -> usize {
        match self {
            Scheme::Projector { quorum, .. } => quorum.settings(),
            Scheme::Spin { quorum, .. } => quorum.settings(),
            Scheme::Phase { basis, .. } => LinearTomography::settings(basis),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Scheme::Projector { quorum, .. } => quorum.d(),
            Scheme::Spin { quorum, .. } => quorum.spin().dim(),
            Scheme::Phase { basis, .. } => basis.dim(),
        }
    }

    fn probabilities(&self, rho: &DensityMatrix) -> qtomo::Result<Vec<f64>> {
        match self {
            Scheme::Projector { quorum, .. } => quorum.probabilities(rho),
            Scheme::Spin { quorum, .. } => quorum.probabilities(rho),
            Scheme::Phase { basis, .. } => basis.probabilities(rho),
        }
    }

    fn reconstruct(&self, frequencies: &[f64]) -> qtomo::Result<HermitianOperator> {
        match self {
            Scheme::Projector { quorum, .. } => quorum.invert(frequencies),
            Scheme::Spin { quorum, .. } => quorum.invert(frequencies),
            Scheme::Phase { basis, .. } => basis.resum(frequencies),
        }
    }
}
