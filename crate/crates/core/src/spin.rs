//! Spin-`s` tomography from Stern-Gerlach measurements along coherent-state
//! directions.
//!
//! Coherent states are written in the `|s - k, n_z>` basis (`k = 0..=2s`,
//! index `k` holds magnetic number `m = s - k`). The quorum distributes
//! `(2s+1)^2` directions over `2s+1` cones about `z`; on each cone the
//! azimuths form an orbit of the rotation by `2 pi/(2s+1)`. Duals are
//! obtained by Gram inversion, so `rho = sum_n p_n Q_n` is exact for every
//! informationally complete cone layout.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TomoError};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::operator::{build_dual_frame, HermitianOperator, OperatorBasis};
use crate::qudit::check_probabilities;
use crate::report::TomographyReport;
use crate::state::DensityMatrix;

/// Gram condition number above which the cone layout is jittered.
pub const CONDITION_LIMIT: f64 = 1e8;
/// Number of jittered rebuilds attempted after the initial layout.
pub const JITTER_ATTEMPTS: usize = 5;
/// Jitter amplitude as a fraction of the default cone spacing.
pub const JITTER_FRACTION: f64 = 0.02;
/// Default seed for the jitter fallback.
pub const DEFAULT_JITTER_SEED: u64 = 0x5eed;
/// Agreement required between the two coherent-state constructions.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-9;

/// Spin quantum number, stored as the integer `2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    /// Accepts `s` when `2s` is a nonnegative integer.
    pub fn from_f64(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if twice.is_nan() || twice < 0.0 || (twice - twice.round()).abs() > 1e-12 || twice > u32::MAX as f64 {
            return Err(TomoError::Range(format!("spin {s} is not a nonnegative half-integer")));
        }
        Ok(Self {
            twice: twice.round() as u32,
        })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// `2s + 1`.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// `(2s+1)^2`.
    pub fn quorum_size(self) -> usize {
        self.dim() * self.dim()
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// `(S_x, S_y, S_z)` in the `|s - k>` basis.
pub fn spin_operators(spin: Spin) -> [CMatrix; 3] {
    let n = spin.dim();
    let s = spin.value();
    let mut sz = CMatrix::zeros(n, n);
    let mut raise = CMatrix::zeros(n, n);
    for k in 0..n {
        let m = s - k as f64;
        sz[(k, k)] = c(m, 0.0);
        if k > 0 {
            // <m+1| S+ |m> sits at row k-1.
            raise[(k - 1, k)] = c((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower).scale(0.5);
    let sy = (&raise - &lower) * c(0.0, -0.5);
    [sx, sy, sz]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinCoherentState {
    pub spin: Spin,
    pub theta: f64,
    pub phi: f64,
    pub vector: CVector,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Binomial expansion with `z = tan(theta/2) e^{i phi}`, written with
/// `cos(theta/2)^{2s}` pulled through so `theta = pi` stays finite.
fn stereographic_vector(spin: Spin, theta: f64, phi: f64) -> CVector {
    let (sin, cos) = (theta / 2.0).sin_cos();
    let n = spin.twice;
    CVector::from_fn(spin.dim(), |k, _| {
        let k = k as u32;
        let amp = binomial(n, k).sqrt() * cos.powi((n - k) as i32) * sin.powi(k as i32);
        Complex64::from_polar(amp, k as f64 * phi)
    })
}

/// `exp(-i theta m(phi) . S) |s, s>` with `m(phi) = (-sin phi, cos phi, 0)`.
fn rotated_vector(spin: Spin, theta: f64, phi: f64) -> CVector {
    let [sx, sy, _] = spin_operators(spin);
    let generator = (sx.scale(-phi.sin()) + sy.scale(phi.cos())).scale(theta);
    linalg::unitary_exp(&generator).column(0).into_owned()
}

/// Coherent state along `(theta, phi)`, `theta in [0, pi]`, `phi in [0, 2 pi)`.
///
/// Both constructions are evaluated and must agree within `1e-9`.
pub fn spin_coherent_state(spin: Spin, theta: f64, phi: f64) -> Result<SpinCoherentState> {
    if !(0.0..=PI).contains(&theta) {
        return Err(TomoError::Range(format!("polar angle {theta} outside [0, pi]")));
    }
    if !(0.0..2.0 * PI).contains(&phi) {
        return Err(TomoError::Range(format!("azimuth {phi} outside [0, 2 pi)")));
    }
    let vector = stereographic_vector(spin, theta, phi);
    let rotated = rotated_vector(spin, theta, phi);
    let mismatch = (&vector - &rotated).norm();
    if mismatch > CROSS_CHECK_TOLERANCE {
        return Err(TomoError::Numerical(format!(
            "coherent state constructions disagree by {mismatch:.3e}"
        )));
    }
    Ok(SpinCoherentState {
        spin,
        theta,
        phi,
        vector,
    })
}

/// One measurement axis of the cone layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeDirection {
    pub cone: usize,
    pub index: usize,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinQuorum {
    spin: Spin,
    directions: Vec<ConeDirection>,
    projectors: Vec<HermitianOperator>,
    duals: Vec<HermitianOperator>,
    gram_spectrum: Vec<f64>,
    rank: usize,
    condition_number: f64,
    attempts: usize,
}

impl SpinQuorum {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn directions(&self) -> &[ConeDirection] {
        &self.directions
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        &self.projectors
    }

    pub fn duals(&self) -> &[HermitianOperator] {
        &self.duals
    }

    pub fn gram_spectrum(&self) -> &[f64] {
        &self.gram_spectrum
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_complete(&self) -> bool {
        self.rank == self.spin.quorum_size()
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Builds performed, 1 when the initial layout was accepted.
    pub fn attempts(&self) -> usize {
        self.attempts
    }

    pub fn polar_angles(&self) -> Vec<f64> {
        let per_cone = self.spin.dim();
        self.directions.iter().step_by(per_cone).map(|d| d.theta).collect()
    }

    /// `<n|rho|n>` for each axis.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.projectors.iter().map(|p| rho.expectation(p)).collect()
    }

    /// `sum_n p_n Q_n`.
    pub fn invert(&self, frequencies: &[f64]) -> Result<HermitianOperator> {
        crate::error::check_dim("frequency count", self.projectors.len(), frequencies.len())?;
        HermitianOperator::real_combination(frequencies, &self.duals)
    }

    /// CSV with header `k,l,theta,phi`.
    pub fn write_directions_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["k", "l", "theta", "phi"])?;
        for d in &self.directions {
            w.write_record([
                d.cone.to_string(),
                d.index.to_string(),
                d.theta.to_string(),
                d.phi.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Default opening angles `theta_k = pi (k+1) / (2s+2)`.
pub fn default_polar_angles(spin: Spin) -> Vec<f64> {
    let n = spin.dim();
    (0..n).map(|k| PI * (k + 1) as f64 / (n + 1) as f64).collect()
}

/// Azimuth `2 pi l/(2s+1) + k pi/(2s+1)^2` of axis `l` on cone `k`.
pub fn cone_azimuth(spin: Spin, cone: usize, index: usize) -> f64 {
    let n = spin.dim() as f64;
    2.0 * PI * index as f64 / n + cone as f64 * PI / (n * n)
}

fn validate_polar(spin: Spin, polar: &[f64]) -> Result<()> {
    if polar.len() != spin.dim() {
        return Err(TomoError::Range(format!(
            "spin {spin} needs {} polar angles, got {}",
            spin.dim(),
            polar.len()
        )));
    }
    if let Some(t) = polar.iter().find(|t| !(**t > 0.0 && **t < PI)) {
        return Err(TomoError::Range(format!("polar angle {t} outside (0, pi)")));
    }
    let mut sorted = polar.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] <= 1e-12) {
        return Err(TomoError::Range("polar angles must be distinct".into()));
    }
    Ok(())
}

fn assemble(spin: Spin, polar: &[f64], attempts: usize) -> Result<SpinQuorum> {
    let n = spin.dim();
    let mut directions = Vec::with_capacity(n * n);
    let mut projectors = Vec::with_capacity(n * n);
    for (k, &theta) in polar.iter().enumerate() {
        for l in 0..n {
            let phi = cone_azimuth(spin, k, l);
            let state = spin_coherent_state(spin, theta, phi)?;
            projectors.push(HermitianOperator::projector(&state.vector));
            directions.push(ConeDirection {
                cone: k,
                index: l,
                theta,
                phi,
            });
        }
    }
    let frame = build_dual_frame(&OperatorBasis::new(projectors.clone())?);
    Ok(SpinQuorum {
        spin,
        directions,
        duals: frame.duals().to_vec(),
        projectors,
        gram_spectrum: frame.gram().eigenvalues().to_vec(),
        rank: frame.gram().rank(),
        condition_number: frame.gram().condition_number(),
        attempts,
    })
}

/// Builds the cone quorum with the default jitter seed.
pub fn build_spin_quorum(spin: Spin, polar: Option<&[f64]>) -> Result<SpinQuorum> {
    build_spin_quorum_seeded(spin, polar, DEFAULT_JITTER_SEED)
}

/// Builds the cone quorum; if the Gram condition number exceeds
/// [`CONDITION_LIMIT`], the polar angles are jittered by up to 2% of the
/// default cone spacing and the quorum rebuilt, at most
/// [`JITTER_ATTEMPTS`] times.
pub fn build_spin_quorum_seeded(spin: Spin, polar: Option<&[f64]>, seed: u64) -> Result<SpinQuorum> {
    let base = match polar {
        Some(p) => {
            validate_polar(spin, p)?;
            p.to_vec()
        }
        None => default_polar_angles(spin),
    };
    let mut quorum = assemble(spin, &base, 1)?;
    if quorum.condition_number <= CONDITION_LIMIT {
        return Ok(quorum);
    }
    let spacing = PI / (spin.dim() + 1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..JITTER_ATTEMPTS {
        let jittered: Vec<f64> = base
            .iter()
            .map(|t| {
                let shifted = t + rng.random_range(-JITTER_FRACTION..=JITTER_FRACTION) * spacing;
                shifted.clamp(f64::EPSILON, PI - f64::EPSILON)
            })
            .collect();
        quorum = assemble(spin, &jittered, attempt + 2)?;
        if quorum.condition_number <= CONDITION_LIMIT {
            return Ok(quorum);
        }
    }
    Err(TomoError::Conditioning {
        attempts: JITTER_ATTEMPTS + 1,
        condition: quorum.condition_number,
        spectrum: quorum.gram_spectrum,
    })
}

/// Linear inversion from Stern-Gerlach relative frequencies.
pub fn spin_reconstruct(
    quorum: &SpinQuorum,
    frequencies: &[f64],
    reference: Option<&DensityMatrix>,
) -> Result<TomographyReport> {
    check_probabilities(quorum.projectors.len(), frequencies)?;
    let rho = quorum.invert(frequencies)?;
    Ok(TomographyReport::assess(
        rho,
        frequencies.to_vec(),
        reference,
        Some(quorum.condition_number),
    ))
}

/// Pairwise commutator norms of a projector family.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorSummary {
    pub pairs: usize,
    pub max_norm: f64,
    pub min_norm: f64,
    /// Pairs whose commutator vanishes (compatible measurements).
    pub commuting_pairs: Vec<(usize, usize)>,
}

impl CommutatorSummary {
    pub fn all_incompatible(&self) -> bool {
        self.commuting_pairs.is_empty()
    }
}

/// Threshold below which a commutator counts as zero.
pub const COMMUTATOR_ZERO: f64 = 1e-12;

pub fn commutator_summary(projectors: &[HermitianOperator]) -> CommutatorSummary {
    let mut max_norm = 0.0f64;
    let mut min_norm = f64::INFINITY;
    let mut pairs = 0;
    let mut commuting_pairs = Vec::new();
    for i in 0..projectors.len() {
        for j in i + 1..projectors.len() {
            let norm = linalg::frobenius(&linalg::commutator(projectors[i].matrix(), projectors[j].matrix()));
            pairs += 1;
            max_norm = max_norm.max(norm);
            min_norm = min_norm.min(norm);
            if norm <= COMMUTATOR_ZERO {
                commuting_pairs.push((i, j));
            }
        }
    }
    if pairs == 0 {
        min_norm = 0.0;
    }
    CommutatorSummary {
        pairs,
        max_norm,
        min_norm,
        commuting_pairs,
    }
}

pub fn quorum_compatibility_report(quorum: &SpinQuorum) -> CommutatorSummary {
    commutator_summary(&quorum.projectors)
}
