//! Finite-ensemble simulation of projector measurements.
//!
//! Every setting is an independent click/no-click experiment on `N` copies.
//! Outcomes come from a ChaCha8 stream keyed on `(seed, setting index)`, so
//! counts do not depend on evaluation order and sweeps parallelize freely.

use std::io::Write;

use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, Result, TomoError};
use crate::linalg::CMatrix;
use crate::operator::HermitianOperator;
use crate::phase::PhaseBasis;
use crate::qudit::ProjectorQuorum;
use crate::spin::SpinQuorum;
use crate::state::{trace_distance, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShotPlan {
    shots_per_setting: u64,
    seed: u64,
    settings: usize,
}

impl ShotPlan {
    pub fn new(shots_per_setting: u64, seed: u64, settings: usize) -> Result<Self> {
        if shots_per_setting == 0 {
            return Err(TomoError::Range("shots per setting must be at least 1".into()));
        }
        Ok(Self {
            shots_per_setting,
            seed,
            settings,
        })
    }

    pub fn shots_per_setting(&self) -> u64 {
        self.shots_per_setting
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn settings(&self) -> usize {
        self.settings
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFrequencies {
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub plan: ShotPlan,
}

/// Generator for one setting: the seed picks the key, the setting index the
/// stream.
fn setting_rng(seed: u64, setting: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(setting as u64);
    rng
}

/// Draws `N` Bernoulli outcomes per setting.
pub fn simulate_binary_outcomes(probabilities: &[f64], plan: &ShotPlan) -> Result<SampledFrequencies> {
    check_dim("setting count", plan.settings, probabilities.len())?;
    let n = plan.shots_per_setting;
    let counts = probabilities
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let coin = Bernoulli::new(p).map_err(|_| {
                TomoError::Data(format!("probability {p} of setting {i} outside [0, 1]"))
            })?;
            let mut rng = setting_rng(plan.seed, i);
            Ok(coin.sample_iter(&mut rng).take(n as usize).filter(|&b| b).count() as u64)
        })
        .collect::<Result<Vec<u64>>>()?;
    let frequencies = counts.iter().map(|&k| k as f64 / n as f64).collect();
    Ok(SampledFrequencies {
        counts,
        frequencies,
        plan: *plan,
    })
}

/// A measurement scheme reconstructed by a fixed linear map of the
/// per-setting probabilities.
pub trait LinearTomography {
    fn settings(&self) -> usize;
    fn dim(&self) -> usize;
    fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>>;
    fn reconstruct(&self, frequencies: &[f64]) -> Result<HermitianOperator>;
}

impl LinearTomography for ProjectorQuorum {
    fn settings(&self) -> usize {
        self.k()
    }

    fn dim(&self) -> usize {
        self.d()
    }

    fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        ProjectorQuorum::probabilities(self, rho)
    }

    fn reconstruct(&self, frequencies: &[f64]) -> Result<HermitianOperator> {
        self.invert(frequencies)
    }
}

impl LinearTomography for SpinQuorum {
    fn settings(&self) -> usize {
        self.projectors().len()
    }

    fn dim(&self) -> usize {
        self.spin().dim()
    }

    fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        SpinQuorum::probabilities(self, rho)
    }

    fn reconstruct(&self, frequencies: &[f64]) -> Result<HermitianOperator> {
        self.invert(frequencies)
    }
}

/// Only the phase-diagonal part is recoverable; off-diagonal mass shows up
/// as an error floor.
impl LinearTomography for PhaseBasis {
    fn settings(&self) -> usize {
        PhaseBasis::dim(self)
    }

    fn dim(&self) -> usize {
        PhaseBasis::dim(self)
    }

    fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        PhaseBasis::probabilities(self, rho)
    }

    fn reconstruct(&self, frequencies: &[f64]) -> Result<HermitianOperator> {
        self.resum(frequencies)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Ascending shot counts.
    pub shots: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
    /// Feed exact probabilities instead of sampled frequencies.
    pub noiseless: bool,
}

impl SweepConfig {
    pub fn new(shots: Vec<u64>, trials: usize, seed: u64) -> Self {
        Self {
            shots,
            trials,
            seed,
            noiseless: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(TomoError::Range("at least one trial is required".into()));
        }
        if self.shots.is_empty() {
            return Err(TomoError::Range("shot list is empty".into()));
        }
        if self.shots.contains(&0) {
            return Err(TomoError::Range("shot counts must be positive".into()));
        }
        if self.shots.windows(2).any(|w| w[1] < w[0]) {
            return Err(TomoError::Range("shot counts must be ascending".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub shots: u64,
    pub mean_trace_distance: f64,
    /// Sample standard deviation over trials (0 for a single trial).
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln(mean)` against `ln(N)`; `None` with fewer
    /// than two distinct shot counts or a vanishing mean.
    pub slope: Option<f64>,
}

impl SweepTable {
    /// CSV with header `N,mean_trace_distance,std,slope`; the slope is
    /// repeated on every row and left empty when undefined.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["N", "mean_trace_distance", "std", "slope"])?;
        let slope = self.slope.map(|s| s.to_string()).unwrap_or_default();
        for row in &self.rows {
            w.write_record([
                row.shots.to_string(),
                row.mean_trace_distance.to_string(),
                row.std.to_string(),
                slope.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at shot count `shots`.
pub fn trial_seed(seed: u64, shots: u64, trial: usize) -> u64 {
    mix(mix(mix(seed) ^ shots) ^ trial as u64)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if logs.len() < 2 || sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Simulate-then-reconstruct sweep over a generic reconstruction map.
///
/// Trials run in parallel; results are reduced in `(N, trial)` order.
pub fn error_scaling_sweep_with<F>(
    probabilities: &[f64],
    reconstruct: F,
    rho: &DensityMatrix,
    config: &SweepConfig,
) -> Result<SweepTable>
where
    F: Fn(&[f64]) -> Result<CMatrix> + Sync,
{
    config.validate()?;
    let mut rows = Vec::with_capacity(config.shots.len());
    for &shots in &config.shots {
        let distances = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let estimate = if config.noiseless {
                    reconstruct(probabilities)?
                } else {
                    let plan = ShotPlan::new(shots, trial_seed(config.seed, shots, trial), probabilities.len())?;
                    reconstruct(&simulate_binary_outcomes(probabilities, &plan)?.frequencies)?
                };
                check_dim("reconstruction dimension", rho.dim(), estimate.nrows())?;
                Ok(trace_distance(rho.matrix(), &estimate))
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean, std) = mean_std(&distances);
        rows.push(SweepRow {
            shots,
            mean_trace_distance: mean,
            std,
        });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.shots as f64, r.mean_trace_distance)).collect();
    Ok(SweepTable {
        slope: log_log_slope(&points),
        rows,
    })
}

/// [`error_scaling_sweep_with`] for a [`LinearTomography`] scheme.
pub fn error_scaling_sweep<T>(scheme: &T, rho: &DensityMatrix, config: &SweepConfig) -> Result<SweepTable>
where
    T: LinearTomography + Sync,
{
    check_dim("state dimension", scheme.dim(), rho.dim())?;
    let probabilities = scheme.probabilities(rho)?;
    // Round-off can push an exact probability just outside [0, 1].
    let probabilities: Vec<f64> = probabilities.iter().map(|p| p.clamp(0.0, 1.0)).collect();
    error_scaling_sweep_with(
        &probabilities,
        |f| scheme.reconstruct(f).map(HermitianOperator::into_matrix),
        rho,
        config,
    )
}
