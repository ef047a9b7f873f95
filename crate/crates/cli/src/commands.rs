//! The three subcommands, producing serializable outcomes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qtomo::linalg;
use qtomo::operator::build_dual_frame;
use qtomo::phase::PhaseDistribution;
use qtomo::qudit::{design_residuals, qudit_quorum_gram};
use qtomo::sampling::{error_scaling_sweep, simulate_binary_outcomes, LinearTomography, ShotPlan, SweepConfig, SweepRow, SweepTable};
use qtomo::sdp::{check_slackness, duality_gap, evaluate_constraint, TruncationProblem};
use qtomo::spin::quorum_compatibility_report;
use qtomo::{DensityMatrix, TomographyReport};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::scenario::{design_directions, matrix_to_rows, ComplexPair, Format, Kind, Scenario, Scheme};

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// SDP diagnostics are skipped above this many settings.
pub const SDP_SETTINGS_LIMIT: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    Strict,
    #[default]
    Default,
}

impl ToleranceProfile {
    pub fn name(self) -> &'static str {
        match self {
            ToleranceProfile::Strict => "strict",
            ToleranceProfile::Default => "default",
        }
    }

    /// Allowed residual of the qubit design conditions.
    pub fn design_tolerance(self) -> f64 {
        match self {
            ToleranceProfile::Strict => 1e-12,
            ToleranceProfile::Default => 1e-9,
        }
    }

    /// Slack on trace and eigenvalues when calling a reconstruction physical.
    pub fn physical_tolerance(self) -> f64 {
        match self {
            ToleranceProfile::Strict => 1e-12,
            ToleranceProfile::Default => 1e-9,
        }
    }

    /// Largest slackness residual accepted as an optimality certificate.
    pub fn slackness_threshold(self) -> f64 {
        match self {
            ToleranceProfile::Strict => 1e-10,
            ToleranceProfile::Default => qtomo::sdp::SLACKNESS_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub profile: ToleranceProfile,
    pub timing: bool,
}

impl Options {
    /// Command-line seed, else the scenario's sampling seed, else 0.
    pub fn effective_seed(&self, scenario: &Scenario) -> u64 {
        self.seed
            .or(scenario.sampling.as_ref().and_then(|s| s.seed))
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingEcho {
    pub shots_per_setting: u64,
    pub seed: u64,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpDiagnostics {
    /// Minimum eigenvalue of `rho - sum_j lambda_j N_j`.
    pub feasibility_margin: f64,
    /// `None` when the primal point is infeasible.
    pub duality_gap: Option<f64>,
    pub slackness_residual: Option<f64>,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub library_version: String,
    pub seed: u64,
    pub scheme: String,
    pub tolerance_profile: ToleranceProfile,
    pub scenario: Scenario,
    pub settings: usize,
    pub complete: bool,
    pub sampling: Option<SamplingEcho>,
    /// Probabilities (exact) or relative frequencies (sampled) inverted.
    pub probabilities: Vec<f64>,
    /// Row-major `[re, im]` pairs.
    pub reconstructed: Vec<Vec<ComplexPair>>,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub physical: bool,
    pub fidelity: Option<f64>,
    pub trace_distance: Option<f64>,
    pub condition_number: Option<f64>,
    /// Phase scenarios: Frobenius norm of the unmeasured coherences.
    pub discarded_offdiagonal: Option<f64>,
    pub sdp: Option<SdpDiagnostics>,
    /// Wall-clock seconds; only filled with `--timing` so reports stay
    /// reproducible by default.
    pub timing_seconds: Option<f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn matrix(&self) -> linalg::CMatrix {
        crate::scenario::matrix_from_rows(&self.reconstructed, self.reconstructed.len()).expect("square report matrix")
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    /// Phase grid of the scheme, for the distribution CSV.
    phase: Option<qtomo::phase::PhaseBasis>,
    pub warnings: Vec<String>,
}

impl RunOutcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.report.to_json(),
            Format::Csv => {
                let mut out = Vec::new();
                match &self.phase {
                    Some(basis) => PhaseDistribution::from_probabilities(basis, &self.report.probabilities)
                        .expect("one probability per grid point")
                        .write_csv(&mut out)
                        .expect("in-memory csv"),
                    None => {
                        let mut w = csv::Writer::from_writer(&mut out);
                        w.write_record(["row", "col", "re", "im"]).expect("in-memory csv");
                        for (i, row) in self.report.reconstructed.iter().enumerate() {
                            for (j, z) in row.iter().enumerate() {
                                w.write_record([i.to_string(), j.to_string(), z[0].to_string(), z[1].to_string()])
                                    .expect("in-memory csv");
                            }
                        }
                        w.flush().expect("in-memory csv");
                    }
                }
                String::from_utf8(out).expect("csv is utf-8")
            }
        }
    }
}

fn sdp_diagnostics(scheme: &Scheme, state: &DensityMatrix, profile: ToleranceProfile) -> CliResult<Option<SdpDiagnostics>> {
    if scheme.settings() > SDP_SETTINGS_LIMIT {
        return Ok(None);
    }
    let problem = TruncationProblem::new(state.clone(), build_dual_frame(&scheme.operator_basis()))?;
    let sdp = problem.sdp();
    let point = problem.certificate()?;
    let feasibility_margin = evaluate_constraint(&sdp, point.x())?.min_eigenvalue;
    let duality_gap = duality_gap(&sdp, &point).ok();
    let slackness_residual = check_slackness(&sdp, &point).ok();
    let certified = slackness_residual.is_some_and(|r| r <= profile.slackness_threshold());
    Ok(Some(SdpDiagnostics {
        feasibility_margin,
        duality_gap,
        slackness_residual,
        certified,
    }))
}

fn exact_probabilities(scheme: &Scheme, state: &DensityMatrix) -> CliResult<Vec<f64>> {
    // Round-off can leave exact probabilities a hair outside [0, 1].
    Ok(scheme
        .probabilities(state)?
        .into_iter()
        .map(|p| p.clamp(0.0, 1.0))
        .collect())
}

/// build quorum -> probabilities or sampled frequencies -> reconstruct ->
/// diagnostics.
pub fn run(scenario: &Scenario, options: &Options) -> CliResult<RunOutcome> {
    let start = Instant::now();
    let seed = options.effective_seed(scenario);
    let profile = options.profile;
    let state = scenario.build_state()?;
    let scheme = scenario.build_scheme(seed, profile.design_tolerance(), true)?;
    let mut warnings = Vec::new();
    let complete = scheme.is_complete();
    if !complete {
        if scenario.kind != Kind::Phase {
            let d = scheme.dim();
            return Err(CliError::from(qtomo::TomoError::Completeness {
                rank: scheme.rank(),
                required: d * d,
            })
            .at("quorum"));
        }
        warnings.push("phase quorum recovers only the phase-diagonal part of the state".into());
    }
    let exact = exact_probabilities(&scheme, &state)?;
    let (data, sampling) = match &scenario.sampling {
        Some(spec) => {
            let plan = ShotPlan::new(spec.shots_per_setting, seed, exact.len())?;
            let sampled = simulate_binary_outcomes(&exact, &plan)?;
            let echo = SamplingEcho {
                shots_per_setting: spec.shots_per_setting,
                seed,
                counts: sampled.counts,
            };
            (sampled.frequencies, Some(echo))
        }
        None => (exact.clone(), None),
    };
    let reconstructed = scheme.reconstruct(&data)?;
    let assessed = TomographyReport::assess(reconstructed, data, Some(&state), scheme.condition_number());
    let discarded_offdiagonal = match &scheme {
        Scheme::Phase { .. } => {
            let dephased = scheme.reconstruct(&exact)?;
            Some(linalg::frobenius(&(state.matrix() - dephased.matrix())))
        }
        _ => None,
    };
    let sdp = sdp_diagnostics(&scheme, &state, profile)?;
    let physical = assessed.is_physical(profile.physical_tolerance());
    let phase = match &scheme {
        Scheme::Phase { basis, .. } => Some(basis.clone()),
        _ => None,
    };
    let report = Report {
        library_version: LIBRARY_VERSION.to_string(),
        seed,
        scheme: scheme.label().to_string(),
        tolerance_profile: profile,
        scenario: scenario.clone(),
        settings: scheme.settings(),
        complete,
        sampling,
        reconstructed: matrix_to_rows(assessed.reconstructed.matrix()),
        probabilities: assessed.probabilities,
        trace: assessed.trace,
        min_eigenvalue: assessed.min_eigenvalue,
        physical,
        fidelity: assessed.fidelity,
        trace_distance: assessed.trace_distance,
        condition_number: assessed.condition_number,
        discarded_offdiagonal,
        sdp,
        timing_seconds: options.timing.then(|| start.elapsed().as_secs_f64()),
    };
    Ok(RunOutcome { report, phase, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignCheck {
    pub mean_residual: f64,
    pub second_moment_residual: f64,
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorCheck {
    pub pairs: usize,
    pub max_norm: f64,
    pub min_norm: f64,
    pub commuting_pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinLayout {
    pub polar_angles: Vec<f64>,
    /// Quorum builds performed (1 unless the layout had to be jittered).
    pub attempts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuorumCheck {
    pub library_version: String,
    pub seed: u64,
    pub scheme: String,
    pub dim: usize,
    pub settings: usize,
    pub rank: usize,
    pub required_rank: usize,
    pub complete: bool,
    pub condition_number: Option<f64>,
    /// Smallest nonzero and largest Gram eigenvalues.
    pub frame_bounds: [f64; 2],
    pub design: Option<DesignCheck>,
    /// Deviation of the Gram matrix from the 2-design form (qudit quorums).
    pub gram_design_residual: Option<f64>,
    pub commutators: Option<CommutatorCheck>,
    pub spin_layout: Option<SpinLayout>,
    pub warnings: Vec<String>,
}

impl QuorumCheck {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut text = serde_json::to_string_pretty(self).expect("check serializes");
                text.push('\n');
                text
            }
            Format::Csv => {
                let value = serde_json::to_value(self).expect("check serializes");
                let mut out = Vec::new();
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(["key", "value"]).expect("in-memory csv");
                flatten("", &value, &mut |k, v| w.write_record([k, v]).expect("in-memory csv"));
                w.flush().expect("in-memory csv");
                drop(w);
                String::from_utf8(out).expect("csv is utf-8")
            }
        }
    }
}

/// Dotted-key flattening of a JSON value; arrays of scalars stay inline.
fn flatten(prefix: &str, value: &serde_json::Value, emit: &mut dyn FnMut(&str, &str)) {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, emit);
            }
        }
        Value::Null => emit(prefix, ""),
        Value::String(s) => emit(prefix, s),
        other => emit(prefix, &other.to_string()),
    }
}

pub fn quorum_check(scenario: &Scenario, options: &Options) -> CliResult<QuorumCheck> {
    let seed = options.effective_seed(scenario);
    let profile = options.profile;
    let scheme = scenario.build_scheme(seed, profile.design_tolerance(), false)?;
    let dim = scheme.dim();
    let mut warnings = Vec::new();
    let complete = scheme.is_complete();
    if !complete {
        warnings.push(format!(
            "quorum is not informationally complete: rank {} < {}",
            scheme.rank(),
            dim * dim
        ));
    }
    let design = match (&scenario.kind, &scenario.quorum) {
        (Kind::Qubit | Kind::Nqubit, q) => {
            let spec = q.clone().unwrap_or(crate::scenario::QuorumSpec::Design("tetrahedron".into()));
            design_directions(&spec).map_err(|e| e.at("quorum"))?.map(|dirs| {
                let r = design_residuals(&dirs);
                DesignCheck {
                    mean_residual: r.mean,
                    second_moment_residual: r.second_moment,
                    tolerance: profile.design_tolerance(),
                    holds: r.holds(profile.design_tolerance()),
                }
            })
        }
        _ => None,
    };
    if let Some(d) = &design {
        if !d.holds {
            warnings.push("directions do not satisfy the qubit design conditions".into());
        }
    }
    let gram_design_residual = match &scheme {
        Scheme::Projector { quorum, factors: 1, .. } if complete => {
            qudit_quorum_gram(quorum).ok().map(|g| g.gram_residual)
        }
        _ => None,
    };
    let (commutators, spin_layout) = match &scheme {
        Scheme::Spin { quorum, .. } => {
            let summary = quorum_compatibility_report(quorum);
            if !summary.all_incompatible() {
                warnings.push(format!("{} projector pairs commute", summary.commuting_pairs.len()));
            }
            (
                Some(CommutatorCheck {
                    pairs: summary.pairs,
                    max_norm: summary.max_norm,
                    min_norm: summary.min_norm,
                    commuting_pairs: summary.commuting_pairs.iter().map(|&(a, b)| [a, b]).collect(),
                }),
                Some(SpinLayout {
                    polar_angles: quorum.polar_angles(),
                    attempts: quorum.attempts(),
                }),
            )
        }
        _ => (None, None),
    };
    let (lo, hi) = scheme.frame_bounds();
    Ok(QuorumCheck {
        library_version: LIBRARY_VERSION.to_string(),
        seed,
        scheme: scheme.label().to_string(),
        dim,
        settings: scheme.settings(),
        rank: scheme.rank(),
        required_rank: dim * dim,
        complete,
        condition_number: scheme.condition_number(),
        frame_bounds: [lo, hi],
        design,
        gram_design_residual,
        commutators,
        spin_layout,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub library_version: String,
    pub seed: u64,
    pub scheme: String,
    pub trials: usize,
    pub rows: Vec<SweepRowEcho>,
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRowEcho {
    #[serde(rename = "N")]
    pub shots: u64,
    pub mean_trace_distance: f64,
    pub std: f64,
}

impl From<SweepRow> for SweepRowEcho {
    fn from(r: SweepRow) -> Self {
        Self {
            shots: r.shots,
            mean_trace_distance: r.mean_trace_distance,
            std: r.std,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub table: SweepTable,
    pub report: SweepReport,
}

impl SweepOutcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = Vec::new();
                self.table.write_csv(&mut out).expect("in-memory csv");
                String::from_utf8(out).expect("csv is utf-8")
            }
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&self.report).expect("sweep serializes");
                text.push('\n');
                text
            }
        }
    }
}

pub fn sample_sweep(scenario: &Scenario, shots: &[u64], trials: usize, options: &Options) -> CliResult<SweepOutcome> {
    if shots.is_empty() || shots.contains(&0) || shots.windows(2).any(|w| w[1] < w[0]) {
        return Err(CliError::validation("--shots must be a nonempty ascending list of positive counts"));
    }
    if trials == 0 {
        return Err(CliError::validation("--trials must be at least 1"));
    }
    let seed = options.effective_seed(scenario);
    let state = scenario.build_state()?;
    let scheme = scenario.build_scheme(seed, options.profile.design_tolerance(), true)?;
    let config = SweepConfig::new(shots.to_vec(), trials, seed);
    let table = error_scaling_sweep(&scheme, &state, &config)?;
    let report = SweepReport {
        library_version: LIBRARY_VERSION.to_string(),
        seed,
        scheme: scheme.label().to_string(),
        trials,
        rows: table.rows.iter().copied().map(SweepRowEcho::from).collect(),
        slope: table.slope,
    };
    Ok(SweepOutcome { table, report })
}

/// Output path: command line, else scenario, else standard output. Relative
/// paths are placed under `report_dir` when one is configured.
pub fn resolve_output(cli: Option<&Path>, scenario: Option<&str>, report_dir: Option<&Path>) -> Option<PathBuf> {
    let path = cli.map(Path::to_path_buf).or_else(|| scenario.map(PathBuf::from))?;
    Some(match report_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path,
    })
}
