//! Acceptance gate: one pass/fail line per criterion.
//!
//! Built without the libtest harness so the report is always printed:
//! `cargo test -p qtomo-cli --test acceptance`.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qtomo::frames::{analysis, frame_operator, projection_sweep, VectorFrame};
use qtomo::linalg::{self, c, CMatrix, CVector};
use qtomo::operator::{build_dual_frame, trace_inner_product};
use qtomo::phase::{number_state, phase_distribution, phase_states, phase_tomography};
use qtomo::qudit::{
    product_quorum, qubit_design_dual, qubit_design_quorum, reconstruct_from_probabilities, su_generators,
    NamedDesign, ProjectorQuorum, QubitDesign,
};
use qtomo::sampling::{error_scaling_sweep, SweepConfig};
use qtomo::sdp::{check_slackness, duality_gap, evaluate_constraint, TruncationProblem};
use qtomo::spin::{build_spin_quorum, spin_reconstruct, Spin};
use qtomo::state::{random_density_matrix, random_pure_state, trace_distance, werner};
use qtomo::DensityMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:.0?}"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let quorums: Vec<_> = NamedDesign::ALL
        .iter()
        .map(|d| qubit_design_quorum(&QubitDesign::Named(*d)).unwrap())
        .collect();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho = random_density_matrix(2, &mut rng);
        for q in &quorums {
            let p = q.probabilities(&rho).unwrap();
            let report = reconstruct_from_probabilities(q, &p, Some(&rho)).unwrap();
            worst = worst.max(report.trace_distance.unwrap());
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-10, || format!("trace distance {worst:.3e}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("max trace distance {worst:.2e} over 300 round trips in {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for named in NamedDesign::ALL {
        let q = qubit_design_quorum(&QubitDesign::Named(named)).unwrap();
        for (n, dual) in named.directions().iter().zip(q.duals()) {
            worst = worst.max(linalg::max_abs(&(dual.matrix() - qubit_design_dual(n, q.k()).matrix())));
        }
    }
    ensure(worst <= 1e-10, || format!("max entry deviation {worst:.3e}"))?;
    Ok(format!("max entry deviation {worst:.2e} across the three designs"))
}

fn criterion_3() -> Outcome {
    let tetra = qubit_design_quorum(&QubitDesign::Named(NamedDesign::Tetrahedron)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut m3_time = Duration::ZERO;
    for m in [2u32, 3] {
        let start = Instant::now();
        let q = product_quorum(&tetra, m).unwrap();
        let dim = 1usize << m;
        let mut states: Vec<DensityMatrix> = (0..5).map(|_| random_density_matrix(dim, &mut rng)).collect();
        states.push(werner(m, 0.8).unwrap());
        for rho in &states {
            let back = q.invert(&q.probabilities(rho).unwrap()).unwrap();
            worst = worst.max(trace_distance(rho.matrix(), back.matrix()));
        }
        if m == 3 {
            m3_time = start.elapsed();
        }
    }
    ensure(worst <= 1e-9, || format!("trace distance {worst:.3e}"))?;
    within(m3_time, Duration::from_secs(10))?;
    Ok(format!("max trace distance {worst:.2e}; M = 3 took {m3_time:.2?}"))
}

fn criterion_4() -> Outcome {
    let mut traceless = 0.0f64;
    let mut ortho = 0.0f64;
    let mut units = 0.0f64;
    for d in 2..=6 {
        let basis = su_generators(d).unwrap();
        let gens = basis.generators();
        for (a, ga) in gens.iter().enumerate() {
            traceless = traceless.max(linalg::trace(ga.matrix()).norm());
            for (b, gb) in gens.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                ortho = ortho.max((trace_inner_product(ga, gb).unwrap() - c(target, 0.0)).norm());
            }
        }
        for a in 0..d {
            for b in 0..d {
                let mut unit = CMatrix::zeros(d, d);
                unit[(a, b)] = linalg::ONE;
                units = units.max(linalg::max_abs(&(basis.matrix_unit(a + 1, b + 1) - unit)));
            }
        }
    }
    ensure(traceless <= 1e-12 && ortho <= 1e-12 && units <= 1e-12, || {
        format!("trace {traceless:.3e}, orthonormality {ortho:.3e}, matrix units {units:.3e}")
    })?;
    Ok(format!(
        "D = 2..6: trace {traceless:.1e}, orthonormality {ortho:.1e}, matrix units {units:.1e}"
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut margin, mut gap, mut slack) = (f64::INFINITY, 0.0f64, 0.0f64);
    for i in 0..50 {
        let d = 2 + i % 3;
        let quorum = ProjectorQuorum::random(d, d * d + i % 2, &mut rng).unwrap();
        let rho = random_density_matrix(d, &mut rng);
        let problem = TruncationProblem::new(rho, build_dual_frame(&quorum.operator_basis())).unwrap();
        let sdp = problem.sdp();
        let point = problem.certificate().unwrap();
        margin = margin.min(evaluate_constraint(&sdp, point.x()).unwrap().min_eigenvalue);
        gap = gap.max(duality_gap(&sdp, &point).map_err(|e| e.to_string())?.abs());
        slack = slack.max(check_slackness(&sdp, &point).map_err(|e| e.to_string())?);
    }
    ensure(margin >= -1e-9 && gap <= 1e-9 && slack <= 1e-8, || {
        format!("margin {margin:.3e}, gap {gap:.3e}, slackness {slack:.3e}")
    })?;
    Ok(format!("50 states: margin {margin:.1e}, gap {gap:.1e}, slackness {slack:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_slack = f64::INFINITY;
    let mut monotone = true;
    for _ in 0..100 {
        let dim = rng.random_range(2..=6);
        let len = dim + rng.random_range(0..=6);
        let vectors: Vec<CVector> = (0..len)
            .map(|_| random_pure_state(dim, &mut rng) * c(rng.random_range(0.2..2.0), 0.0))
            .collect();
        let frame = VectorFrame::new(vectors).unwrap();
        let (a, b) = frame_operator(&frame).bounds();
        for _ in 0..10 {
            let f = random_pure_state(dim, &mut rng) * c(rng.random_range(0.1..3.0), 0.0);
            let energy: f64 = analysis(&frame, &f).unwrap().iter().map(|z| z.norm_sqr()).sum();
            let n2 = f.norm_squared();
            worst_slack = worst_slack.min((energy - a * n2).min(b * n2 - energy));
        }
        let f = random_pure_state(dim, &mut rng);
        let steps = projection_sweep(&frame, &f).unwrap();
        monotone &= steps.windows(2).all(|w| w[1].error <= w[0].error + 1e-12);
    }
    ensure(worst_slack >= -1e-9, || format!("frame inequality slack {worst_slack:.3e}"))?;
    ensure(monotone, || "projection error increased with n".into())?;
    Ok(format!("100 frames: min slack {worst_slack:.1e}, projection errors monotone"))
}

fn criterion_7() -> Outcome {
    let mut ortho = 0.0f64;
    for s in 0..=64 {
        let basis = phase_states(s, 0.37).unwrap();
        let states = basis.states();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((linalg::inner(a, b) - c(target, 0.0)).norm());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut norm = 0.0f64;
    let mut flat = 0.0f64;
    let mut exact = 0.0f64;
    for s in [1usize, 5, 16, 33, 64] {
        let basis = phase_states(s, 0.9).unwrap();
        let rho = random_density_matrix(s + 1, &mut rng);
        norm = norm.max((phase_distribution(&rho, &basis).unwrap().normalization() - 1.0).abs());
        for n in [0, s / 2, s] {
            let dist = phase_distribution(&number_state(s, n).unwrap(), &basis).unwrap();
            flat = flat.max(dist.values().iter().map(|p| (p - 1.0 / (2.0 * PI)).abs()).fold(0.0, f64::max));
        }
        let weights: Vec<f64> = (0..=s).map(|_| rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let diagonal = DensityMatrix::diagonal_in(basis.states(), &weights).unwrap();
        let out = phase_tomography(&diagonal, &basis).unwrap();
        exact = exact.max(linalg::max_abs(&(out.reconstructed.matrix() - diagonal.matrix())));
    }
    ensure(ortho <= 1e-10 && norm <= 1e-9 && flat <= 1e-10 && exact <= 1e-10, || {
        format!("orthonormality {ortho:.3e}, normalization {norm:.3e}, flatness {flat:.3e}, exactness {exact:.3e}")
    })?;
    Ok(format!(
        "orthonormality {ortho:.1e} (s <= 64), normalization {norm:.1e}, flatness {flat:.1e}, phase-diagonal {exact:.1e}"
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_td = 0.0f64;
    let mut worst_trace = 0.0f64;
    for twice in 1..=4 {
        let spin = Spin::from_twice(twice);
        let q = build_spin_quorum(spin, None).map_err(|e| e.to_string())?;
        let size = spin.quorum_size();
        ensure(q.rank() == size, || format!("spin {spin}: rank {} != {size}", q.rank()))?;
        for _ in 0..50 {
            let rho = random_density_matrix(spin.dim(), &mut rng);
            let p = q.probabilities(&rho).unwrap();
            let total: f64 = p.iter().sum();
            ensure(total > 0.0 && total < size as f64, || format!("spin {spin}: sum p = {total}"))?;
            let report = spin_reconstruct(&q, &p, Some(&rho)).unwrap();
            worst_td = worst_td.max(report.trace_distance.unwrap());
            worst_trace = worst_trace.max((report.trace - 1.0).abs());
        }
    }
    ensure(worst_td <= 1e-8 && worst_trace <= 1e-6, || {
        format!("trace distance {worst_td:.3e}, trace deviation {worst_trace:.3e}")
    })?;
    Ok(format!(
        "s = 1/2..2: full rank, trace distance {worst_td:.1e}, trace deviation {worst_trace:.1e}"
    ))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let q = qubit_design_quorum(&QubitDesign::Named(NamedDesign::Tetrahedron)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rho = random_density_matrix(2, &mut rng);
    let config = SweepConfig::new(vec![100, 1_000, 10_000, 100_000, 1_000_000], 50, 9);
    let table = error_scaling_sweep(&q, &rho, &config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let slope = table.slope.ok_or("no slope")?;
    ensure((slope + 0.5).abs() <= 0.1, || format!("slope {slope:.4}"))?;
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("fitted slope {slope:.4} in {elapsed:.2?}"))
}

const DETERMINISM_SCENARIOS: [(&str, &str); 5] = [
    (
        "qubit.json",
        r#"{ "kind": "qubit", "state": { "random": { "seed": 7 } }, "sampling": { "shots_per_setting": 1000 } }"#,
    ),
    (
        "spin.json",
        r#"{ "kind": "spin", "spin": 1, "state": { "random": { "seed": 3 } }, "sampling": { "shots_per_setting": 10000, "seed": 42 } }"#,
    ),
    (
        "nqubit.json",
        r#"{ "kind": "nqubit", "qubits": 2, "state": { "named": { "name": "werner", "visibility": 0.8 } }, "sampling": { "shots_per_setting": 500 } }"#,
    ),
    (
        "qudit.json",
        r#"{ "kind": "qudit", "dim": 3, "state": { "random": { "seed": 2 } } }"#,
    ),
    (
        "phase.json",
        r#"{ "kind": "phase", "s": 6, "state": { "random": { "seed": 4 } }, "sampling": { "shots_per_setting": 2000 } }"#,
    ),
];

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_qtomo");
    let invoke = |args: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
        })?;
        Ok(out.stdout)
    };
    let mut runs = 0;
    for (name, body) in DETERMINISM_SCENARIOS {
        let path = dir.path().join(name);
        std::fs::write(&path, body).map_err(|e| e.to_string())?;
        let p = path.to_str().unwrap();
        let commands: [Vec<&str>; 4] = [
            vec!["run", p, "--seed", "11"],
            vec!["run", p, "--format", "csv", "--seed", "11"],
            vec!["quorum-check", p, "--seed", "11"],
            vec!["sample-sweep", p, "--shots", "100,1000", "--trials", "5", "--seed", "11"],
        ];
        for args in &commands {
            let first = invoke(args)?;
            let second = invoke(args)?;
            ensure(first == second, || format!("{args:?} differs between runs"))?;
            runs += 1;
        }
        // Reports written to a file match the stdout bytes.
        let out = dir.path().join(format!("{name}.report"));
        invoke(&["run", p, "--seed", "11", "--out", out.to_str().unwrap()])?;
        let stdout = invoke(&["run", p, "--seed", "11"])?;
        ensure(std::fs::read(&out).map_err(|e| e.to_string())? == stdout, || {
            format!("{name}: file and stdout reports differ")
        })?;
    }
    Ok(format!("{runs} command pairs byte-identical"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact qubit tomography", criterion_1),
        ("qubit dual closed form", criterion_2),
        ("N-qubit product quorums", criterion_3),
        ("SU(D) basis", criterion_4),
        ("SDP optimality at truncation optimum", criterion_5),
        ("frame axioms", criterion_6),
        ("phase module", criterion_7),
        ("spin module", criterion_8),
        ("statistical scaling", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
