mod common;

use common::rng;
use proptest::prelude::*;
use qtomo::phase::phase_states;
use qtomo::operator::trace_inner_product;
use qtomo::qudit::{bloch_expand, qubit_design_quorum, su_generators, NamedDesign, QubitDesign};
use qtomo::sampling::{error_scaling_sweep, simulate_binary_outcomes, LinearTomography, ShotPlan, SweepConfig};
use qtomo::spin::{build_spin_quorum, Spin};
use qtomo::state::random_density_matrix;
use qtomo::DensityMatrix;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn identical_inputs_give_identical_counts(
        probs in prop::collection::vec(0.0f64..=1.0, 1..8),
        shots in 1u64..5000,
        seed: u64,
    ) {
        let plan = ShotPlan::new(shots, seed, probs.len()).unwrap();
        let a = simulate_binary_outcomes(&probs, &plan).unwrap();
        let b = simulate_binary_outcomes(&probs, &plan).unwrap();
        prop_assert_eq!(&a, &b);
        for (k, f) in a.counts.iter().zip(&a.frequencies) {
            prop_assert!(*k <= shots);
            prop_assert_eq!(*f, *k as f64 / shots as f64);
            prop_assert!((0.0..=1.0).contains(f));
        }
    }
}

#[test]
fn fair_coin_concentrates() {
    let n = 1_000_000u64;
    let sigma = 0.5 / (n as f64).sqrt();
    for seed in 0..100 {
        let out = simulate_binary_outcomes(&[0.5], &ShotPlan::new(n, seed, 1).unwrap()).unwrap();
        assert!((out.frequencies[0] - 0.5).abs() <= 5.0 * sigma, "seed {seed}");
    }
}

#[test]
fn linear_inversion_is_unbiased() {
    let q = qubit_design_quorum(&QubitDesign::Named(NamedDesign::Tetrahedron)).unwrap();
    let mut r = rng(17);
    let rho = random_density_matrix(2, &mut r);
    let truth = bloch_expand(rho.operator()).unwrap();
    let p = q.probabilities(&rho).unwrap();
    let generators = su_generators(2).unwrap();
    // Sampled reconstructions are not unit-trace, so components are taken directly.
    let components = |op: &qtomo::HermitianOperator| -> Vec<f64> {
        generators.generators().iter().map(|g| 2.0 * trace_inner_product(g, op).unwrap().re).collect()
    };
    let trials = 400u64;
    let samples: Vec<Vec<f64>> = (0..trials)
        .map(|t| {
            let f = simulate_binary_outcomes(&p, &ShotPlan::new(500, 1000 + t, p.len()).unwrap()).unwrap();
            components(&q.invert(&f.frequencies).unwrap())
        })
        .collect();
    for axis in 0..3 {
        let values: Vec<f64> = samples.iter().map(|v| v[axis]).collect();
        let mean = values.iter().sum::<f64>() / trials as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
        let standard_error = (var / trials as f64).sqrt();
        assert!((mean - truth.components()[axis]).abs() <= 3.0 * standard_error, "axis {axis}");
    }
}

#[test]
fn trace_deviation_shrinks_with_shots() {
    let q = qubit_design_quorum(&QubitDesign::Named(NamedDesign::Octahedron)).unwrap();
    let rho = DensityMatrix::maximally_mixed(2);
    let p = q.probabilities(&rho).unwrap();
    for n in [100u64, 10_000] {
        let f = simulate_binary_outcomes(&p, &ShotPlan::new(n, 3, p.len()).unwrap()).unwrap();
        let dev = (q.invert(&f.frequencies).unwrap().trace() - 1.0).abs();
        assert!(dev <= 10.0 / (n as f64).sqrt(), "N = {n}: {dev}");
    }
}

#[test]
fn noiseless_sweep_is_exact() {
    let q = qubit_design_quorum(&QubitDesign::Named(NamedDesign::Icosahedron)).unwrap();
    let mut r = rng(2);
    let rho = random_density_matrix(2, &mut r);
    let mut config = SweepConfig::new(vec![10, 100, 1000], 3, 1);
    config.noiseless = true;
    let table = error_scaling_sweep(&q, &rho, &config).unwrap();
    assert!(table.rows.iter().all(|row| row.mean_trace_distance <= 1e-9));
}

#[test]
fn sweeps_are_reproducible() {
    let q = qubit_design_quorum(&QubitDesign::Named(NamedDesign::Tetrahedron)).unwrap();
    let mut r = rng(3);
    let rho = random_density_matrix(2, &mut r);
    let config = SweepConfig::new(vec![100, 1000], 8, 77);
    assert_eq!(
        error_scaling_sweep(&q, &rho, &config).unwrap(),
        error_scaling_sweep(&q, &rho, &config).unwrap()
    );
}

fn slope_of<T: LinearTomography + Sync>(scheme: &T, rho: &DensityMatrix, seed: u64) -> f64 {
    let config = SweepConfig::new(vec![100, 1_000, 10_000, 100_000, 1_000_000], 50, seed);
    error_scaling_sweep(scheme, rho, &config).unwrap().slope.unwrap()
}

#[test]
fn tetrahedron_error_scales_as_inverse_root() {
    let q = qubit_design_quorum(&QubitDesign::Named(NamedDesign::Tetrahedron)).unwrap();
    let mut r = rng(4);
    let rho = random_density_matrix(2, &mut r);
    let slope = slope_of(&q, &rho, 2024);
    assert!((slope + 0.5).abs() <= 0.1, "slope {slope}");
}

#[test]
fn spin_one_error_scales_as_inverse_root() {
    let q = build_spin_quorum(Spin::from_twice(2), None).unwrap();
    let mut r = rng(5);
    let rho = random_density_matrix(3, &mut r);
    let slope = slope_of(&q, &rho, 2025);
    assert!((slope + 0.5).abs() <= 0.15, "slope {slope}");
}

#[test]
fn phase_diagonal_error_scales_as_inverse_root() {
    let basis = phase_states(4, 0.0).unwrap();
    let weights = [0.4, 0.3, 0.15, 0.1, 0.05];
    let rho = DensityMatrix::diagonal_in(basis.states(), &weights).unwrap();
    let config = SweepConfig::new(vec![100, 1_000, 10_000, 100_000], 40, 9);
    let slope = error_scaling_sweep(&basis, &rho, &config).unwrap().slope.unwrap();
    assert!((slope + 0.5).abs() <= 0.15, "slope {slope}");
}
