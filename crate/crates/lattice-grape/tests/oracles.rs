//! Cross-checks of the band solver, control operators, and ensemble
//! fidelity against independent numerical oracles.

mod common;

use lattice_grape::fidelity::gate_fidelity_over_channels;
use lattice_grape::*;
use num_complex::Complex64 as C64;

#[test]
fn band_edges_match_mathieu_characteristic_values() {
    for &r in &[2.0, 12.0, 13.0, 17.0, 30.0] {
        let spec = LatticeSpec::new(r);
        let center = solve_bands(&spec, 0.0).unwrap();
        let edge = solve_bands(&spec, 1.0).unwrap();
        let mathieu_center = common::band_edges_center(r, spec.n_bands);
        let mathieu_edge = common::band_edges_edge(r, spec.n_bands);
        for n in 0..spec.n_bands {
            assert!(
                (center.energies[n] - mathieu_center[n]).abs() < 1e-8,
                "r={r} band {n} at k=0: {} vs Mathieu {}",
                center.energies[n],
                mathieu_center[n]
            );
            assert!(
                (edge.energies[n] - mathieu_edge[n]).abs() < 1e-8,
                "r={r} band {n} at k=1: {} vs Mathieu {}",
                edge.energies[n],
                mathieu_edge[n]
            );
        }
    }
}

#[test]
fn interior_energies_lie_between_mathieu_band_edges() {
    // each 1-D band is monotone in |k|, so interior energies must sit
    // between the two Mathieu band-edge values
    let spec = LatticeSpec::new(13.0);
    let sol = solve_bands(&spec, 0.3).unwrap();
    let center = common::band_edges_center(13.0, spec.n_bands);
    let edge = common::band_edges_edge(13.0, spec.n_bands);
    for n in 0..spec.n_bands {
        let lo = center[n].min(edge[n]) - 1e-8;
        let hi = center[n].max(edge[n]) + 1e-8;
        assert!(
            sol.energies[n] >= lo && sol.energies[n] <= hi,
            "band {n} at k=0.3: {} outside [{lo}, {hi}]",
            sol.energies[n]
        );
    }
}

#[test]
fn free_oscillation_period_matches_mathieu_gap() {
    let spec = LatticeSpec::new(13.0);
    let period = free_oscillation_period(&spec).unwrap();
    let q = 13.0 / 4.0;
    let gap = common::mathieu_b(2, q) - common::mathieu_a(0, q);
    assert!(
        (period - std::f64::consts::TAU / gap).abs() < 1e-8,
        "period {period} vs Mathieu {}",
        std::f64::consts::TAU / gap
    );
}

#[test]
fn control_matrix_elements_match_real_space_quadrature() {
    let spec = LatticeSpec::new(17.0);
    let sol = solve_bands(&spec, 0.0).unwrap();
    let ops = control_operators(&spec, &sol).unwrap();

    let col = |n: usize| -> Vec<C64> { sol.bloch_vectors.column(n).to_vec() };
    let sin_run = common::real_space_overlap(&col(0), &col(1), |x| (2.0 * x).sin());
    let sin_lib = ops.sin2x_band[(0, 1)].norm();
    assert!(
        (sin_lib - sin_run).abs() / sin_run < 1e-6,
        "sin2x 0-1 element: {sin_lib} vs quadrature {sin_run}"
    );

    let cos_run = common::real_space_overlap(&col(0), &col(2), |x| (2.0 * x).cos());
    let cos_lib = ops.cos2x_band[(0, 2)].norm();
    assert!(
        (cos_lib - cos_run).abs() / cos_run.max(1e-12) < 1e-6,
        "cos2x 0-2 element: {cos_lib} vs quadrature {cos_run}"
    );
}

fn as_m2(a: &ndarray::Array2<C64>) -> common::M2 {
    [[a[(0, 0)], a[(0, 1)]], [a[(1, 0)], a[(1, 1)]]]
}

#[test]
fn coherent_fidelity_matches_brute_force() {
    let mut rng = common::TestRng::new(2024);
    let spec = LatticeSpec::with_basis(13.0, 16, 2);
    let v: common::M2 = [
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    ];
    for case in 0..20 {
        let m = 1 + case % 3;
        let n_slices = 1 + case % 4;
        let ks: Vec<f64> = (0..m).map(|i| -0.9 + 1.7 * i as f64 / m as f64).collect();
        let ens = EnsembleSpec::from_samples(ks).unwrap();
        let channels = ens.channels(&spec).unwrap();

        let alpha: Vec<f64> = (0..n_slices).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let beta: Vec<f64> = (0..n_slices).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let dt = rng.uniform(0.02, 0.3);
        let pulse = ControlPulse::new(13.0, dt, alpha.clone(), beta.clone()).unwrap();

        let report = gate_fidelity_over_channels(
            &channels,
            &ens.weights,
            &pulse,
            &TargetGate::x_pi(),
            false,
        )
        .unwrap();

        let members: Vec<(Vec<f64>, common::M2, common::M2)> = channels
            .iter()
            .map(|ch| {
                (
                    ch.energies.to_vec(),
                    as_m2(&ch.ops.cos2x_band),
                    as_m2(&ch.ops.sin2x_band),
                )
            })
            .collect();
        let oracle = common::brute_force_phi(&members, &ens.weights, &alpha, &beta, dt, &v);
        assert!(
            (report.phi - oracle).abs() < 1e-12,
            "case {case}: phi {} vs brute force {}",
            report.phi,
            oracle
        );
    }
}

#[test]
fn total_propagators_unitary_for_random_inputs() {
    let mut rng = common::TestRng::new(7);
    for case in 0..12 {
        let r = rng.uniform(0.5, 40.0);
        let spec = LatticeSpec::new(r);
        let n_slices = 4 + case;
        let alpha: Vec<f64> = (0..n_slices).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let beta: Vec<f64> = (0..n_slices).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let pulse = ControlPulse::new(r, rng.uniform(0.01, 0.2), alpha, beta).unwrap();
        let k = rng.uniform(-0.999, 1.0);
        let set = total_evolution(&pulse, &spec, k).unwrap();
        assert!(
            set.unitarity_defect() < 1e-10,
            "case {case}: unitarity defect {}",
            set.unitarity_defect()
        );
    }
}
