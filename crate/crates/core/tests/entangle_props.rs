use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcloning::cloner::{apply, equatorial_state, ClonerParams};
use qcloning::entangle::{
    ckw_residual, clone_ppt_spectrum, concurrence, negativity, optimal_ppt_spectrum, qubit_output,
    separability_scan, simulated_ppt_spectrum, tangle_closed_form, tangle_general, tangle_hyperdeterminant,
    tangle_pure3, TangleClass,
};
use qcloning::qlinalg::{hermitian_eigh, ComplexMatrix, SubsystemShape};

fn feasible_qubit(rng: &mut impl Rng) -> (f64, f64) {
    let r = rng.random::<f64>().sqrt();
    let a = rng.random_range(0.0..FRAC_PI_2);
    (r * a.cos(), r * a.sin())
}

fn random_qubit_params(rng: &mut impl Rng) -> ClonerParams {
    let (nu, xi) = feasible_qubit(rng);
    ClonerParams::phase_covariant(2, nu, xi).unwrap()
}

/// Concurrence from the spectrum of `√ρ ρ̃ √ρ`, through the Hermitian eigensolver.
fn concurrence_via_sqrt(rho: &ComplexMatrix) -> f64 {
    let (vals, vecs) = hermitian_eigh(rho).unwrap();
    let sqrt_diag = ComplexMatrix::diag(&vals.iter().map(|v| v.max(0.0).sqrt()).collect::<Vec<_>>());
    let sqrt_rho = vecs.matmul(&sqrt_diag).matmul(&vecs.adjoint());
    let [_, sy, _] = qcloning::qlinalg::paulis();
    let yy = qcloning::qlinalg::kron(&sy, &sy);
    let tilde = yy.matmul(&rho.conj()).matmul(&yy);
    let m = sqrt_rho.matmul(&tilde).matmul(&sqrt_rho);
    let m = (&m + &m.adjoint()).scale_real(0.5);
    let mut l: Vec<f64> = qcloning::qlinalg::hermitian_eigenvalues(&m)
        .unwrap()
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

#[test]
fn closed_form_spectrum_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..1000 {
        let (nu, xi) = feasible_qubit(&mut rng);
        let phi = rng.random_range(0.0..2.0 * PI);
        let closed = clone_ppt_spectrum(nu, xi).unwrap();
        let sim = simulated_ppt_spectrum(nu, xi, phi).unwrap();
        let sim0 = simulated_ppt_spectrum(nu, xi, 0.0).unwrap();
        for k in 0..4 {
            assert!((closed[k] - sim[k]).abs() < 1e-10, "{nu} {xi} {phi}");
            assert!((sim[k] - sim0[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn optimal_family_spectrum() {
    for k in 0..100 {
        let eta_a = k as f64 / 99.0;
        let closed = optimal_ppt_spectrum(eta_a).unwrap();
        assert!(closed.iter().all(|&v| v >= -1e-12));
        let nu = eta_a * FRAC_1_SQRT_2;
        let xi = (1.0 - eta_a * eta_a).max(0.0).sqrt() * FRAC_1_SQRT_2;
        let general = clone_ppt_spectrum(nu, xi).unwrap();
        let sim = simulated_ppt_spectrum(nu, xi, 0.4).unwrap();
        for k in 0..4 {
            assert!((closed[k] - general[k]).abs() < 1e-10);
            assert!(sim[k] >= -1e-9);
        }
    }
}

#[test]
fn symmetric_optimal_negativities() {
    let p = ClonerParams::phase_covariant(2, 0.5, 0.5).unwrap();
    let out = apply(&p, &equatorial_state(2, &[0.0, 0.0]).unwrap()).unwrap();
    let shape = SubsystemShape::qubits(2);
    assert!(negativity(&out.rho_ab, &shape, 0).unwrap() < 1e-9);
    let n_ax = negativity(&out.rho_ax(), &shape, 0).unwrap();
    // 2·max(0, −λ_min) evaluates to ≈ 0.4659 on the simulated state
    assert!((n_ax - 0.465_925_826).abs() < 1e-8, "{n_ax}");
    assert!((concurrence(&out.rho_ax()).unwrap() - 0.5).abs() < 1e-12);
    assert!(concurrence(&out.rho_ab).unwrap() < 1e-12);
}

#[test]
fn universal_symmetric_negativity() {
    let v = 1.0 / 6f64.sqrt();
    let p = ClonerParams::phase_covariant(2, v, v).unwrap();
    let out = apply(&p, &equatorial_state(2, &[0.0, 0.0]).unwrap()).unwrap();
    let n = negativity(&out.rho_ab, &SubsystemShape::qubits(2), 0).unwrap();
    assert!((n - 0.078_689).abs() < 1e-5, "{n}");
}

#[test]
fn tangle_on_optimal_family() {
    for i in 0..=40 {
        let nu = i as f64 / 40.0 * FRAC_1_SQRT_2;
        let xi = (0.5 - nu * nu).max(0.0).sqrt();
        let p = ClonerParams::phase_covariant(2, nu, xi).unwrap();
        for j in 0..=20 {
            let theta = j as f64 / 20.0 * PI;
            let psi = qubit_output(&p, theta, 0.3).unwrap();
            let report = tangle_pure3(&psi).unwrap();
            let closed = tangle_closed_form(nu, theta).unwrap();
            assert!((report.tau_abx - closed).abs() < 1e-9, "nu={nu} theta={theta}");
            assert!((tangle_general(&p, theta).unwrap() - closed).abs() < 1e-12);
            assert!(ckw_residual(&psi).unwrap().abs() < 1e-9);
            let interior = i > 0 && i < 40 && j > 0 && j < 20;
            if interior && (theta - FRAC_PI_2).abs() < 1e-12 {
                assert_eq!(report.class, TangleClass::GhzType);
            }
        }
    }
}

#[test]
fn biseparable_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let nu = rng.random_range(0.0..1.0);
        let p = ClonerParams::phase_covariant(2, nu, 0.0).unwrap();
        let theta = rng.random_range(0.0..PI);
        let psi = qubit_output(&p, theta, 0.0).unwrap();
        let expected = theta.sin().powi(2) * (p.mu().powi(2) - nu * nu).powi(2);
        assert!((tangle_hyperdeterminant(&psi).unwrap() - expected).abs() < 1e-12);
    }
}

#[test]
fn separability_only_near_optimal_family_and_axes() {
    let scan = separability_scan(200, 1e-3).unwrap();
    assert_eq!(scan.separable_outside_band, 0, "{scan:?}");
    assert!(scan.worst_outside_min_eig < -1e-6);
    assert!(scan.separable_points > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn general_tangle_matches_hyperdeterminant_and_ckw(seed in any::<u64>(), theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_qubit_params(&mut rng);
        let psi = qubit_output(&p, theta, phi).unwrap();
        let general = tangle_general(&p, theta).unwrap();
        prop_assert!((tangle_hyperdeterminant(&psi).unwrap() - general).abs() < 1e-12);
        prop_assert!((tangle_pure3(&psi).unwrap().tau_abx - general).abs() < 1e-9);
        prop_assert!(ckw_residual(&psi).unwrap().abs() < 1e-9);
    }

    #[test]
    fn measures_stay_in_range(seed in any::<u64>(), theta in 0.0..PI) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_qubit_params(&mut rng);
        let psi = qubit_output(&p, theta, 0.0).unwrap();
        let r = tangle_pure3(&psi).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.tau_abx));
        let shape = SubsystemShape::qubits(3);
        let rho_ab = qcloning::qlinalg::reduced_from_pure(&psi, &shape, &[0, 1]).unwrap();
        let n = negativity(&rho_ab, &SubsystemShape::qubits(2), 0).unwrap();
        prop_assert!((0.0..=1.0).contains(&n));
    }

    #[test]
    fn concurrence_agrees_with_square_root_route(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ComplexMatrix::from_fn(4, 4, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let p = a.matmul(&a.adjoint());
        let rho = p.scale_real(1.0 / p.trace().re);
        prop_assert!((concurrence(&rho).unwrap() - concurrence_via_sqrt(&rho)).abs() < 1e-6);
    }

    #[test]
    fn pure_state_concurrence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<Complex64> = v.into_iter().map(|z| z / n).collect();
        let expected = 2.0 * (v[0] * v[3] - v[1] * v[2]).norm();
        prop_assert!((concurrence(&ComplexMatrix::projector(&v)).unwrap() - expected).abs() < 1e-12);
    }
}
