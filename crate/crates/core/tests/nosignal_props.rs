use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcloning::cloner::{apply, equatorial_state, universal_params, ClonerParams};
use qcloning::nosignal::{
    assemble, certify_feasible, chain_certifies_infeasible, extract_tensor, inequality_crosscheck, ineq1,
    max_quality_search, no_signaling_residual, orbit_frontier_scan, psd_residuals, rotate_tensor, BlochVector,
    CorrelationTensor, SamplingRegion,
};
use qcloning::qlinalg::{hermitian_eigenvalues, kron, ComplexMatrix};

fn random_tensor(rng: &mut impl Rng) -> CorrelationTensor {
    let mut t = [[0.0; 3]; 3];
    for row in &mut t {
        for v in row {
            *v = rng.random_range(-1.0..1.0);
        }
    }
    CorrelationTensor::new(rng.random(), rng.random(), t)
}

fn random_ns_tensor(eta_a: f64, eta_b: f64, width: f64, rng: &mut impl Rng) -> CorrelationTensor {
    let mut e = [0.0; 7];
    for v in &mut e {
        *v = rng.random_range(-width..=width);
    }
    CorrelationTensor::no_signaling(eta_a, eta_b, e[0], e[1], e[2], e[3], e[4], e[5], e[6])
}

fn z_rotation(chi: f64) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(2);
    u[(0, 0)] = Complex64::from_polar(1.0, -chi / 2.0);
    u[(1, 1)] = Complex64::from_polar(1.0, chi / 2.0);
    u
}

fn e3(vals: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            for k in (j + 1)..4 {
                acc += vals[i] * vals[j] * vals[k];
            }
        }
    }
    acc
}

#[test]
fn antipodal_scan_beyond_bound_is_never_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100_000 {
        let ct = random_ns_tensor(0.8, 0.8, 1.0, &mut rng);
        assert!(psd_residuals(&ct).unwrap().min_eig < 0.0);
    }
    assert!(certify_feasible(0.8, 0.8).is_none());
}

#[test]
fn optimal_qubit_clones_saturate_the_bound() {
    for k in 0..=20 {
        let eta_a = k as f64 / 20.0;
        let eta_b = (1.0 - eta_a * eta_a).sqrt();
        let p = ClonerParams::phase_covariant(2, eta_a * FRAC_1_SQRT_2, eta_b * FRAC_1_SQRT_2).unwrap();
        let out = apply(&p, &equatorial_state(2, &[0.0, 0.0]).unwrap()).unwrap();
        let ct = extract_tensor(&out.rho_ab, &BlochVector::x()).unwrap();
        assert!((ct.eta_a * ct.eta_a + ct.eta_b * ct.eta_b - 1.0).abs() < 1e-12);
        assert!(ct.is_no_signaling_consistent());
        let r = psd_residuals(&ct).unwrap();
        assert!((-1e-9..=1e-3).contains(&r.min_eig), "{eta_a}: {r:?}");
    }
}

#[test]
fn extracted_tensor_of_symmetric_optimal_clones() {
    let p = ClonerParams::phase_covariant(2, 0.5, 0.5).unwrap();
    let out = apply(&p, &equatorial_state(2, &[0.0, 0.0]).unwrap()).unwrap();
    let ct = extract_tensor(&out.rho_ab, &BlochVector::x()).unwrap();
    assert!((ct.eta_a - FRAC_1_SQRT_2).abs() < 1e-12 && (ct.eta_b - FRAC_1_SQRT_2).abs() < 1e-12);
    // t_xx = t_yy = η_Aη_B, not η_Aη_B/2
    assert!((ct.t[0][0] - 0.5).abs() < 1e-12 && (ct.t[1][1] - 0.5).abs() < 1e-12);
    assert!(ct.t[2][2].abs() < 1e-12);
    let rebuilt = assemble(&ct, &BlochVector::x());
    assert!(rebuilt.max_abs_diff(&out.rho_ab) < 1e-12);
}

#[test]
fn extracted_universal_symmetric_shrinking() {
    let p = universal_params(2, PI / 4.0).unwrap();
    let out = apply(&p, &equatorial_state(2, &[0.0, 0.0]).unwrap()).unwrap();
    let ct = extract_tensor(&out.rho_ab, &BlochVector::x()).unwrap();
    assert!((ct.eta_a - 2.0 / 3.0).abs() < 1e-10 && (ct.eta_b - 2.0 / 3.0).abs() < 1e-10);
}

#[test]
fn max_quality_at_small_grid() {
    let r = max_quality_search(100).unwrap();
    assert!(r.max_quality >= 1.0 - 3.0 / 100.0 && r.max_quality <= 1.0 + 1e-6, "{r:?}");
    assert!(max_quality_search(50).is_err());
}

#[test]
fn points_beyond_bound_are_certified_infeasible() {
    let radius = 1.05f64.sqrt();
    for k in 0..=50 {
        let a = k as f64 / 50.0 * FRAC_PI_2;
        let (ea, eb) = (radius * a.cos(), radius * a.sin());
        assert!(chain_certifies_infeasible(ea, eb), "{ea} {eb}");
        assert!(certify_feasible(ea, eb).is_none());
    }
}

#[test]
fn crosscheck_has_no_necessary_condition_violations() {
    for region in [SamplingRegion::PhysicalBox, SamplingRegion::NearSaturating] {
        let r = inequality_crosscheck(region, 10_000, 3).unwrap();
        assert_eq!(r.necessary_violations, 0);
        assert_eq!(r.pair_mismatches, r.mismatches_with_two_negative);
    }
}

#[test]
fn orbit_frontier_on_equator_is_the_circle() {
    let front = orbit_frontier_scan(FRAC_PI_2, 60).unwrap();
    let best = front.iter().map(|p| p.eta_a * p.eta_a + p.eta_b * p.eta_b).fold(0.0, f64::max);
    assert!(best <= 1.0 + 1e-12 && best > 0.99);
    assert!(front.windows(2).all(|w| w[0].eta_a <= w[1].eta_a));
    let polar = orbit_frontier_scan(0.5, 30).unwrap();
    assert!(!polar.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_is_covariant(seed in any::<u64>(), chi in -7.0..7.0f64, theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ct = random_tensor(&mut rng);
        let r = BlochVector::from_angles(theta, phi);
        let u = z_rotation(chi);
        let uu = kron(&u, &u);
        let lhs = assemble(&rotate_tensor(&ct, chi), &r.rotate_z(chi));
        let rhs = uu.matmul(&assemble(&ct, &r)).matmul(&uu.adjoint());
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn rotations_compose(seed in any::<u64>(), a in -4.0..4.0f64, b in -4.0..4.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ct = random_tensor(&mut rng);
        let composed = rotate_tensor(&rotate_tensor(&ct, b), a);
        prop_assert!(composed.max_abs_diff(&rotate_tensor(&ct, a + b)) < 1e-12);
    }

    #[test]
    fn residual_vanishes_exactly_on_no_signaling_tensors(seed in any::<u64>(), dxx in -0.5..0.5f64, dxy in -0.5..0.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ns = random_ns_tensor(rng.random(), rng.random(), 1.0, &mut rng);
        prop_assert!(no_signaling_residual(&ns) < 1e-12);
        let mut broken = ns;
        broken.t[1][1] += dxx;
        broken.t[1][0] += dxy;
        let defect = dxx.abs().max(dxy.abs());
        prop_assume!(defect > 1e-6);
        prop_assert!(no_signaling_residual(&broken) > defect / 4.0);
    }

    #[test]
    fn polynomial_inequality_is_minus_sixteen_e3(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ct = random_ns_tensor(rng.random(), rng.random(), 1.0, &mut rng);
        let vals = hermitian_eigenvalues(&assemble(&ct, &BlochVector::x())).unwrap();
        prop_assert!((ineq1(&ct) + 16.0 * e3(&vals)).abs() < 1e-12);
    }

    #[test]
    fn feasible_reduced_tensors_obey_firstc(eta_a in 0.0..1.0f64, eta_b in 0.0..1.0f64, t in -1.0..1.0f64) {
        let ct = CorrelationTensor::no_signaling(eta_a, eta_b, t, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let r = psd_residuals(&ct).unwrap();
        if r.feasible() {
            let s = eta_a * eta_a + eta_b * eta_b;
            prop_assert!(s <= 1.0 - 2.0 * (t * t - eta_a * eta_b * t) + 1e-9);
        }
    }

    #[test]
    fn extract_inverts_assemble(seed in any::<u64>(), theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ct = random_tensor(&mut rng);
        let r = BlochVector::from_angles(theta, phi);
        let back = extract_tensor(&assemble(&ct, &r), &r).unwrap();
        prop_assert!(back.max_abs_diff(&ct) < 1e-12);
    }

    #[test]
    fn assembled_marginals_carry_bloch_vectors(seed in any::<u64>(), theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ct = random_tensor(&mut rng);
        let r = BlochVector::from_angles(theta, phi);
        let m = assemble(&ct, &r);
        prop_assert!(m.hermiticity_error() < 1e-15);
        prop_assert!((m.trace().re - 1.0).abs() < 1e-15);
        let shape = qcloning::SubsystemShape::qubits(2);
        let ra = qcloning::qlinalg::partial_trace(&m, &shape, &[0]).unwrap();
        let [sx, sy, sz] = qcloning::qlinalg::paulis();
        let v = r.components();
        let expect = ra.matmul(&sx).trace().re * v[0] + ra.matmul(&sy).trace().re * v[1] + ra.matmul(&sz).trace().re * v[2];
        prop_assert!((expect - ct.eta_a).abs() < 1e-12);
    }
}
