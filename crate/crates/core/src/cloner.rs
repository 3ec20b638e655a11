//! The 1→2 asymmetric cloning isometry and its outputs.
//!
//! A machine with amplitudes `(μ, ν, ξ)` in dimension `d` maps basis state `|i⟩`
//! of the input register to
//!
//! ```text
//! μ|i i i⟩ + ν Σ_{j≠i} |i j j⟩ + ξ Σ_{j≠i} |j i j⟩      (order A ⊗ B ⊗ X)
//! ```
//!
//! where `A` and `B` are the two clones and `X` is the ancilla. The blank state
//! of `B` and the initial state of `X` are absorbed into the map, so the machine
//! is a `d³ × d` isometry whenever `μ² + (d−1)(ν² + ξ²) = 1`.
//!
//! Two families are used throughout:
//!
//! * universal machines, which additionally satisfy `μ = ν + ξ` and clone every
//!   input equally well, parameterized by a mixing angle (see [`universal_params`]);
//! * phase-covariant machines, where `ν` and `ξ` are free and `μ` is fixed by
//!   normalization. They clone equatorial states (equal-modulus amplitudes) equally well.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{self, ComplexMatrix, SubsystemShape};

/// Tolerance for accepting `μ² + (d−1)(ν² + ξ²) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Tolerance for accepting a normalized input state.
pub const STATE_NORM_TOL: f64 = 1e-12;

/// Which of the two clones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Machine amplitudes `(d, μ, ν, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClonerParams {
    d: usize,
    mu: f64,
    nu: f64,
    xi: f64,
}

impl ClonerParams {
    /// Validates all four amplitudes as given.
    pub fn new(d: usize, mu: f64, nu: f64, xi: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!("dimension must be at least 2, got {d}")));
        }
        if !(mu >= 0.0 && nu >= 0.0 && xi >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "amplitudes must be non-negative, got mu={mu}, nu={nu}, xi={xi}"
            )));
        }
        let norm = mu * mu + (d as f64 - 1.0) * (nu * nu + xi * xi);
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidParams(format!(
                "mu² + (d-1)(nu² + xi²) = {norm}, expected 1"
            )));
        }
        Ok(Self { d, mu, nu, xi })
    }

    /// Phase-covariant machine: `μ` is recovered from normalization.
    pub fn phase_covariant(d: usize, nu: f64, xi: f64) -> Result<Self> {
        let mu_sq = 1.0 - (d as f64 - 1.0) * (nu * nu + xi * xi);
        if mu_sq < -NORMALIZATION_TOL {
            return Err(Error::InvalidParams(format!(
                "(d-1)(nu² + xi²) = {} exceeds 1",
                1.0 - mu_sq
            )));
        }
        Self::new(d, mu_sq.max(0.0).sqrt(), nu, xi)
    }

    /// Universal machine with mixing angle `phi_mix`; see [`universal_params`].
    pub fn universal(d: usize, phi_mix: f64) -> Result<Self> {
        universal_params(d, phi_mix)
    }

    /// `μ = 1`: copies basis states perfectly.
    pub fn trivial_copier(d: usize) -> Self {
        Self {
            d,
            mu: 1.0,
            nu: 0.0,
            xi: 0.0,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Residual of `μ = ν + ξ`, zero for universal machines.
    pub fn universality_defect(&self) -> f64 {
        self.mu - self.nu - self.xi
    }

    /// Nonzero amplitudes of the image of `|i⟩`, as (index into `A⊗B⊗X`, amplitude).
    fn image_terms(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let d = self.d;
        let idx = move |a: usize, b: usize, x: usize| (a * d + b) * d + x;
        std::iter::once((idx(i, i, i), self.mu)).chain((0..d).filter(move |&j| j != i).flat_map(move |j| {
            [(idx(i, j, j), self.nu), (idx(j, i, j), self.xi)]
        }))
    }
}

/// Input state `Σ αᵢ|i⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputState {
    amplitudes: Vec<Complex64>,
}

impl InputState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidArgument("input dimension must be at least 2".into()));
        }
        let norm_sq = qlinalg::norm_sq(&amplitudes);
        if (norm_sq - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); d];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn d(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.amplitudes)
    }
}

/// Qubit on a fixed-latitude orbit of the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitState {
    theta: f64,
    phi: f64,
}

impl OrbitState {
    /// `theta ∈ [0, π]`, `phi ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!("theta {theta} outside [0, π]")));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidArgument(format!("phi {phi} outside [0, 2π)")));
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn bloch(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Output of one application of the machine.
#[derive(Debug, Clone)]
pub struct ClonerOutput {
    pub psi_abx: Vec<Complex64>,
    pub rho_ab: ComplexMatrix,
    pub rho_a: ComplexMatrix,
    pub rho_b: ComplexMatrix,
    pub rho_x: ComplexMatrix,
    pub f_a: f64,
    pub f_b: f64,
    pub eta_a: f64,
    pub eta_b: f64,
}

impl ClonerOutput {
    pub fn d(&self) -> usize {
        self.rho_a.rows()
    }

    /// Reduced state of any set of factors of `A⊗B⊗X` (indices 0, 1, 2).
    pub fn reduced(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        let d = self.d();
        qlinalg::reduced_from_pure(&self.psi_abx, &SubsystemShape::new(vec![d, d, d])?, keep)
    }

    pub fn rho_ax(&self) -> ComplexMatrix {
        self.reduced(&[0, 2]).expect("three factors")
    }

    pub fn rho_bx(&self) -> ComplexMatrix {
        self.reduced(&[1, 2]).expect("three factors")
    }
}

/// Single-clone marginals and quality figures, without the joint state.
#[derive(Debug, Clone)]
pub struct CloneQualities {
    pub rho_a: ComplexMatrix,
    pub rho_b: ComplexMatrix,
    pub f_a: f64,
    pub f_b: f64,
    pub eta_a: f64,
    pub eta_b: f64,
}

/// `e^{iφ_k}/√d` amplitudes.
pub fn equatorial_state(d: usize, phases: &[f64]) -> Result<InputState> {
    if phases.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: phases.len(),
        });
    }
    let s = 1.0 / (d as f64).sqrt();
    Ok(InputState {
        amplitudes: phases.iter().map(|&p| Complex64::from_polar(s, p)).collect(),
    })
}

/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub fn orbit_to_input(s: &OrbitState) -> InputState {
    let (sh, ch) = (0.5 * s.theta).sin_cos();
    InputState {
        amplitudes: vec![Complex64::new(ch, 0.0), Complex64::from_polar(sh, s.phi)],
    }
}

/// Haar-random pure state in dimension `d`.
pub fn haar_random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> InputState {
    let raw: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = qlinalg::norm_sq(&raw).sqrt();
    InputState {
        amplitudes: raw.into_iter().map(|z| z / n).collect(),
    }
}

/// [`haar_random_state`] drawn from a ChaCha8 stream seeded with `seed`.
pub fn haar_random_state_seeded(d: usize, seed: u64) -> InputState {
    haar_random_state(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Equatorial state with uniformly random phases.
pub fn random_equatorial_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> InputState {
    let phases: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    equatorial_state(d, &phases).expect("length matches")
}

/// [`random_equatorial_state`] drawn from a ChaCha8 stream seeded with `seed`.
pub fn random_equatorial_state_seeded(d: usize, seed: u64) -> InputState {
    random_equatorial_state(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// The `d³ × d` isometry; column `i` is the image of `|i⟩`.
pub fn build_isometry(p: &ClonerParams) -> ComplexMatrix {
    let d = p.d;
    let mut v = ComplexMatrix::zeros(d * d * d, d);
    for i in 0..d {
        for (row, amp) in p.image_terms(i) {
            v[(row, i)] += Complex64::new(amp, 0.0);
        }
    }
    v
}

/// Universal machine: `ν = r cos φ`, `ξ = r sin φ`, `μ = ν + ξ`, `r = 1/√(d + sin 2φ)`.
///
/// `phi_mix = 0` sends all quality to clone A, `π/2` to clone B, `π/4` is symmetric.
pub fn universal_params(d: usize, phi_mix: f64) -> Result<ClonerParams> {
    if !(-1e-15..=FRAC_PI_2 + 1e-15).contains(&phi_mix) {
        return Err(Error::InvalidArgument(format!("phi_mix {phi_mix} outside [0, π/2]")));
    }
    if d < 2 {
        return Err(Error::InvalidParams(format!("dimension must be at least 2, got {d}")));
    }
    let phi_mix = phi_mix.clamp(0.0, FRAC_PI_2);
    let r = 1.0 / (d as f64 + (2.0 * phi_mix).sin()).sqrt();
    let (s, c) = phi_mix.sin_cos();
    let (nu, xi) = ((r * c).max(0.0), (r * s).max(0.0));
    ClonerParams::new(d, nu + xi, nu, xi)
}

/// Image of the input under the machine.
pub fn output_state(p: &ClonerParams, input: &InputState) -> Result<Vec<Complex64>> {
    check_dims(p, input)?;
    let d = p.d;
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d * d];
    for (i, alpha) in input.amplitudes.iter().enumerate() {
        for (row, amp) in p.image_terms(i) {
            psi[row] += alpha * amp;
        }
    }
    Ok(psi)
}

fn check_dims(p: &ClonerParams, input: &InputState) -> Result<()> {
    if p.d != input.d() {
        return Err(Error::DimensionMismatch {
            expected: p.d,
            found: input.d(),
        });
    }
    Ok(())
}

/// Runs the machine and computes every reduced state and quality figure.
pub fn apply(p: &ClonerParams, input: &InputState) -> Result<ClonerOutput> {
    let psi = output_state(p, input)?;
    let d = p.d;
    let shape = SubsystemShape::new(vec![d, d, d])?;
    let rho_ab = qlinalg::reduced_from_pure(&psi, &shape, &[0, 1])?;
    let rho_a = qlinalg::reduced_from_pure(&psi, &shape, &[0])?;
    let rho_b = qlinalg::reduced_from_pure(&psi, &shape, &[1])?;
    let rho_x = qlinalg::reduced_from_pure(&psi, &shape, &[2])?;
    let f_a = fidelity(&rho_a, input)?;
    let f_b = fidelity(&rho_b, input)?;
    Ok(ClonerOutput {
        psi_abx: psi,
        rho_ab,
        rho_a,
        rho_b,
        rho_x,
        f_a,
        f_b,
        eta_a: shrinking_from_fidelity(f_a, d),
        eta_b: shrinking_from_fidelity(f_b, d),
    })
}

/// Like [`apply`] but only forms the single-clone marginals; cheap for large `d`.
pub fn apply_marginals(p: &ClonerParams, input: &InputState) -> Result<CloneQualities> {
    let psi = output_state(p, input)?;
    let d = p.d;
    let shape = SubsystemShape::new(vec![d, d, d])?;
    let rho_a = qlinalg::reduced_from_pure(&psi, &shape, &[0])?;
    let rho_b = qlinalg::reduced_from_pure(&psi, &shape, &[1])?;
    let f_a = fidelity(&rho_a, input)?;
    let f_b = fidelity(&rho_b, input)?;
    Ok(CloneQualities {
        rho_a,
        rho_b,
        f_a,
        f_b,
        eta_a: shrinking_from_fidelity(f_a, d),
        eta_b: shrinking_from_fidelity(f_b, d),
    })
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity(rho: &ComplexMatrix, ideal: &InputState) -> Result<f64> {
    if rho.rows() != ideal.d() || !rho.is_square() {
        return Err(Error::DimensionMismatch {
            expected: ideal.d(),
            found: rho.rows(),
        });
    }
    let psi = ideal.amplitudes();
    Ok(qlinalg::inner(psi, &rho.apply(psi)).re)
}

/// `η = (dF − 1)/(d − 1)`.
pub fn shrinking_from_fidelity(f: f64, d: usize) -> f64 {
    (d as f64 * f - 1.0) / (d as f64 - 1.0)
}

/// `F = (1 + (d − 1)η)/d`.
pub fn fidelity_from_shrinking(eta: f64, d: usize) -> f64 {
    (1.0 + (d as f64 - 1.0) * eta) / d as f64
}

/// Left-hand side of the universal trade-off ellipse
/// `F_A² + F_B² + 2(d²−2)/d² F_A F_B − 2(d²+d−2)/d² (F_A + F_B) + (d−1)(d+3)/d²`.
pub fn tradeoff_residual(f_a: f64, f_b: f64, d: usize) -> f64 {
    let d = d as f64;
    let d2 = d * d;
    f_a * f_a + f_b * f_b + 2.0 * (d2 - 2.0) / d2 * f_a * f_b - 2.0 * (d2 + d - 2.0) / d2 * (f_a + f_b)
        + (d - 1.0) * (d + 3.0) / d2
}

/// Fidelity of clone A of the universal machine at mixing angle `phi_mix`, in closed form.
pub fn universal_fidelity_a(d: usize, phi_mix: f64) -> f64 {
    let d = d as f64;
    let (s, c) = phi_mix.sin_cos();
    let s2 = (2.0 * phi_mix).sin();
    (d * c * c + s * s + s2) / (d + s2)
}

/// Fidelity of clone B of the universal machine, in closed form.
pub fn universal_fidelity_b(d: usize, phi_mix: f64) -> f64 {
    let d = d as f64;
    let (s, c) = phi_mix.sin_cos();
    let s2 = (2.0 * phi_mix).sin();
    (d * s * s + c * c + s2) / (d + s2)
}

/// Closed-form marginal of one clone for an arbitrary input:
///
/// `ρ_A = [(d−2)ν² + 2μν] |ψ⟩⟨ψ| + ξ² 1 + (μ² + ν² − ξ² − 2μν) Σᵢ |αᵢ|² |i⟩⟨i|`,
/// and the same for `B` with `ν ↔ ξ`.
pub fn marginal_closed_form(p: &ClonerParams, input: &InputState, which: Side) -> Result<ComplexMatrix> {
    check_dims(p, input)?;
    let (own, other) = match which {
        Side::A => (p.nu, p.xi),
        Side::B => (p.xi, p.nu),
    };
    let d = p.d as f64;
    let mu = p.mu;
    let shrink = (d - 2.0) * own * own + 2.0 * mu * own;
    let defect = mu * mu + own * own - other * other - 2.0 * mu * own;
    let pops: Vec<f64> = input.amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let mut rho = input.density().scale_real(shrink);
    for (i, pop) in pops.iter().enumerate() {
        rho[(i, i)] += Complex64::new(other * other + defect * pop, 0.0);
    }
    Ok(rho)
}

/// `η |ψ⟩⟨ψ| + (1 − η)/d · 1`.
pub fn isotropic_form(input: &InputState, eta: f64) -> ComplexMatrix {
    let d = input.d();
    let mut rho = input.density().scale_real(eta);
    for i in 0..d {
        rho[(i, i)] += Complex64::new((1.0 - eta) / d as f64, 0.0);
    }
    rho
}

/// Max-abs deviation of the simulated clone from the isotropic form with shrinking `eta`.
pub fn isotropy_residual(p: &ClonerParams, input: &InputState, eta: f64, which: Side) -> Result<f64> {
    let q = apply_marginals(p, input)?;
    let rho = match which {
        Side::A => &q.rho_a,
        Side::B => &q.rho_b,
    };
    Ok(rho.max_abs_diff(&isotropic_form(input, eta)))
}
