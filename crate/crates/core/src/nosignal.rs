//! Two-qubit correlation tensors and the no-signaling bound on clone qualities.
//!
//! A joint two-clone output for a qubit input with Bloch vector `r̂` is written as
//!
//! ```text
//! ρ_AB(r̂) = ¼ (1⊗1 + η_A r̂·σ⊗1 + η_B 1⊗r̂·σ + Σ_jk t_jk σ_j⊗σ_k).
//! ```
//!
//! Covariance under rotations about `z` moves the tensor as `t ↦ R t Rᵀ`.
//! Averaging antipodal inputs along `x` and along `y` must give the same state,
//! otherwise the cloner could be used to signal; this forces `t_xx = t_yy` and
//! `t_xy = −t_yx`. Positivity of `ρ_AB(x̂)` under those constraints then bounds
//! `η_A² + η_B² ≤ 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cloner::{apply_marginals, orbit_to_input, ClonerParams, OrbitState};
use crate::error::{Error, Result};
use crate::qlinalg::{hermitian_eigenvalues, ComplexMatrix, PSD_TOL};

/// Tolerance on `t_xx = t_yy` and `t_xy = −t_yx`.
pub const NO_SIGNALING_TOL: f64 = 1e-12;
/// Number of low-discrepancy perturbations tried before a point is declared uncertified.
pub const PERTURBATION_POINTS: usize = 10_000;
/// Half-width of the perturbation box around the saturating tensor.
pub const PERTURBATION_HALF_WIDTH: f64 = 0.5;

const BLOCH_TOL: f64 = 1e-12;
const EXTRACT_TOL: f64 = 1e-10;

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

/// A unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if (n - 1.0).abs() > BLOCH_TOL {
            return Err(Error::InvalidArgument(format!("Bloch vector norm {n}, expected 1")));
        }
        Ok(Self(v))
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    pub fn x() -> Self {
        Self([1.0, 0.0, 0.0])
    }

    pub fn y() -> Self {
        Self([0.0, 1.0, 0.0])
    }

    pub fn z() -> Self {
        Self([0.0, 0.0, 1.0])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn neg(&self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }

    /// Rotation by `chi` about `z`.
    pub fn rotate_z(&self, chi: f64) -> Self {
        let (s, c) = chi.sin_cos();
        let [x, y, z] = self.0;
        Self([c * x - s * y, s * x + c * y, z])
    }
}

/// Bloch parameterization of a two-qubit state: marginal lengths and `t_jk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationTensor {
    pub eta_a: f64,
    pub eta_b: f64,
    /// `t[j][k]` multiplies `σ_j ⊗ σ_k`, indices in the order `x, y, z`.
    pub t: [[f64; 3]; 3],
}

impl CorrelationTensor {
    pub fn new(eta_a: f64, eta_b: f64, t: [[f64; 3]; 3]) -> Self {
        Self { eta_a, eta_b, t }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, [[0.0; 3]; 3])
    }

    /// Tensor obeying the no-signaling pattern, parameterized by its seven free entries.
    #[allow(clippy::too_many_arguments)]
    pub fn no_signaling(
        eta_a: f64,
        eta_b: f64,
        t_xx: f64,
        t_xy: f64,
        t_xz: f64,
        t_yz: f64,
        t_zx: f64,
        t_zy: f64,
        t_zz: f64,
    ) -> Self {
        Self::new(
            eta_a,
            eta_b,
            [[t_xx, t_xy, t_xz], [-t_xy, t_xx, t_yz], [t_zx, t_zy, t_zz]],
        )
    }

    /// `max(|t_xx − t_yy|, |t_xy + t_yx|)`.
    pub fn no_signaling_defect(&self) -> f64 {
        (self.t[X][X] - self.t[Y][Y]).abs().max((self.t[X][Y] + self.t[Y][X]).abs())
    }

    pub fn is_no_signaling_consistent(&self) -> bool {
        self.no_signaling_defect() <= NO_SIGNALING_TOL
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = (self.eta_a - other.eta_a).abs().max((self.eta_b - other.eta_b).abs());
        for j in 0..3 {
            for k in 0..3 {
                worst = worst.max((self.t[j][k] - other.t[j][k]).abs());
            }
        }
        worst
    }
}

fn pauli_entry(a: usize, r: usize, c: usize) -> Complex64 {
    match (a, r, c) {
        (0, r, c) if r == c => Complex64::new(1.0, 0.0),
        (1, r, c) if r != c => Complex64::new(1.0, 0.0),
        (2, 0, 1) => Complex64::new(0.0, -1.0),
        (2, 1, 0) => Complex64::new(0.0, 1.0),
        (3, 0, 0) => Complex64::new(1.0, 0.0),
        (3, 1, 1) => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// Expansion coefficients `c_ab` of `Σ c_ab σ_a⊗σ_b` with `σ_0 = 1`.
fn coefficients(ct: &CorrelationTensor, r: &BlochVector) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    c[0][0] = 1.0;
    for j in 0..3 {
        c[j + 1][0] = ct.eta_a * r.0[j];
        c[0][j + 1] = ct.eta_b * r.0[j];
        for k in 0..3 {
            c[j + 1][k + 1] = ct.t[j][k];
        }
    }
    c
}

fn assemble_array(ct: &CorrelationTensor, r: &BlochVector) -> [Complex64; 16] {
    let c = coefficients(ct, r);
    let mut m = [Complex64::new(0.0, 0.0); 16];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, row) in c.iter().enumerate() {
                let pa = pauli_entry(a, i >> 1, j >> 1);
                if pa.norm_sqr() == 0.0 {
                    continue;
                }
                for (b, &cab) in row.iter().enumerate() {
                    if cab != 0.0 {
                        acc += pa * pauli_entry(b, i & 1, j & 1) * cab;
                    }
                }
            }
            m[4 * i + j] = acc * 0.25;
        }
    }
    m
}

/// The 4×4 state `ρ_AB(r̂)` described by `ct`, qubit `A` first.
pub fn assemble(ct: &CorrelationTensor, r: &BlochVector) -> ComplexMatrix {
    ComplexMatrix::new(4, 4, assemble_array(ct, r).to_vec()).expect("4x4")
}

/// `t' = R t Rᵀ`, `R` the rotation by `chi` about `z`; `η_A`, `η_B` unchanged.
pub fn rotate_tensor(ct: &CorrelationTensor, chi: f64) -> CorrelationTensor {
    let (s, c) = chi.sin_cos();
    let rot = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
    let mut out = [[0.0; 3]; 3];
    for (l, row) in out.iter_mut().enumerate() {
        for (m, entry) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    acc += rot[l][j] * ct.t[j][k] * rot[m][k];
                }
            }
            *entry = acc;
        }
    }
    CorrelationTensor::new(ct.eta_a, ct.eta_b, out)
}

/// Max-abs entry of `ρ(x̂) + ρ(−x̂) − ρ(ŷ) − ρ(−ŷ)`, each state obtained from `ct`
/// (the tensor seen at `x̂`) by the covariant rotation taking `x̂` to the input.
pub fn no_signaling_residual(ct: &CorrelationTensor) -> f64 {
    let x = BlochVector::x();
    let state = |chi: f64| assemble(&rotate_tensor(ct, chi), &x.rotate_z(chi));
    let lhs = &state(0.0) + &state(PI);
    let rhs = &state(FRAC_PI_2) + &state(3.0 * FRAC_PI_2);
    lhs.max_abs_diff(&rhs)
}

/// Positivity diagnostics of `ρ_AB(x̂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdResiduals {
    /// Polynomial inequality; necessary condition `ineq1 ≤ 0`.
    pub ineq1: f64,
    /// Determinant of the assembled state; necessary condition `det4 ≥ 0`.
    pub det4: f64,
    /// Smallest eigenvalue; feasible iff `min_eig ≥ −1e-9`.
    pub min_eig: f64,
}

impl PsdResiduals {
    pub fn feasible(&self) -> bool {
        self.min_eig >= -PSD_TOL
    }

    /// Verdict of the two polynomial conditions taken together.
    pub fn polynomial_feasible(&self) -> bool {
        self.ineq1 <= PSD_TOL && self.det4 >= -PSD_TOL
    }
}

/// Left side of the polynomial positivity condition for a no-signaling tensor.
///
/// Equals `−16 e₃(ρ_AB(x̂))`, the third elementary symmetric function of the
/// eigenvalues, so `ineq1 ≤ 0` is necessary but not sufficient for positivity.
pub fn ineq1(ct: &CorrelationTensor) -> f64 {
    let (a, b) = (ct.eta_a, ct.eta_b);
    let t = &ct.t;
    let (txx, txy, txz) = (t[X][X], t[X][Y], t[X][Z]);
    let (tyz, tzx, tzy, tzz) = (t[Y][Z], t[Z][X], t[Z][Y], t[Z][Z]);
    -1.0 + a * a + b * b - 2.0 * a * b * txx + 2.0 * txx * txx + 2.0 * txy * txy + txz * txz + tyz * tyz
        - 2.0 * txx * txz * tzx
        + 2.0 * txy * tyz * tzx
        + tzx * tzx
        - 2.0 * txy * txz * tzy
        - 2.0 * txx * tyz * tzy
        + tzy * tzy
        + 2.0 * txx * txx * tzz
        + 2.0 * txy * txy * tzz
        + tzz * tzz
}

/// `ineq1`, determinant and smallest eigenvalue of `ρ_AB(x̂)`.
pub fn psd_residuals(ct: &CorrelationTensor) -> Result<PsdResiduals> {
    if !ct.is_no_signaling_consistent() {
        return Err(Error::NoSignalingViolated {
            residual: ct.no_signaling_defect(),
        });
    }
    let rho = assemble(ct, &BlochVector::x());
    Ok(PsdResiduals {
        ineq1: ineq1(ct),
        det4: rho.determinant()?.re,
        min_eig: hermitian_eigenvalues(&rho)?[0],
    })
}

fn check_bound(eta_a: f64, eta_b: f64) -> Result<()> {
    let value = eta_a * eta_a + eta_b * eta_b;
    if value > 1.0 + PSD_TOL {
        return Err(Error::BoundViolated { value });
    }
    Ok(())
}

/// `t_xx = t_yy = η_Aη_B/2`, every other entry zero: the minimizer of `ineq1` over `t_xx`.
pub fn optimal_tensor(eta_a: f64, eta_b: f64) -> Result<CorrelationTensor> {
    check_bound(eta_a, eta_b)?;
    let t = eta_a * eta_b / 2.0;
    Ok(CorrelationTensor::no_signaling(eta_a, eta_b, t, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
}

/// `t_xx = t_yy = η_Aη_B`, every other entry zero.
///
/// This is the tensor realized by optimal qubit phase-covariant cloners. With it
/// `256·det ρ = (η_A² + η_B² − 1)²` and `e₃ ∝ 1 − η_A² − η_B²`, so the state is
/// positive on the whole disc.
pub fn saturating_tensor(eta_a: f64, eta_b: f64) -> Result<CorrelationTensor> {
    check_bound(eta_a, eta_b)?;
    let t = eta_a * eta_b;
    Ok(CorrelationTensor::no_signaling(eta_a, eta_b, t, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
}

/// `min_{t_xx} ineq1` with every other entry zero: `η_A² + η_B² − 1 − (η_Aη_B)²/2`.
pub fn min_ineq1_over_txx(eta_a: f64, eta_b: f64) -> f64 {
    let p = eta_a * eta_b;
    eta_a * eta_a + eta_b * eta_b - 1.0 - p * p / 2.0
}

/// `256·det ρ_AB(x̂)` for the tensor with only `t_xx = t_yy` nonzero.
pub fn reduced_det_scaled(eta_a: f64, eta_b: f64, t_xx: f64) -> f64 {
    let (a, b) = (eta_a * eta_a, eta_b * eta_b);
    (a - b) * (a - b) - 2.0 * (a + b) + 8.0 * eta_a * eta_b * t_xx - 4.0 * t_xx * t_xx + 1.0
}

/// Interval of `t_xx` on which `ineq1 ≤ 0`, other entries zero.
pub fn ineq1_interval(eta_a: f64, eta_b: f64) -> Option<(f64, f64)> {
    // 2t² − 2pt + (s − 1) ≤ 0
    let p = eta_a * eta_b;
    let s = eta_a * eta_a + eta_b * eta_b;
    let disc = 4.0 * p * p - 8.0 * (s - 1.0);
    (disc >= 0.0).then(|| ((2.0 * p - disc.sqrt()) / 4.0, (2.0 * p + disc.sqrt()) / 4.0))
}

/// Interval of `t_xx` on which `det ρ_AB(x̂) ≥ 0`, other entries zero.
pub fn det_interval(eta_a: f64, eta_b: f64) -> Option<(f64, f64)> {
    // −4t² + 8pt + c ≥ 0
    let p = eta_a * eta_b;
    let c = reduced_det_scaled(eta_a, eta_b, 0.0);
    let disc = 64.0 * p * p + 16.0 * c;
    (disc >= 0.0).then(|| ((8.0 * p - disc.sqrt()) / 8.0, (8.0 * p + disc.sqrt()) / 8.0))
}

/// True when no `t_xx` (other entries zero) satisfies both polynomial conditions.
pub fn chain_certifies_infeasible(eta_a: f64, eta_b: f64) -> bool {
    match (ineq1_interval(eta_a, eta_b), det_interval(eta_a, eta_b)) {
        (Some((a0, a1)), Some((b0, b1))) => a1 < b0 || b1 < a0,
        _ => true,
    }
}

/// Recovers `η_A`, `η_B` along `r̂` and `t_jk = tr(ρ σ_j⊗σ_k)`.
pub fn extract_tensor(rho_ab: &ComplexMatrix, r: &BlochVector) -> Result<CorrelationTensor> {
    if rho_ab.rows() != 4 || rho_ab.cols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho_ab.rows(),
        });
    }
    rho_ab.check_density(EXTRACT_TOL)?;
    let expect = |a: usize, b: usize| {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                let op = pauli_entry(a, j >> 1, i >> 1) * pauli_entry(b, j & 1, i & 1);
                acc += rho_ab[(i, j)] * op;
            }
        }
        acc.re
    };
    let mut t = [[0.0; 3]; 3];
    let (mut bloch_a, mut bloch_b) = ([0.0; 3], [0.0; 3]);
    for j in 0..3 {
        bloch_a[j] = expect(j + 1, 0);
        bloch_b[j] = expect(0, j + 1);
        for k in 0..3 {
            t[j][k] = expect(j + 1, k + 1);
        }
    }
    let dot = |v: [f64; 3]| v.iter().zip(r.0.iter()).map(|(a, b)| a * b).sum::<f64>();
    Ok(CorrelationTensor::new(dot(bloch_a), dot(bloch_b), t))
}

/// `m + shift·1` admits a Cholesky factorization (fast pre-screen for positivity).
fn cholesky_accepts(m: &[Complex64; 16], shift: f64) -> bool {
    let mut l = [Complex64::new(0.0, 0.0); 16];
    for j in 0..4 {
        let mut diag = m[5 * j].re + shift;
        for k in 0..j {
            diag -= l[4 * j + k].norm_sqr();
        }
        if diag <= 0.0 {
            return false;
        }
        let djj = diag.sqrt();
        l[5 * j] = Complex64::new(djj, 0.0);
        for i in (j + 1)..4 {
            let mut acc = m[4 * i + j];
            for k in 0..j {
                acc -= l[4 * i + k] * l[4 * j + k].conj();
            }
            l[4 * i + j] = acc / djj;
        }
    }
    true
}

fn feasible_min_eig(ct: &CorrelationTensor) -> Option<f64> {
    let arr = assemble_array(ct, &BlochVector::x());
    if !cholesky_accepts(&arr, 2.0 * PSD_TOL) {
        return None;
    }
    let m = ComplexMatrix::new(4, 4, arr.to_vec()).expect("4x4");
    let min_eig = hermitian_eigenvalues(&m).ok()?[0];
    (min_eig >= -PSD_TOL).then_some(min_eig)
}

/// Radical inverse of `index` in base `base`.
pub fn radical_inverse(mut index: usize, base: usize) -> f64 {
    let inv = 1.0 / base as f64;
    let mut acc = 0.0;
    let mut f = inv;
    while index > 0 {
        acc += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    acc
}

const HALTON_BASES: [usize; 7] = [2, 3, 5, 7, 11, 13, 17];

/// Point `index` (starting at 1) of the 7-dimensional Halton sequence.
pub fn halton7(index: usize) -> [f64; 7] {
    let mut p = [0.0; 7];
    for (slot, &b) in p.iter_mut().zip(HALTON_BASES.iter()) {
        *slot = radical_inverse(index, b);
    }
    p
}

/// Which candidate certified a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Certificate {
    OptimalTensor,
    SaturatingTensor,
    Perturbation,
}

/// A tensor passing the eigenvalue test at `(η_A, η_B)`, with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityWitness {
    pub tensor: CorrelationTensor,
    pub min_eig: f64,
    pub certificate: Certificate,
}

/// Searches for a no-signaling tensor making `ρ_AB(x̂)` positive.
///
/// Tries the optimal tensor, the saturating tensor, then [`PERTURBATION_POINTS`]
/// Halton perturbations of the saturating entries in a box of half-width
/// [`PERTURBATION_HALF_WIDTH`]. Deterministic.
pub fn certify_feasible(eta_a: f64, eta_b: f64) -> Option<FeasibilityWitness> {
    let p = eta_a * eta_b;
    let base = |t: f64| CorrelationTensor::no_signaling(eta_a, eta_b, t, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, certificate) in [(p / 2.0, Certificate::OptimalTensor), (p, Certificate::SaturatingTensor)] {
        let tensor = base(t);
        if let Some(min_eig) = feasible_min_eig(&tensor) {
            return Some(FeasibilityWitness {
                tensor,
                min_eig,
                certificate,
            });
        }
    }
    let w = 2.0 * PERTURBATION_HALF_WIDTH;
    for index in 1..=PERTURBATION_POINTS {
        let h = halton7(index);
        let d = |k: usize| (h[k] - 0.5) * w;
        let tensor = CorrelationTensor::no_signaling(eta_a, eta_b, p + d(0), d(1), d(2), d(3), d(4), d(5), d(6));
        if let Some(min_eig) = feasible_min_eig(&tensor) {
            return Some(FeasibilityWitness {
                tensor,
                min_eig,
                certificate: Certificate::Perturbation,
            });
        }
    }
    None
}

/// Outcome of [`max_quality_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxQualityReport {
    pub grid: usize,
    /// Largest `η_A² + η_B²` over certified grid points.
    pub max_quality: f64,
    pub argmax: (f64, f64),
    pub certified_points: usize,
    /// Points just beyond each row's certified segment, all rejected by the full search.
    pub boundary_points_checked: usize,
    pub certified_by_optimal_tensor: usize,
    pub certified_by_saturating_tensor: usize,
    pub certified_by_perturbation: usize,
}

/// Supremum of `η_A² + η_B²` over grid points of `[0,1]²` admitting a positive
/// no-signaling `ρ_AB(x̂)`.
///
/// Rows of fixed `η_A` are scanned upward in `η_B` until the first point that the
/// search of [`certify_feasible`] cannot certify; the feasible region is convex and
/// contains the axes, so the remainder of the row is skipped.
pub fn max_quality_search(grid: usize) -> Result<MaxQualityReport> {
    if grid < 100 {
        return Err(Error::InvalidArgument(format!("grid must be at least 100, got {grid}")));
    }
    let step = 1.0 / (grid - 1) as f64;
    let mut report = MaxQualityReport {
        grid,
        max_quality: f64::NEG_INFINITY,
        argmax: (0.0, 0.0),
        certified_points: 0,
        boundary_points_checked: 0,
        certified_by_optimal_tensor: 0,
        certified_by_saturating_tensor: 0,
        certified_by_perturbation: 0,
    };
    for i in 0..grid {
        let eta_a = i as f64 * step;
        for j in 0..grid {
            let eta_b = j as f64 * step;
            match certify_feasible(eta_a, eta_b) {
                Some(w) => {
                    report.certified_points += 1;
                    match w.certificate {
                        Certificate::OptimalTensor => report.certified_by_optimal_tensor += 1,
                        Certificate::SaturatingTensor => report.certified_by_saturating_tensor += 1,
                        Certificate::Perturbation => report.certified_by_perturbation += 1,
                    }
                    let s = eta_a * eta_a + eta_b * eta_b;
                    if s > report.max_quality {
                        report.max_quality = s;
                        report.argmax = (eta_a, eta_b);
                    }
                }
                None => {
                    report.boundary_points_checked += 1;
                    break;
                }
            }
        }
    }
    Ok(report)
}

/// Where [`inequality_crosscheck`] draws its tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SamplingRegion {
    /// Seven free entries uniform in `[−1, 1]`; almost every sample is infeasible.
    PhysicalBox,
    /// Entries uniform within [`PERTURBATION_HALF_WIDTH`] of the saturating tensor.
    NearSaturating,
}

/// Agreement of the polynomial conditions with the eigenvalue test on random tensors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrosscheckReport {
    pub region: SamplingRegion,
    pub samples: usize,
    pub seed: u64,
    pub feasible: usize,
    /// `ineq1 > 0` on a positive state; a sign error in the polynomial would show here.
    pub necessary_violations: usize,
    /// Both polynomial conditions hold but the state is not positive, or vice versa.
    pub pair_mismatches: usize,
    /// Disagreements of `ineq1 ≤ 0` alone with the eigenvalue test.
    pub ineq1_alone_mismatches: usize,
    /// Pair mismatches whose state has two negative eigenvalues.
    pub mismatches_with_two_negative: usize,
}

/// Samples no-signaling tensors with `η_A, η_B` uniform in `[0, 1]` and compares the
/// polynomial conditions with the spectrum of `ρ_AB(x̂)`.
pub fn inequality_crosscheck(region: SamplingRegion, samples: usize, seed: u64) -> Result<CrosscheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CrosscheckReport {
        region,
        samples,
        seed,
        feasible: 0,
        necessary_violations: 0,
        pair_mismatches: 0,
        ineq1_alone_mismatches: 0,
        mismatches_with_two_negative: 0,
    };
    for _ in 0..samples {
        let eta_a = rng.random::<f64>();
        let eta_b = rng.random::<f64>();
        let mut e = [0.0; 7];
        for v in &mut e {
            *v = match region {
                SamplingRegion::PhysicalBox => rng.random_range(-1.0..=1.0),
                SamplingRegion::NearSaturating => {
                    rng.random_range(-PERTURBATION_HALF_WIDTH..=PERTURBATION_HALF_WIDTH)
                }
            };
        }
        if region == SamplingRegion::NearSaturating {
            e[0] += eta_a * eta_b;
        }
        let ct = CorrelationTensor::no_signaling(eta_a, eta_b, e[0], e[1], e[2], e[3], e[4], e[5], e[6]);
        let res = psd_residuals(&ct)?;
        let feasible = res.feasible();
        report.feasible += feasible as usize;
        if feasible && res.ineq1 > PSD_TOL {
            report.necessary_violations += 1;
        }
        if feasible != (res.ineq1 <= PSD_TOL) {
            report.ineq1_alone_mismatches += 1;
        }
        if feasible != res.polynomial_feasible() {
            report.pair_mismatches += 1;
            let eig = hermitian_eigenvalues(&assemble(&ct, &BlochVector::x()))?;
            if eig[1] < -PSD_TOL {
                report.mismatches_with_two_negative += 1;
            }
        }
    }
    Ok(report)
}

/// One point of the empirical orbit frontier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitFrontierPoint {
    pub nu: f64,
    pub xi: f64,
    pub eta_a: f64,
    pub eta_b: f64,
}

/// Empirical `(η_A, η_B)` frontier of qubit phase-covariant machines on the orbit at
/// polar angle `theta`, with `η = 2F − 1` measured on the simulated clones.
///
/// Machines `(ν, ξ)` range over a `grid × grid` lattice of the feasible quarter disc;
/// `η_A` is binned into `grid` cells and the best `η_B` of each cell is kept.
pub fn orbit_frontier_scan(theta: f64, grid: usize) -> Result<Vec<OrbitFrontierPoint>> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("grid must be at least 2, got {grid}")));
    }
    let input = orbit_to_input(&OrbitState::new(theta, 0.0)?);
    let step = 1.0 / (grid - 1) as f64;
    let mut best: Vec<Option<OrbitFrontierPoint>> = vec![None; grid];
    for i in 0..grid {
        for j in 0..grid {
            let (nu, xi) = (i as f64 * step, j as f64 * step);
            if nu * nu + xi * xi > 1.0 {
                continue;
            }
            let q = apply_marginals(&ClonerParams::phase_covariant(2, nu, xi)?, &input)?;
            let (eta_a, eta_b) = (2.0 * q.f_a - 1.0, 2.0 * q.f_b - 1.0);
            let bin = ((eta_a.clamp(0.0, 1.0)) * (grid - 1) as f64).round() as usize;
            let cand = OrbitFrontierPoint { nu, xi, eta_a, eta_b };
            if best[bin].is_none_or(|b| eta_b > b.eta_b) {
                best[bin] = Some(cand);
            }
        }
    }
    let mut out: Vec<_> = best.into_iter().flatten().collect();
    out.sort_by(|a, b| a.eta_a.total_cmp(&b.eta_a));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{kron, paulis};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn assemble_maximally_mixed() {
        let m = assemble(&CorrelationTensor::zero(), &BlochVector::x());
        assert!(m.max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-15);
    }

    #[test]
    fn assemble_product_plus() {
        let ct = CorrelationTensor::new(1.0, 0.0, [[0.0; 3]; 3]);
        let plus = ComplexMatrix::from_fn(2, 2, |_, _| Complex64::new(0.5, 0.0));
        let expected = kron(&plus, &ComplexMatrix::identity(2).scale_real(0.5));
        assert!(assemble(&ct, &BlochVector::x()).max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn assemble_matches_kron_expansion() {
        let s = paulis();
        let ct = CorrelationTensor::new(0.3, 0.2, [[0.1, 0.2, -0.3], [0.05, -0.1, 0.2], [0.3, 0.0, 0.4]]);
        let r = BlochVector::from_angles(1.1, 0.4);
        let id = ComplexMatrix::identity(2);
        let rs = |rv: [f64; 3]| {
            let mut acc = ComplexMatrix::zeros(2, 2);
            for k in 0..3 {
                acc = &acc + &s[k].scale_real(rv[k]);
            }
            acc
        };
        let mut m = &ComplexMatrix::identity(4)
            + &(&kron(&rs(r.components()), &id).scale_real(ct.eta_a)
                + &kron(&id, &rs(r.components())).scale_real(ct.eta_b));
        for j in 0..3 {
            for k in 0..3 {
                m = &m + &kron(&s[j], &s[k]).scale_real(ct.t[j][k]);
            }
        }
        assert!(assemble(&ct, &r).max_abs_diff(&m.scale_real(0.25)) < 1e-15);
    }

    #[test]
    fn rotation_special_angles() {
        let t = [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]];
        let ct = CorrelationTensor::new(0.1, 0.2, t);
        assert!(rotate_tensor(&ct, 0.0).max_abs_diff(&ct) < 1e-15);
        let pi = rotate_tensor(&ct, PI).t;
        let flipped = [[1.0, 2.0, -3.0], [4.0, 5.0, -6.0], [-7.0, -8.0, 9.0]];
        for j in 0..3 {
            for k in 0..3 {
                assert!((pi[j][k] - flipped[j][k]).abs() < 1e-14);
            }
        }
        let h = rotate_tensor(&ct, FRAC_PI_2).t;
        assert!((h[X][X] - t[Y][Y]).abs() < 1e-14);
        assert!((h[X][Y] + t[Y][X]).abs() < 1e-14);
        assert!((h[Y][Y] - t[X][X]).abs() < 1e-14);
        assert!((h[X][Z] + t[Y][Z]).abs() < 1e-14);
        assert!((h[Z][Y] - t[Z][X]).abs() < 1e-14);
        assert!((h[Z][Z] - t[Z][Z]).abs() < 1e-14);
    }

    #[test]
    fn no_signaling_residual_examples() {
        assert!(no_signaling_residual(&CorrelationTensor::zero()) < 1e-15);
        let ns = CorrelationTensor::no_signaling(0.3, 0.4, 0.3, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(no_signaling_residual(&ns) < 1e-12);
        let mut t = [[0.0; 3]; 3];
        t[X][X] = 0.3;
        t[Y][Y] = 0.1;
        let r = no_signaling_residual(&CorrelationTensor::new(0.0, 0.0, t));
        assert!((r - 0.2).abs() < 1e-14, "{r}");
    }

    #[test]
    fn psd_residuals_maximally_mixed() {
        let r = psd_residuals(&CorrelationTensor::zero()).unwrap();
        assert!((r.ineq1 + 1.0).abs() < 1e-15);
        assert!((r.det4 - 1.0 / 256.0).abs() < 1e-15);
        assert!((r.min_eig - 0.25).abs() < 1e-14);
    }

    #[test]
    fn psd_residuals_rejects_signaling_tensor() {
        let mut t = [[0.0; 3]; 3];
        t[X][X] = 0.3;
        assert!(matches!(
            psd_residuals(&CorrelationTensor::new(0.0, 0.0, t)),
            Err(Error::NoSignalingViolated { .. })
        ));
    }

    #[test]
    fn optimal_tensor_at_symmetric_point_is_not_positive() {
        let ct = optimal_tensor(FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap();
        assert!((ct.t[X][X] - 0.25).abs() < 1e-15);
        let r = psd_residuals(&ct).unwrap();
        assert!((r.min_eig + 0.046_536).abs() < 1e-5, "{r:?}");
        assert!((r.det4 + 1.0 / 1024.0).abs() < 1e-15);
    }

    #[test]
    fn saturating_tensor_on_circle() {
        for k in 0..=20 {
            let a = (k as f64 / 20.0 * FRAC_PI_2).cos();
            let b = (k as f64 / 20.0 * FRAC_PI_2).sin();
            let r = psd_residuals(&saturating_tensor(a, b).unwrap()).unwrap();
            assert!(r.min_eig >= -1e-12 && r.det4.abs() < 1e-15, "{k}: {r:?}");
        }
        assert!(saturating_tensor(0.8, 0.8).is_err());
        assert!(optimal_tensor(1.0, 0.0).unwrap().t == [[0.0; 3]; 3]);
    }

    #[test]
    fn reduced_det_matches_numeric() {
        for &(a, b, t) in &[(0.3, 0.5, 0.1), (0.7, 0.6, 0.4), (0.9, 0.1, -0.2)] {
            let ct = CorrelationTensor::no_signaling(a, b, t, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            let det = assemble(&ct, &BlochVector::x()).determinant().unwrap().re;
            assert!((256.0 * det - reduced_det_scaled(a, b, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn chain_at_symmetric_point_beyond_bound() {
        let e = (0.525f64).sqrt();
        assert!(min_ineq1_over_txx(e, e) < 0.0);
        let (i0, i1) = ineq1_interval(e, e).unwrap();
        let (d0, d1) = det_interval(e, e).unwrap();
        assert!((d0 - 0.5).abs() < 1e-12 && (d1 - 0.55).abs() < 1e-12);
        assert!(i1 < d0 && i0 > 0.05);
        assert!(chain_certifies_infeasible(e, e));
        assert!(!chain_certifies_infeasible(0.6, 0.8));
    }

    #[test]
    fn extract_round_trip() {
        let ct = CorrelationTensor::new(0.2, 0.1, [[0.1, 0.05, 0.0], [-0.05, 0.1, 0.02], [0.0, 0.01, -0.1]]);
        let r = BlochVector::from_angles(0.7, 2.0);
        let back = extract_tensor(&assemble(&ct, &r), &r).unwrap();
        assert!(back.max_abs_diff(&ct) < 1e-15);
        assert!(extract_tensor(&ComplexMatrix::identity(4), &r).is_err());
    }

    #[test]
    fn certify_examples() {
        assert!(certify_feasible(0.6, 0.8).is_some());
        assert!(certify_feasible(0.8, 0.8).is_none());
        let w = certify_feasible(FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap();
        assert_eq!(w.certificate, Certificate::SaturatingTensor);
    }

    #[test]
    fn halton_first_points() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
        assert_eq!(halton7(1)[6], 1.0 / 17.0);
    }

    #[test]
    fn bloch_vector_validation() {
        assert!(BlochVector::new([1.0, 1.0, 0.0]).is_err());
        let v = BlochVector::x().rotate_z(FRAC_PI_2).components();
        assert!(v[0].abs() < 1e-16 && (v[1] - 1.0).abs() < 1e-16);
    }
}
