//! Entanglement of cloner outputs: partial-transpose spectra, negativity,
//! concurrence and the three-qubit tangle.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::cloner::{apply, equatorial_state, orbit_to_input, output_state, ClonerParams, OrbitState};
use crate::error::{Error, Result};
use crate::qlinalg::{
    hermitian_eigenvalues, hermitian_eigh, norm_sq, partial_transpose, reduced_from_pure, ComplexMatrix,
    SubsystemShape, DENSITY_TOL, PSD_TOL,
};

/// Tangle above which a state is classed as GHZ-type.
pub const TANGLE_TOL: f64 = 1e-9;
/// Eigenvalues of `ρ` below this fraction of the largest are dropped in [`concurrence`].
const RANK_CUTOFF: f64 = 1e-13;

/// Partial-transpose spectrum of a two-qubit state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptReport {
    pub eigenvalues: [f64; 4],
    pub negativity: f64,
    pub separable: bool,
}

impl PptReport {
    pub fn from_eigenvalues(eigenvalues: [f64; 4]) -> Self {
        let negativity = 2.0 * (-eigenvalues[0]).max(0.0);
        Self {
            eigenvalues,
            negativity,
            separable: negativity <= PSD_TOL,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

fn sorted4(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(f64::total_cmp);
    v
}

/// PPT report of a two-qubit state, transposing qubit `A`.
pub fn ppt_report(rho: &ComplexMatrix) -> Result<PptReport> {
    let pt = partial_transpose(rho, &SubsystemShape::qubits(2), 0)?;
    let vals = hermitian_eigenvalues(&pt)?;
    Ok(PptReport::from_eigenvalues([vals[0], vals[1], vals[2], vals[3]]))
}

fn check_qubit_params(nu: f64, xi: f64) -> Result<()> {
    if !(nu >= 0.0 && xi >= 0.0) || nu * nu + xi * xi > 1.0 + 1e-12 {
        return Err(Error::Infeasible(format!("qubit machine needs nu, xi >= 0, nu² + xi² <= 1; got ({nu}, {xi})")));
    }
    Ok(())
}

/// Closed-form spectrum of `ρ_AB^{T_A}` for the qubit machine `(ν, ξ)` on equatorial
/// inputs, ascending:
/// `¼(1 + 2νξ ± √(1 + 12νξ − 16ν³ξ + 4ν²ξ² − 16νξ³))` and
/// `¼(1 − 2νξ ± √(1 − 12νξ + 16ν³ξ + 4ν²ξ² + 16νξ³))`.
///
/// The spectrum does not depend on the input phase.
pub fn clone_ppt_spectrum(nu: f64, xi: f64) -> Result<[f64; 4]> {
    check_qubit_params(nu, xi)?;
    let p = nu * xi;
    let cubic = 16.0 * p * (nu * nu + xi * xi);
    let r1 = (1.0 + 12.0 * p - cubic + 4.0 * p * p).max(0.0).sqrt();
    let r2 = (1.0 - 12.0 * p + cubic + 4.0 * p * p).max(0.0).sqrt();
    Ok(sorted4([
        (1.0 + 2.0 * p - r1) / 4.0,
        (1.0 + 2.0 * p + r1) / 4.0,
        (1.0 - 2.0 * p - r2) / 4.0,
        (1.0 - 2.0 * p + r2) / 4.0,
    ]))
}

/// Numeric spectrum of `ρ_AB^{T_A}` for the qubit machine `(ν, ξ)` fed `(|0⟩ + e^{iφ}|1⟩)/√2`.
pub fn simulated_ppt_spectrum(nu: f64, xi: f64, phi: f64) -> Result<[f64; 4]> {
    check_qubit_params(nu, xi)?;
    let p = ClonerParams::phase_covariant(2, nu, xi)?;
    let out = apply(&p, &equatorial_state(2, &[0.0, phi])?)?;
    Ok(ppt_report(&out.rho_ab)?.eigenvalues)
}

/// Spectrum for the optimal family `ν = η_A/√2`, `ξ = √(1 − η_A²)/√2`:
/// `{0, 0, (1 ∓ √(η_A²(1 − η_A²)))/2}`.
pub fn optimal_ppt_spectrum(eta_a: f64) -> Result<[f64; 4]> {
    if !(0.0..=1.0).contains(&eta_a) {
        return Err(Error::InvalidArgument(format!("eta_a {eta_a} outside [0, 1]")));
    }
    let g = (eta_a * eta_a * (1.0 - eta_a * eta_a)).max(0.0).sqrt();
    Ok([0.0, 0.0, (1.0 - g) / 2.0, (1.0 + g) / 2.0])
}

/// `2·max(0, −λ_min)` of the partial transpose on `subsystem`.
pub fn negativity(rho: &ComplexMatrix, shape: &SubsystemShape, subsystem: usize) -> Result<f64> {
    rho.check_density(1e-10)?;
    let pt = partial_transpose(rho, shape, subsystem)?;
    Ok(2.0 * (-hermitian_eigenvalues(&pt)?[0]).max(0.0))
}

fn check_two_qubit_density(rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.rows(),
        });
    }
    rho.check_density(1e-10)
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
///
/// The `λ_i` are the singular values of `T = Wᵀ(σ_y⊗σ_y)W`, where `ρ = WW†` is built
/// from the eigen-decomposition; they coincide with the square roots of the spectrum
/// of `ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y)` but avoid square roots of round-off.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    check_two_qubit_density(rho)?;
    let (vals, vecs) = hermitian_eigh(rho)?;
    let top = vals[3].max(0.0);
    let kept: Vec<usize> = (0..4).filter(|&k| vals[k] > RANK_CUTOFF * top).collect();
    if kept.is_empty() {
        return Ok(0.0);
    }
    let w = DMatrix::from_fn(4, kept.len(), |i, c| vecs[(i, kept[c])] * vals[kept[c]].sqrt());
    // σ_y⊗σ_y is anti-diagonal with signs (−1, 1, 1, −1)
    let yw = DMatrix::from_fn(4, kept.len(), |i, c| {
        let sign = if i == 0 || i == 3 { -1.0 } else { 1.0 };
        w[(3 - i, c)] * sign
    });
    let t = w.transpose() * yw;
    let mut s: Vec<f64> = t.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = s.iter().skip(1).sum();
    Ok((s[0] - rest).max(0.0))
}

/// Three-qubit entanglement class by tangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TangleClass {
    #[serde(rename = "zero-tangle")]
    ZeroTangle,
    #[serde(rename = "GHZ-type")]
    GhzType,
}

impl fmt::Display for TangleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TangleClass::ZeroTangle => "zero-tangle",
            TangleClass::GhzType => "GHZ-type",
        })
    }
}

/// Two- and three-party entanglement of a pure three-qubit state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangleReport {
    /// `τ_ABX = τ_A(BX) − C²_AB − C²_AX`, clamped to `[0, 1]`.
    pub tau_abx: f64,
    /// `τ_A(BX) = 4 det ρ_A`.
    pub tau_a_bc: f64,
    pub c2_ab: f64,
    pub c2_ax: f64,
    pub class: TangleClass,
}

fn check_pure3(psi: &[Complex64]) -> Result<()> {
    if psi.len() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: psi.len(),
        });
    }
    let n = norm_sq(psi);
    if (n - 1.0).abs() > DENSITY_TOL {
        return Err(Error::NotNormalized { norm_sq: n });
    }
    Ok(())
}

/// Tangle of a pure three-qubit state from the pairwise concurrences.
pub fn tangle_pure3(psi: &[Complex64]) -> Result<TangleReport> {
    check_pure3(psi)?;
    let shape = SubsystemShape::qubits(3);
    let rho_a = reduced_from_pure(psi, &shape, &[0])?;
    let tau_a_bc = 4.0 * rho_a.determinant()?.re;
    let c_ab = concurrence(&reduced_from_pure(psi, &shape, &[0, 1])?)?;
    let c_ax = concurrence(&reduced_from_pure(psi, &shape, &[0, 2])?)?;
    let (c2_ab, c2_ax) = (c_ab * c_ab, c_ax * c_ax);
    let tau_abx = (tau_a_bc - c2_ab - c2_ax).clamp(0.0, 1.0);
    Ok(TangleReport {
        tau_abx,
        tau_a_bc,
        c2_ab,
        c2_ax,
        class: if tau_abx > TANGLE_TOL {
            TangleClass::GhzType
        } else {
            TangleClass::ZeroTangle
        },
    })
}

/// `4|Det a|` with `Det` the Cayley hyperdeterminant of the amplitudes `a_ijk`.
pub fn tangle_hyperdeterminant(psi: &[Complex64]) -> Result<f64> {
    check_pure3(psi)?;
    let a = |i: usize, j: usize, k: usize| psi[4 * i + 2 * j + k];
    let d1 = a(0, 0, 0) * a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 1)
        + a(0, 0, 1) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 0)
        + a(0, 1, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 0, 1)
        + a(1, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(0, 1, 1);
    let d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1)
        + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1) + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    Ok(4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm())
}

/// `C²_AB + C²_AX + τ_ABX − 4 det ρ_A`, with `τ_ABX` from the hyperdeterminant.
pub fn ckw_residual(psi: &[Complex64]) -> Result<f64> {
    let r = tangle_pure3(psi)?;
    Ok(r.c2_ab + r.c2_ax + tangle_hyperdeterminant(psi)? - r.tau_a_bc)
}

/// `4 sin²θ ν²(½ − ν²)`, the tangle along the optimal qubit family `μ² = ν² + ξ² = ½`.
pub fn tangle_closed_form(nu: f64, theta: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_1_SQRT_2 + 1e-15).contains(&nu) {
        return Err(Error::InvalidArgument(format!("nu {nu} outside [0, 1/√2]")));
    }
    let s = theta.sin();
    Ok(4.0 * s * s * nu * nu * (0.5 - nu * nu))
}

/// `sin²θ |μ⁴ + ν⁴ + ξ⁴ − 2(μ²ν² + μ²ξ² + ν²ξ²)|` for any qubit machine.
pub fn tangle_general(params: &ClonerParams, theta: f64) -> Result<f64> {
    if params.d() != 2 {
        return Err(Error::InvalidParams(format!("tangle needs qubits, got d={}", params.d())));
    }
    let (m, n, x) = (params.mu().powi(2), params.nu().powi(2), params.xi().powi(2));
    let s = theta.sin();
    Ok(s * s * (m * m + n * n + x * x - 2.0 * (m * n + m * x + n * x)).abs())
}

/// Tripartite output `|ψ⟩_ABX` of a qubit machine on the orbit state `(θ, φ)`.
pub fn qubit_output(params: &ClonerParams, theta: f64, phi: f64) -> Result<Vec<Complex64>> {
    output_state(params, &orbit_to_input(&OrbitState::new(theta, phi)?))
}

/// Summary of a `(ν, ξ)` separability scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparabilityScan {
    pub grid: usize,
    pub band: f64,
    pub points: usize,
    pub separable_points: usize,
    /// PPT points farther than `band` from both the optimal circle and the axes.
    pub separable_outside_band: usize,
    /// Largest minimum PPT eigenvalue among points outside the band.
    pub worst_outside_min_eig: f64,
    pub worst_outside_at: (f64, f64),
}

/// Simulates every feasible machine on a `grid × grid` lattice of `[0, 1]²` with
/// `ν² + ξ² ≤ 1`, and locates the PPT outputs relative to `ν² + ξ² = ½` and `νξ = 0`.
pub fn separability_scan(grid: usize, band: f64) -> Result<SeparabilityScan> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("grid must be at least 2, got {grid}")));
    }
    let step = 1.0 / (grid - 1) as f64;
    let mut scan = SeparabilityScan {
        grid,
        band,
        points: 0,
        separable_points: 0,
        separable_outside_band: 0,
        worst_outside_min_eig: f64::NEG_INFINITY,
        worst_outside_at: (f64::NAN, f64::NAN),
    };
    for i in 0..grid {
        for j in 0..grid {
            let (nu, xi) = (i as f64 * step, j as f64 * step);
            if nu * nu + xi * xi > 1.0 {
                continue;
            }
            scan.points += 1;
            let min_eig = simulated_ppt_spectrum(nu, xi, 0.0)?[0];
            let separable = min_eig >= -PSD_TOL;
            scan.separable_points += separable as usize;
            let dist = ((nu * nu + xi * xi).sqrt() - std::f64::consts::FRAC_1_SQRT_2).abs().min(nu.min(xi));
            if dist > band {
                scan.separable_outside_band += separable as usize;
                if min_eig > scan.worst_outside_min_eig {
                    scan.worst_outside_min_eig = min_eig;
                    scan.worst_outside_at = (nu, xi);
                }
            }
        }
    }
    Ok(scan)
}
