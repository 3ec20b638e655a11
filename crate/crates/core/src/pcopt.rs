//! Shrinking factors of phase-covariant machines and the optimal asymmetric frontier.
//!
//! For equatorial inputs the state-dependent part of each clone collapses to
//! white noise, so a phase-covariant machine `(ν, ξ)` with `μ` fixed by
//! normalization yields isotropic clones with
//!
//! ```text
//! η_A = (d−2)ν² + 2μν,   η_B = (d−2)ξ² + 2μξ,   μ = √(1 − (d−1)(ν² + ξ²)).
//! ```
//!
//! The optimal machine maximizes `η_B` at fixed `η_A`. Fixing `η_A` and `ν`
//! determines `μ = (η_A − (d−2)ν²)/(2ν)` and then `ξ² = (1 − μ²)/(d−1) − ν²`,
//! which leaves a one-dimensional search over `ν`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Slack on `ξ² ≥ 0` and on feasibility of `(ν, ξ)`.
pub const FEASIBILITY_SLACK: f64 = 1e-12;
/// Number of points in the bracketing grid of [`optimize_eta_b`].
pub const BRACKET_GRID: usize = 1000;
/// Bracket width at which golden-section refinement stops.
pub const GOLDEN_TOL: f64 = 1e-12;

/// A point of the phase-covariant quality plane together with its amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PcPoint {
    pub d: usize,
    pub nu: f64,
    pub xi: f64,
    pub eta_a: f64,
    pub eta_b: f64,
}

impl PcPoint {
    pub fn mu(&self) -> f64 {
        (1.0 - (self.d as f64 - 1.0) * (self.nu * self.nu + self.xi * self.xi)).max(0.0).sqrt()
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// `(η_A, η_B)` of the phase-covariant machine `(ν, ξ)`.
pub fn pc_shrinking(d: usize, nu: f64, xi: f64) -> Result<(f64, f64)> {
    check_dim(d)?;
    let dm1 = d as f64 - 1.0;
    if nu < 0.0 || xi < 0.0 || !nu.is_finite() || !xi.is_finite() {
        return Err(Error::Infeasible(format!("nu={nu}, xi={xi} must be non-negative")));
    }
    let mu_sq = 1.0 - dm1 * (nu * nu + xi * xi);
    if mu_sq < -FEASIBILITY_SLACK {
        return Err(Error::Infeasible(format!("nu² + xi² exceeds 1/(d-1) by {}", -mu_sq / dm1)));
    }
    let mu = mu_sq.max(0.0).sqrt();
    let dm2 = d as f64 - 2.0;
    Ok((dm2 * nu * nu + 2.0 * mu * nu, dm2 * xi * xi + 2.0 * mu * xi))
}

/// Implied `μ` and `ξ²` for a requested `η_A` at a given `ν`.
fn implied_mu_xi_sq(d: usize, eta_a: f64, nu: f64) -> (f64, f64) {
    let dm2 = d as f64 - 2.0;
    let mu = (eta_a - dm2 * nu * nu) / (2.0 * nu);
    let xi_sq = (1.0 - mu * mu) / (d as f64 - 1.0) - nu * nu;
    (mu, xi_sq)
}

/// How far `ν` is from admitting a machine with the requested `η_A`; zero when feasible.
fn violation(d: usize, eta_a: f64, nu: f64) -> f64 {
    if nu <= 0.0 {
        return f64::INFINITY;
    }
    let (mu, xi_sq) = implied_mu_xi_sq(d, eta_a, nu);
    let mut v: f64 = 0.0;
    if mu < 0.0 {
        v += -mu;
    }
    if mu > 1.0 {
        v += mu - 1.0;
    }
    if xi_sq < -FEASIBILITY_SLACK {
        v += -xi_sq;
    }
    v
}

/// `η_B` of the machine that reaches `η_A` with the given `ν`.
pub fn eta_b_given(d: usize, eta_a: f64, nu: f64) -> Result<f64> {
    check_dim(d)?;
    if violation(d, eta_a, nu) > 0.0 {
        return Err(Error::Infeasible(format!("nu={nu} cannot reach eta_a={eta_a} in d={d}")));
    }
    let (mu, xi_sq) = implied_mu_xi_sq(d, eta_a, nu);
    let xi_sq = xi_sq.max(0.0);
    Ok((d as f64 - 2.0) * xi_sq + 2.0 * xi_sq.sqrt() * mu)
}

/// Objective for the bracketing search: `η_B` where feasible, a negative penalty
/// that grows with the violation elsewhere. Inside the slack window (`ξ² < 0`) it
/// returns `ξ²` itself, so degenerate frontiers resolve to the largest `ξ²`.
fn penalized(d: usize, eta_a: f64, nu: f64) -> f64 {
    let v = violation(d, eta_a, nu);
    if v > 0.0 {
        return -1.0 - v;
    }
    let (_, xi_sq) = implied_mu_xi_sq(d, eta_a, nu);
    if xi_sq < 0.0 {
        xi_sq
    } else {
        eta_b_given(d, eta_a, nu).unwrap_or(-1.0)
    }
}

/// Golden-section maximization of `f` on `[lo, hi]`, down to a bracket of `tol`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // ~ 75 iterations shrink a unit bracket below 1e-15
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Optimal asymmetric phase-covariant machine at fixed `η_A`.
///
/// Scans [`BRACKET_GRID`] values of `ν ∈ (0, 1/√(d−1)]`, takes the best (ties go to
/// the smallest `ν`), then refines inside the neighbouring grid cells by golden
/// section. The returned point maximizes `η_B`.
pub fn optimize_eta_b(d: usize, eta_a: f64) -> Result<PcPoint> {
    check_dim(d)?;
    if !(eta_a > 0.0 && eta_a <= 1.0) {
        return Err(Error::InvalidArgument(format!("eta_a {eta_a} outside (0, 1]")));
    }
    let nu_max = 1.0 / (d as f64 - 1.0).sqrt();
    let step = nu_max / BRACKET_GRID as f64;
    let grid = |k: usize| if k == BRACKET_GRID { nu_max } else { k as f64 * step };

    let (mut best_k, mut best_val) = (1, f64::NEG_INFINITY);
    for k in 1..=BRACKET_GRID {
        let val = penalized(d, eta_a, grid(k));
        if val > best_val {
            best_k = k;
            best_val = val;
        }
    }

    let lo = grid(best_k - 1).max(f64::MIN_POSITIVE);
    let hi = grid((best_k + 1).min(BRACKET_GRID));
    let (nu_gs, val_gs) = golden_section_max(|nu| penalized(d, eta_a, nu), lo, hi, GOLDEN_TOL);
    let nu = if val_gs >= best_val { nu_gs } else { grid(best_k) };

    if violation(d, eta_a, nu) > 0.0 {
        return Err(Error::Infeasible(format!("no phase-covariant machine reaches eta_a={eta_a} in d={d}")));
    }
    let (_, xi_sq) = implied_mu_xi_sq(d, eta_a, nu);
    Ok(PcPoint {
        d,
        nu,
        xi: xi_sq.max(0.0).sqrt(),
        eta_a,
        eta_b: eta_b_given(d, eta_a, nu)?,
    })
}

/// Frontier point where `η_A = η_B`, located by bisection on [`optimize_eta_b`].
pub fn symmetric_frontier_point(d: usize) -> Result<PcPoint> {
    check_dim(d)?;
    let gap = |eta: f64| optimize_eta_b(d, eta).map(|p| p.eta_b - eta);
    let (mut lo, mut hi) = (1e-6, 1.0);
    if gap(lo)? <= 0.0 || gap(hi)? >= 0.0 {
        return Err(Error::Infeasible(format!("frontier does not cross the diagonal in d={d}")));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    optimize_eta_b(d, 0.5 * (lo + hi))
}

/// `ν` of the optimal symmetric machine:
/// `½ √[((d²+4d−4) + (d−2)√(d²+4d−4)) / (d³+3d²−8d+4)]`.
pub fn symmetric_nu_opt(d: usize) -> f64 {
    let d = d as f64;
    let q = d * d + 4.0 * d - 4.0;
    0.5 * ((q + (d - 2.0) * q.sqrt()) / (d * d * d + 3.0 * d * d - 8.0 * d + 4.0)).sqrt()
}

/// Fidelity of the optimal symmetric phase-covariant machine, `1/d + (d−2+√(d²+4d−4))/(4d)`.
pub fn symmetric_fidelity(d: usize) -> f64 {
    let d = d as f64;
    1.0 / d + (d - 2.0 + (d * d + 4.0 * d - 4.0).sqrt()) / (4.0 * d)
}

/// Closed-form qubit frontier: `ν = η_A/√2`, `η_B = √(1 − η_A²)`, `ξ = η_B/√2`.
pub fn qubit_optimal(eta_a: f64) -> Result<PcPoint> {
    if !(0.0..=1.0).contains(&eta_a) {
        return Err(Error::InvalidArgument(format!("eta_a {eta_a} outside [0, 1]")));
    }
    let eta_b = (1.0 - eta_a * eta_a).max(0.0).sqrt();
    Ok(PcPoint {
        d: 2,
        nu: eta_a * std::f64::consts::FRAC_1_SQRT_2,
        xi: eta_b * std::f64::consts::FRAC_1_SQRT_2,
        eta_a,
        eta_b,
    })
}
