//! Discrete spectrum: zeros of s11 on the upper unit semicircle and their
//! norming constants.

use super::jost::JostSolver;
use crate::error::{convergence, domain};
use crate::linalg::ONE;
use crate::{Result, C64};
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSettings {
    /// Number of scan nodes on the arc.
    pub arc_nodes: usize,
    /// Arc points closer than this to ±1 are skipped.
    pub exclusion: f64,
    /// Local minima of |s11| below this value start a Newton polish.
    pub threshold: f64,
    pub cauchy_radius: f64,
    pub cauchy_nodes: usize,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        SpectrumSettings {
            arc_nodes: 2048,
            exclusion: 0.02,
            threshold: 1e-2,
            cauchy_radius: 1e-3,
            cauchy_nodes: 64,
            newton_tol: 1e-14,
            max_newton: 60,
        }
    }
}

/// A zero z_j of s11 with its norming constant c_j = b_j / s11'(z_j), where
/// ψ₁⁻(z_j) = b_j ψ₂⁺(z_j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteEigenvalue {
    pub z: C64,
    pub norming: C64,
    pub b: C64,
    pub s11_prime: C64,
    /// |S11(z_j)| after polishing.
    pub residual: f64,
}

/// f'(z0) from the trapezoidal rule on a circle of radius ρ.
pub fn cauchy_derivative(mut f: impl FnMut(C64) -> Result<C64>, z0: C64, radius: f64, nodes: usize) -> Result<C64> {
    if nodes < 4 || !(radius > 0.0) {
        return Err(domain("Cauchy derivative needs ≥ 4 nodes and a positive radius"));
    }
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..nodes {
        let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
        acc += f(z0 + e * radius)? * e.conj();
    }
    Ok(acc / (nodes as f64 * radius))
}

/// Scan angles on the arc, skipping the exclusion neighbourhoods of ±1.
pub fn arc_angles(settings: &SpectrumSettings) -> Vec<f64> {
    let lo = 2.0 * (0.5 * settings.exclusion).asin();
    let hi = PI - lo;
    let n = settings.arc_nodes.max(3);
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Polish the local minima of a precomputed scan |s11(e^{iψ_k})|.
pub fn polish_from_scan(
    solver: &JostSolver,
    angles: &[f64],
    magnitudes: &[f64],
    settings: &SpectrumSettings,
) -> Result<Vec<DiscreteEigenvalue>> {
    if angles.len() != magnitudes.len() || angles.len() < 3 {
        return Err(domain("scan angles and magnitudes must match"));
    }
    let mut found: Vec<DiscreteEigenvalue> = Vec::new();
    for k in 1..angles.len() - 1 {
        let m = magnitudes[k];
        if !(m < settings.threshold && m <= magnitudes[k - 1] && m <= magnitudes[k + 1]) {
            continue;
        }
        let ev = polish(solver, C64::from_polar(1.0, angles[k]), settings)?;
        if !found.iter().any(|e| (e.z - ev.z).norm() < 1e-8) {
            found.push(ev);
        }
    }
    found.sort_by(|a, b| a.z.arg().partial_cmp(&b.z.arg()).unwrap());
    Ok(found)
}

/// Scan the arc and polish every local minimum of |s11| below threshold.
pub fn discrete_spectrum(solver: &JostSolver, settings: &SpectrumSettings) -> Result<Vec<DiscreteEigenvalue>> {
    let angles = arc_angles(settings);
    let mut mags = Vec::with_capacity(angles.len());
    for &a in &angles {
        mags.push(solver.s11(C64::from_polar(1.0, a))?.norm());
    }
    polish_from_scan(solver, &angles, &mags, settings)
}

/// Damped Newton on S11 starting from z0, then the norming constant.
pub fn polish(solver: &JostSolver, z0: C64, settings: &SpectrumSettings) -> Result<DiscreteEigenvalue> {
    let f = |z: C64| solver.big_s11(z);
    let mut z = z0;
    let mut fz = f(z)?;
    let mut converged = false;
    for _ in 0..settings.max_newton {
        let d = cauchy_derivative(f, z, settings.cauchy_radius, settings.cauchy_nodes)?;
        let step = fz / d;
        if step.norm() < settings.newton_tol {
            converged = true;
            break;
        }
        let mut mu = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let cand = z - step * mu;
            if cand.im >= 0.0 {
                let fc = f(cand)?;
                if fc.norm() < fz.norm() {
                    z = cand;
                    fz = fc;
                    moved = true;
                    break;
                }
            }
            mu *= 0.5;
        }
        if !moved {
            // No decrease possible: |S11| sits at its rounding floor.
            converged = true;
            break;
        }
    }
    if !converged || fz.norm() > 1e-9 {
        return Err(convergence("Newton polish of an eigenvalue did not converge"));
    }
    let big_prime = cauchy_derivative(f, z, settings.cauchy_radius, settings.cauchy_nodes)?;
    let s11_prime = big_prime / (ONE - (z * z).inv());
    let (b, _) = solver.proportionality(z)?;
    Ok(DiscreteEigenvalue { z, norming: b / s11_prime, b, s11_prime, residual: fz.norm() })
}

/// Number of zeros of S11 in {r_in < |z| < r_out, ψ_min < arg z < π − ψ_min}
/// from the winding number of S11 along the boundary.
pub fn count_zeros_in_half_annulus(solver: &JostSolver, r_in: f64, r_out: f64, psi_min: f64) -> Result<i64> {
    if !(0.0 < r_in && r_in < 1.0 && r_out > 1.0 && psi_min > 0.0 && psi_min < 0.5) {
        return Err(domain("bad half-annulus"));
    }
    // Boundary pieces, counter-clockwise.
    let pieces: [(f64, f64, f64, f64); 4] = [
        (r_in, r_out, psi_min, psi_min),
        (r_out, r_out, psi_min, PI - psi_min),
        (r_out, r_in, PI - psi_min, PI - psi_min),
        (r_in, r_in, PI - psi_min, psi_min),
    ];
    let point = |p: &(f64, f64, f64, f64), t: f64| {
        let r = p.0 + (p.1 - p.0) * t;
        let a = p.2 + (p.3 - p.2) * t;
        C64::from_polar(r, a)
    };
    let mut total = 0.0;
    for p in &pieces {
        let mut t = 0.0;
        let mut prev = solver.big_s11(point(p, 0.0))?;
        let mut dt = 1.0 / 64.0;
        while t < 1.0 {
            let tn = (t + dt).min(1.0);
            let cur = solver.big_s11(point(p, tn))?;
            let dphi = (cur / prev).arg();
            if dphi.abs() > 0.3 && dt > 1e-9 {
                dt *= 0.5;
                continue;
            }
            total += dphi;
            prev = cur;
            t = tn;
            if dphi.abs() < 0.05 {
                dt = (dt * 2.0).min(1.0 / 16.0);
            }
        }
    }
    Ok((total / (2.0 * PI)).round() as i64)
}
