//! Jost columns by a fourth-order Magnus integrator.
//!
//! With ψ' = Lψ, L = iσ₃(Q − λ), the normalized columns m₁ = ψ₁e^{iζx} and
//! m₂ = ψ₂e^{−iζx} satisfy m₁' = (L + iζ)m₁ and m₂' = (L − iζ)m₂. The scalar
//! shift commutes with L, so each step is exp(Ω)·e^{±iζh} with Ω the Magnus
//! exponent of L alone, exponentiated in closed form. m₁⁻ starts from the
//! first column of Y₋ = I − σ₁/z at the left end, m₁⁺ and m₂⁺ from the
//! columns of Y₊ = I + σ₁/z at the right end, and all meet at the middle
//! node.

use super::datum::InitialDatum;
use crate::error::{domain, numerical};
use crate::linalg::{det_cols, Mat2, I, ONE};
use crate::phase::{lambda, zeta};
use crate::{Result, C64};
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Largest |λ|·h per Magnus step before a grid cell is subdivided.
const MAX_PHASE_STEP: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct JostSolver {
    datum: InitialDatum,
    /// q at cell midpoints from cubic interpolation.
    qmid: Vec<C64>,
    matching: usize,
}

/// Normalized Jost columns at the matching point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostColumns {
    pub z: C64,
    pub x_match: f64,
    pub m1_minus: [C64; 2],
    pub m2_plus: [C64; 2],
    /// Only computed on the real line, where it is bounded.
    pub m1_plus: Option<[C64; 2]>,
}

/// Scattering coefficients at a real z ≠ 0.
///
/// `big_s11` = det[ψ₁⁻, ψ₂⁺] and `big_s21` = det[ψ₁⁺, ψ₁⁻] are regular at
/// z = ±1; s11 = S11/(1 − z⁻²) and s21 = S21/(1 − z⁻²) are not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoefficients {
    pub z: f64,
    pub big_s11: C64,
    pub big_s21: C64,
    pub s11: Option<C64>,
    pub s21: Option<C64>,
    /// r = s21/s11 = S21/S11.
    pub r: C64,
}

impl ScatteringCoefficients {
    /// |s11|² − |s21|² − 1.
    pub fn unitarity_defect(&self) -> Option<f64> {
        Some((self.s11?.norm_sqr() - self.s21?.norm_sqr() - 1.0).abs())
    }

    /// ν = −(1/2π) log(1 − |r|²), written as (1/π) log|s11| to avoid the
    /// cancellation in 1 − |r|².
    pub fn nu(&self) -> Option<f64> {
        Some(self.s11?.norm().ln() / core::f64::consts::PI)
    }
}

fn lax(q: C64, lam: C64) -> Mat2 {
    Mat2::new(-I * lam, I * q, -I * q.conj(), I * lam)
}

fn magnus(qa: C64, qm: C64, qb: C64, lam: C64, h: f64) -> Mat2 {
    let a0 = lax(qa, lam);
    let am = lax(qm, lam);
    let a1 = lax(qb, lam);
    let w1 = (a0 + am.scale(C64::new(4.0, 0.0)) + a1).scale(C64::new(h / 6.0, 0.0));
    let w2 = (a1 - a0).scale(C64::new(h, 0.0));
    (w1 - w1.commutator(w2).scale(C64::new(1.0 / 12.0, 0.0))).exp_traceless()
}

impl JostSolver {
    pub fn new(datum: InitialDatum) -> Self {
        let n = datum.q.len();
        let q = &datum.q;
        let mut qmid = Vec::with_capacity(n - 1);
        for k in 0..n - 1 {
            let v = if k == 0 || k + 2 >= n {
                datum.interpolate(datum.x(k) + 0.5 * datum.dx)
            } else {
                (-q[k - 1] + q[k] * 9.0 + q[k + 1] * 9.0 - q[k + 2]) / 16.0
            };
            qmid.push(v);
        }
        let matching = (n - 1) / 2;
        JostSolver { datum, qmid, matching }
    }

    pub fn datum(&self) -> &InitialDatum {
        &self.datum
    }

    pub fn x_match(&self) -> f64 {
        self.datum.x(self.matching)
    }

    /// Propagator of L over the grid cell [x_k, x_{k+1}], in the direction
    /// given by `forward`.
    fn cell(&self, k: usize, lam: C64, forward: bool) -> Mat2 {
        let dx = self.datum.dx;
        let sub = ((dx * lam.norm()) / MAX_PHASE_STEP).ceil().max(1.0) as usize;
        if sub == 1 {
            let (qa, qb) = (self.datum.q[k], self.datum.q[k + 1]);
            return if forward {
                magnus(qa, self.qmid[k], qb, lam, dx)
            } else {
                magnus(qb, self.qmid[k], qa, lam, -dx)
            };
        }
        let h = dx / sub as f64;
        let x0 = self.datum.x(k);
        let mut prop = Mat2::identity();
        for j in 0..sub {
            let (xa, xb) = if forward {
                (x0 + j as f64 * h, x0 + (j + 1) as f64 * h)
            } else {
                (x0 + dx - j as f64 * h, x0 + dx - (j + 1) as f64 * h)
            };
            let qa = if j == 0 { self.datum.q[if forward { k } else { k + 1 }] } else { self.datum.interpolate(xa) };
            let qb = if j + 1 == sub { self.datum.q[if forward { k + 1 } else { k }] } else { self.datum.interpolate(xb) };
            let qm = self.datum.interpolate(0.5 * (xa + xb));
            let step = magnus(qa, qm, qb, lam, if forward { h } else { -h });
            prop = step * prop;
        }
        prop
    }

    /// Normalized Jost columns at the matching node. `with_m1_plus` also
    /// integrates m₁⁺, which is only bounded for real z.
    pub fn columns(&self, z: C64, with_m1_plus: bool) -> Result<JostColumns> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() == 0.0 {
            return Err(domain("Jost columns need a finite z ≠ 0"));
        }
        if z.im < 0.0 {
            return Err(domain("m₁⁻ and m₂⁺ are only bounded for Im z ≥ 0"));
        }
        let lam = lambda(z);
        let zt = zeta(z);
        let zi = z.inv();
        let n = self.datum.q.len();
        let dx = self.datum.dx;
        let fwd = (I * zt * dx).exp();
        let bwd = (-I * zt * dx).exp();

        let mut m1m = [ONE, -zi];
        for k in 0..self.matching {
            let p = self.cell(k, lam, true);
            let v = p.apply(m1m);
            m1m = [v[0] * fwd, v[1] * fwd];
        }
        let mut m2p = [zi, ONE];
        let mut m1p = [ONE, zi];
        for k in (self.matching..n - 1).rev() {
            let p = self.cell(k, lam, false);
            let v = p.apply(m2p);
            // Leftward step h = −dx: m₂ picks up e^{−iζh} = e^{iζdx}.
            m2p = [v[0] * fwd, v[1] * fwd];
            if with_m1_plus {
                let w = p.apply(m1p);
                m1p = [w[0] * bwd, w[1] * bwd];
            }
        }
        let cols = JostColumns {
            z,
            x_match: self.x_match(),
            m1_minus: m1m,
            m2_plus: m2p,
            m1_plus: if with_m1_plus { Some(m1p) } else { None },
        };
        let finite = cols.m1_minus.iter().chain(cols.m2_plus.iter()).all(|v| v.re.is_finite() && v.im.is_finite());
        if !finite {
            return Err(numerical("Jost integration overflowed"));
        }
        Ok(cols)
    }

    /// S11(z) = det[ψ₁⁻, ψ₂⁺] for Im z ≥ 0.
    pub fn big_s11(&self, z: C64) -> Result<C64> {
        let c = self.columns(z, false)?;
        Ok(det_cols(c.m1_minus, c.m2_plus))
    }

    /// s11(z) = S11(z)/(1 − z⁻²) for Im z ≥ 0, z ≠ ±1.
    pub fn s11(&self, z: C64) -> Result<C64> {
        let d = ONE - (z * z).inv();
        if d.norm() < 1e-14 {
            return Err(domain("s11 has a pole at z = ±1"));
        }
        Ok(self.big_s11(z)? / d)
    }

    /// All coefficients at a real z ≠ 0 (z = ±1 allowed).
    pub fn coefficients(&self, z: f64) -> Result<ScatteringCoefficients> {
        let zc = C64::new(z, 0.0);
        let c = self.columns(zc, true)?;
        let big_s11 = det_cols(c.m1_minus, c.m2_plus);
        let phase = (-I * zeta(zc) * (2.0 * c.x_match)).exp();
        let big_s21 = det_cols(c.m1_plus.unwrap(), c.m1_minus) * phase;
        let d = 1.0 - 1.0 / (z * z);
        let (s11, s21) = if d.abs() < 1e-14 { (None, None) } else { (Some(big_s11 / d), Some(big_s21 / d)) };
        Ok(ScatteringCoefficients { z, big_s11, big_s21, s11, s21, r: big_s21 / big_s11 })
    }

    /// ψ₁⁻(z_j) = b ψ₂⁺(z_j) at an eigenvalue, from the dominant component
    /// of ψ₂⁺ at the matching point. Returns b and the mismatch between the
    /// two component ratios.
    pub fn proportionality(&self, zj: C64) -> Result<(C64, f64)> {
        let c = self.columns(zj, false)?;
        let phase = (-I * zeta(zj) * (2.0 * c.x_match)).exp();
        let (a, b) = (c.m1_minus, c.m2_plus);
        let (k, o) = if b[0].norm() >= b[1].norm() { (0, 1) } else { (1, 0) };
        let ratio = a[k] / b[k] * phase;
        let other = if b[o].norm() > 1e-8 * b[k].norm() { (a[o] / b[o] * phase - ratio).norm() } else { 0.0 };
        Ok((ratio, other))
    }
}
