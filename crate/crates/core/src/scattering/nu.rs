//! ν(ζ) = −(1/2π) log(1 − |r(ζ)|²) = (1/π) log|s11(ζ)| on the real line.
//!
//! The scattering determinants are sampled on an adaptive Gauss–Kronrod
//! partition of [−Λ, Λ] with breakpoints at 0 and ±1. Every ν-integral is
//! then a weighted sum over the stored nodes plus an analytic tail beyond Λ,
//! where r = O(ζ⁻²) makes ν ≈ ν(±Λ)(Λ/ζ)⁴.
//!
//! Cauchy integrals close to the real axis use singularity subtraction,
//! ∫(ν − c)/(ζ − z) + c·[log(b − z) − log(a − z)] with c = ν(Re z), so the
//! boundary values T± come out of the same table.

use super::jost::JostSolver;
use crate::error::{convergence, domain, numerical};
use crate::quad::{gauss_legendre, kronrod_rule, Panel};
use crate::{Result, C64};
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Which part of the real line an integral runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Negative,
    Positive,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuSettings {
    /// Λ: the table covers [−Λ, Λ].
    pub cutoff: f64,
    /// Panels inside [−core, core] are at most `core_width` wide.
    pub core: f64,
    pub core_width: f64,
    pub outer_width: f64,
    /// Target for the summed error of ∫ν(1 + 1/max(|ζ|, 0.05)).
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Panels bisected per refinement round (one batch of solves).
    pub batch: usize,
    /// |Im z| below which Cauchy integrals are singularity-subtracted.
    pub subtract_below: f64,
}

impl Default for NuSettings {
    fn default() -> Self {
        NuSettings {
            cutoff: 20.0,
            core: 4.0,
            core_width: 0.25,
            outer_width: 2.0,
            abs_tol: 1e-10,
            max_panels: 20_000,
            batch: 16,
            subtract_below: 0.5,
        }
    }
}

impl NuSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.cutoff > self.core
            && self.core > 1.0
            && self.core_width > 0.0
            && self.outer_width > 0.0
            && self.abs_tol > 0.0
            && self.max_panels > 0
            && self.batch > 0
            && self.subtract_below >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(domain("ν-table settings need Λ > core > 1 and positive widths and tolerances"))
        }
    }
}

/// The regular determinants S11 = det[ψ₁⁻, ψ₂⁺] and S21 = det[ψ₁⁺, ψ₁⁻]
/// at the 15 Kronrod nodes of [a, b].
#[derive(Debug, Clone, PartialEq)]
pub struct NuPanel {
    pub a: f64,
    pub b: f64,
    pub big_s11: [C64; 15],
    pub big_s21: [C64; 15],
}

impl NuPanel {
    pub fn nodes(&self) -> ([f64; 15], [f64; 15]) {
        kronrod_rule(self.a, self.b)
    }

    pub fn nu(&self, j: usize) -> f64 {
        let z = self.nodes().0[j];
        nu_from_big_s11(z, self.big_s11[j])
    }

    pub fn nu_values(&self) -> [f64; 15] {
        let (x, _) = self.nodes();
        let mut v = [0.0; 15];
        for j in 0..15 {
            v[j] = nu_from_big_s11(x[j], self.big_s11[j]);
        }
        v
    }
}

/// ν = (1/π)(log|S11| − log|1 − ζ⁻²|).
pub fn nu_from_big_s11(zeta: f64, big_s11: C64) -> f64 {
    (big_s11.norm().ln() - (1.0 - 1.0 / (zeta * zeta)).abs().ln()) / PI
}

/// One real-axis node of the table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealSample {
    pub zeta: f64,
    pub weight: f64,
    pub big_s11: C64,
    pub big_s21: C64,
}

impl RealSample {
    pub fn s11(&self) -> C64 {
        self.big_s11 / (1.0 - 1.0 / (self.zeta * self.zeta))
    }

    pub fn s21(&self) -> C64 {
        self.big_s21 / (1.0 - 1.0 / (self.zeta * self.zeta))
    }

    pub fn r(&self) -> C64 {
        self.big_s21 / self.big_s11
    }

    pub fn nu(&self) -> f64 {
        nu_from_big_s11(self.zeta, self.big_s11)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NuTable {
    pub settings: NuSettings,
    /// Consecutive panels covering [−Λ, Λ].
    pub panels: Vec<NuPanel>,
    /// Summed Kronrod error estimate of ∫ν(1 + 1/max(|ζ|, 0.05)).
    pub error: f64,
}

fn initial_partition(s: &NuSettings) -> Vec<(f64, f64)> {
    let l = s.cutoff;
    let c = s.core;
    let breaks = [-l, -c, -1.0, 0.0, 1.0, c, l];
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let width = if w[0] >= -c && w[1] <= c { s.core_width } else { s.outer_width };
        let n = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        for i in 0..n {
            let lo = w[0] + (w[1] - w[0]) * i as f64 / n as f64;
            let hi = if i + 1 == n { w[1] } else { w[0] + (w[1] - w[0]) * (i + 1) as f64 / n as f64 };
            out.push((lo, hi));
        }
    }
    out
}

fn control_panel(p: &NuPanel) -> Panel {
    let (x, _) = p.nodes();
    let mut g = [C64::new(0.0, 0.0); 15];
    for j in 0..15 {
        g[j] = C64::new(nu_from_big_s11(x[j], p.big_s11[j]) * (1.0 + 1.0 / x[j].abs().max(0.05)), 0.0);
    }
    Panel::from_values(p.a, p.b, g)
}

impl NuTable {
    /// Adaptive construction. `eval` maps a batch of real ζ (never 0 or ±1)
    /// to (S11, S21); batching lets callers evaluate the Jost solves in
    /// parallel.
    pub fn build(settings: NuSettings, mut eval: impl FnMut(&[f64]) -> Result<Vec<(C64, C64)>>) -> Result<NuTable> {
        settings.validate()?;
        let mut fill = |intervals: &[(f64, f64)]| -> Result<Vec<(NuPanel, Panel)>> {
            let mut zs = Vec::with_capacity(15 * intervals.len());
            for &(a, b) in intervals {
                zs.extend_from_slice(&kronrod_rule(a, b).0);
            }
            let vals = eval(&zs)?;
            if vals.len() != zs.len() {
                return Err(numerical("ν-table evaluator returned the wrong number of values"));
            }
            let mut out = Vec::with_capacity(intervals.len());
            for (i, &(a, b)) in intervals.iter().enumerate() {
                let mut s11 = [C64::new(0.0, 0.0); 15];
                let mut s21 = [C64::new(0.0, 0.0); 15];
                for j in 0..15 {
                    s11[j] = vals[15 * i + j].0;
                    s21[j] = vals[15 * i + j].1;
                }
                let p = NuPanel { a, b, big_s11: s11, big_s21: s21 };
                let c = control_panel(&p);
                if !c.estimate.re.is_finite() {
                    return Err(numerical("non-finite ν sample"));
                }
                out.push((p, c));
            }
            Ok(out)
        };
        let mut work = fill(&initial_partition(&settings))?;
        loop {
            let error: f64 = work.iter().map(|w| w.1.error).sum();
            if error <= settings.abs_tol {
                work.sort_by(|p, q| p.0.a.partial_cmp(&q.0.a).unwrap());
                let panels = work.into_iter().map(|w| w.0).collect();
                return Ok(NuTable { settings, panels, error });
            }
            if work.len() >= settings.max_panels {
                return Err(convergence("ν table exhausted its panel budget"));
            }
            work.sort_by(|p, q| q.1.error.partial_cmp(&p.1.error).unwrap());
            // Only panels near the current worst are split, so panels at the
            // noise floor of the solver are left alone.
            let worst = work[0].1.error;
            let k = work.iter().take(settings.batch).take_while(|w| w.1.error >= 0.25 * worst).count();
            let mut halves = Vec::with_capacity(2 * k);
            for (p, _) in work.drain(..k) {
                let m = 0.5 * (p.a + p.b);
                if !(m > p.a && m < p.b) {
                    return Err(convergence("ν-table panel width reached machine resolution"));
                }
                halves.push((p.a, m));
                halves.push((m, p.b));
            }
            work.extend(fill(&halves)?);
        }
    }

    /// Sequential construction straight from a Jost solver.
    pub fn from_solver(solver: &JostSolver, settings: NuSettings) -> Result<NuTable> {
        NuTable::build(settings, |zs| {
            zs.iter()
                .map(|&z| {
                    let c = solver.coefficients(z)?;
                    Ok((c.big_s11, c.big_s21))
                })
                .collect()
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.settings.cutoff
    }

    /// All nodes in increasing order.
    pub fn samples(&self) -> impl Iterator<Item = RealSample> + '_ {
        self.panels.iter().flat_map(|p| {
            let (x, w) = p.nodes();
            (0..15).map(move |j| RealSample { zeta: x[j], weight: w[j], big_s11: p.big_s11[j], big_s21: p.big_s21[j] })
        })
    }

    fn panel_index(&self, x: f64) -> Option<usize> {
        if !(x >= -self.cutoff() && x <= self.cutoff()) {
            return None;
        }
        let i = self.panels.partition_point(|p| p.b < x);
        (i < self.panels.len()).then_some(i)
    }

    /// ν(x) by polynomial interpolation through the 15 nodes of the panel
    /// containing x.
    pub fn nu_interp(&self, x: f64) -> Result<f64> {
        let i = self.panel_index(x).ok_or_else(|| domain("ν interpolation outside the table"))?;
        let p = &self.panels[i];
        let (xs, _) = p.nodes();
        let ys = p.nu_values();
        Ok(lagrange(&xs, &ys, x))
    }

    /// ∫ f(ζ, ν(ζ)) dζ over the chosen half, tail included.
    pub fn integrate(&self, half: Half, mut f: impl FnMut(f64, f64) -> C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.panels {
            if !in_half(half, p.a, p.b) {
                continue;
            }
            let (x, w) = p.nodes();
            for j in 0..15 {
                acc += f(x[j], nu_from_big_s11(x[j], p.big_s11[j])) * w[j];
            }
        }
        acc + self.tails(half, &mut f)
    }

    fn tails(&self, half: Half, f: &mut impl FnMut(f64, f64) -> C64) -> C64 {
        let l = self.cutoff();
        let (u, wu) = gauss_legendre(24);
        let mut acc = C64::new(0.0, 0.0);
        for (sign, used) in [(-1.0, half != Half::Positive), (1.0, half != Half::Negative)] {
            if !used {
                continue;
            }
            let edge = self.edge_nu(sign);
            for k in 0..u.len() {
                // ζ = ±Λ/v with v ∈ (0, 1).
                let v = 0.5 * (u[k] + 1.0);
                let zeta = sign * l / v;
                acc += f(zeta, edge * v.powi(4)) * (0.5 * wu[k] * l / (v * v));
            }
        }
        acc
    }

    /// ν at ±Λ, extrapolated from the outermost panel.
    fn edge_nu(&self, sign: f64) -> f64 {
        let p = if sign > 0.0 { self.panels.last().unwrap() } else { &self.panels[0] };
        let (xs, _) = p.nodes();
        lagrange(&xs, &p.nu_values(), sign * self.cutoff()).max(0.0)
    }

    /// ∫ ν(ζ)/ζ dζ over the half (finite since r(0) = 0).
    pub fn moment(&self, half: Half) -> f64 {
        self.integrate(half, |z, nu| C64::new(nu / z, 0.0)).re
    }

    /// ∫ ν(ζ)/(ζ − z) dζ over the half. For |Im z| small and Re z inside the
    /// half, the integral is singularity-subtracted; z on the real line is
    /// read as a boundary value from the side given by the sign of Im z
    /// (including the sign of zero).
    pub fn cauchy(&self, z: C64, half: Half) -> C64 {
        let l = self.cutoff();
        let (lo, hi) = match half {
            Half::Negative => (-l, 0.0),
            Half::Positive => (0.0, l),
            Half::Full => (-l, l),
        };
        let near = z.im.abs() < self.settings.subtract_below && z.re > lo && z.re < hi;
        if !near {
            return self.integrate(half, |zeta, nu| C64::new(nu, 0.0) / (C64::new(zeta, 0.0) - z));
        }
        let c = self.nu_interp(z.re).unwrap_or(0.0);
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.panels {
            if !in_half(half, p.a, p.b) {
                continue;
            }
            let (x, w) = p.nodes();
            for j in 0..15 {
                let d = C64::new(x[j], 0.0) - z;
                if d.norm() == 0.0 {
                    continue;
                }
                acc += C64::new(nu_from_big_s11(x[j], p.big_s11[j]) - c, 0.0) / d * w[j];
            }
        }
        let log_part = if z.im == 0.0 {
            // Signed zeros do not survive the subtraction, so the boundary
            // value is written out.
            let side = if z.im.is_sign_positive() { PI } else { -PI };
            C64::new(((hi - z.re) / (z.re - lo)).ln(), side)
        } else {
            (C64::new(hi, 0.0) - z).ln() - (C64::new(lo, 0.0) - z).ln()
        };
        let tail = self.tails(half, &mut |zeta, nu| C64::new(nu, 0.0) / (C64::new(zeta, 0.0) - z));
        acc + log_part * c + tail
    }

    /// Boundary value of the Cauchy integral at real x from above (`upper`)
    /// or below.
    pub fn cauchy_boundary(&self, x: f64, upper: bool, half: Half) -> C64 {
        self.cauchy(C64::new(x, if upper { 0.0 } else { -0.0 }), half)
    }
}

fn in_half(half: Half, a: f64, b: f64) -> bool {
    match half {
        Half::Full => true,
        Half::Negative => b <= 0.0,
        Half::Positive => a >= 0.0,
    }
}

fn lagrange(xs: &[f64; 15], ys: &[f64; 15], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..15 {
        let d = x - xs[j];
        if d == 0.0 {
            return ys[j];
        }
        let mut w = 1.0;
        for k in 0..15 {
            if k != j {
                w /= xs[j] - xs[k];
            }
        }
        num += w / d * ys[j];
        den += w / d;
    }
    num / den
}
