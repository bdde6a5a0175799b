//! Pseudo-spectral ETDRK4 evolution of
//!
//! ```text
//! i q_t + q_xx − 2(|q|² − 1) q = 0
//! ```
//!
//! around the black soliton. With q = tanh x + w the perturbation obeys
//! w_t = i w_xx + N(w, x), N = −2i[(|q|² − 1)q − (tanh² x − 1) tanh x],
//! and w is treated as periodic on [−L, L).

use crate::error::{LabError, LabResult};
use dnls_core::C64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolverParams {
    /// Half-length L of the periodic box [−L, L).
    pub half_length: f64,
    /// Number of grid points.
    pub n: usize,
    /// Largest time step; segments between output times use the largest
    /// h ≤ dt that divides them.
    pub dt: f64,
    /// 2/3-rule dealiasing of the nonlinear term.
    pub dealias: bool,
    /// Points on the full circle used for the ETDRK4 coefficients.
    pub contour_points: usize,
    /// Largest tolerated |w| within `edge_width` of ±L.
    pub leakage_threshold: f64,
    pub edge_width: f64,
    /// Largest tolerated ratio of the nonlinear spectrum above the
    /// dealiasing cutoff to its peak.
    pub alias_threshold: f64,
    /// Diagnostics are recorded every this many time units.
    pub diagnostics_every: f64,
}

impl Default for EvolverParams {
    fn default() -> Self {
        EvolverParams {
            half_length: 40.0,
            n: 2048,
            dt: 2e-3,
            dealias: true,
            contour_points: 32,
            leakage_threshold: 1e-7,
            edge_width: 5.0,
            alias_threshold: 1e-6,
            diagnostics_every: 1.0,
        }
    }
}

impl EvolverParams {
    /// Box sized for radiation up to |ξ| = `speed` (x = 2ξt): L = 2·speed·t_end
    /// + margin, dx ≤ 0.08 with N a power of two, dt = 0.004.
    pub fn for_horizon(t_end: f64, speed: f64, margin: f64) -> EvolverParams {
        let half_length = 2.0 * speed * t_end + margin;
        let n = smooth_size((2.0 * half_length / 0.08).ceil() as usize);
        EvolverParams { half_length, n, dt: 4e-3, ..EvolverParams::default() }
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn validate(&self) -> LabResult<()> {
        let ok = self.half_length > 0.0
            && self.half_length.is_finite()
            && self.n >= 16
            && self.n % 2 == 0
            && self.dt > 0.0
            && self.contour_points >= 8
            && self.leakage_threshold > 0.0
            && self.edge_width > 0.0
            && self.edge_width < self.half_length
            && self.alias_threshold > 0.0
            && self.diagnostics_every > 0.0;
        if ok {
            Ok(())
        } else {
            Err(LabError::Validation("invalid evolver parameters".into()))
        }
    }
}

/// Smallest even 2^a 3^b 5^c ≥ n; FFTs of such sizes are fast.
pub fn smooth_size(n: usize) -> usize {
    let mut m = n.max(2);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 && m % 2 == 0 {
            return m;
        }
        m += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    /// ∫(|q|² − 1) dx.
    pub mass: f64,
    /// ∫(|q_x|² + (|q|² − 1)²) dx.
    pub energy: f64,
    /// max |w| within `edge_width` of ±L.
    pub leakage: f64,
}

/// A state of the evolution on the periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    pub params: EvolverParams,
    pub t: f64,
    pub w: Vec<C64>,
    pub diagnostics: Vec<Diagnostics>,
}

/// ETDRK4 coefficients for one step size.
struct Coefficients {
    h: f64,
    e: Vec<C64>,
    e2: Vec<C64>,
    q: Vec<C64>,
    f1: Vec<C64>,
    f2: Vec<C64>,
    f3: Vec<C64>,
}

impl Coefficients {
    /// Contour-integral evaluation of the φ-functions (Kassam–Trefethen)
    /// on a full circle, since hL = −ihk² is imaginary.
    fn new(h: f64, k: &[f64], m: usize) -> Coefficients {
        let roots: Vec<C64> = (0..m).map(|j| C64::from_polar(1.0, PI * (j as f64 + 0.5) / m as f64 * 2.0)).collect();
        let n = k.len();
        let mut c = Coefficients {
            h,
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        for &kk in k {
            let l = C64::new(0.0, -kk * kk);
            let hl = l * h;
            c.e.push(hl.exp());
            c.e2.push((hl * 0.5).exp());
            let (mut q, mut f1, mut f2, mut f3) = (C64::default(), C64::default(), C64::default(), C64::default());
            for r in &roots {
                let z = hl + r;
                let ez = z.exp();
                let z3 = z * z * z;
                q += ((z * 0.5).exp() - 1.0) / z;
                f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                f2 += (2.0 + z + ez * (z - 2.0)) / z3;
                f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            let s = h / m as f64;
            c.q.push(q * s);
            c.f1.push(f1 * s);
            c.f2.push(f2 * s);
            c.f3.push(f3 * s);
        }
        c
    }
}

pub struct Evolver {
    params: EvolverParams,
    x: Vec<f64>,
    k: Vec<f64>,
    keep: Vec<bool>,
    tanh: Vec<f64>,
    /// tanh² − 1.
    a: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    coeffs: Option<Coefficients>,
}

impl std::fmt::Debug for Evolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Evolver").field("params", &self.params).finish()
    }
}

impl Evolver {
    pub fn new(params: EvolverParams) -> LabResult<Evolver> {
        params.validate()?;
        let n = params.n;
        let dx = params.dx();
        let x: Vec<f64> = (0..n).map(|j| -params.half_length + j as f64 * dx).collect();
        let k: Vec<f64> = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                PI * m / params.half_length
            })
            .collect();
        let kmax = PI * (n / 2) as f64 / params.half_length;
        let keep = k.iter().map(|&kk| !params.dealias || kk.abs() < 2.0 / 3.0 * kmax).collect();
        let tanh: Vec<f64> = x.iter().map(|v| v.tanh()).collect();
        let a = tanh.iter().map(|t| t * t - 1.0).collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Ok(Evolver {
            params,
            x,
            k,
            keep,
            tanh,
            a,
            forward,
            inverse,
            scratch: vec![C64::default(); len],
            coeffs: None,
        })
    }

    pub fn params(&self) -> &EvolverParams {
        &self.params
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    fn fft(&mut self, v: &mut [C64]) {
        self.forward.process_with_scratch(v, &mut self.scratch);
    }

    fn ifft(&mut self, v: &mut [C64]) {
        self.inverse.process_with_scratch(v, &mut self.scratch);
        let s = 1.0 / v.len() as f64;
        for z in v.iter_mut() {
            *z *= s;
        }
    }

    /// Initial perturbation w₀ = q₀ − tanh on the grid. Rejects data whose
    /// perturbation or its first two differences fail to decay at ±L.
    pub fn initial_state(&self, q0: impl Fn(f64) -> C64) -> LabResult<EvolutionState> {
        let w: Vec<C64> = self.x.iter().zip(&self.tanh).map(|(&x, &t)| q0(x) - t).collect();
        if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(LabError::Validation("initial datum has non-finite samples".into()));
        }
        let n = w.len();
        let tol = self.params.leakage_threshold;
        for (name, idx) in [("left", [0usize, 1, 2]), ("right", [n - 1, n - 2, n - 3])] {
            let (a, b, c) = (w[idx[0]], w[idx[1]], w[idx[2]]);
            let worst = a.norm().max((b - a).norm()).max((c - b * 2.0 + a).norm());
            if worst > tol {
                return Err(LabError::Validation(format!(
                    "perturbation does not decay at the {name} end of the box (|w| or a difference is {worst:e}); enlarge L"
                )));
            }
        }
        let mut state = EvolutionState { params: self.params, t: 0.0, w, diagnostics: Vec::new() };
        let d = self.diagnostics(&state);
        state.diagnostics.push(d);
        Ok(state)
    }

    /// Fourier transform of N(w) on the retained modes, from ŵ.
    fn nonlinear(&mut self, what: &[C64], out: &mut Vec<C64>) {
        out.clear();
        out.extend_from_slice(what);
        self.ifft(out);
        for j in 0..out.len() {
            let w = out[j];
            let t = self.tanh[j];
            let q = w + t;
            // (|q|² − 1)q − (tanh² − 1)tanh = a w + d q with d = |q|² − tanh².
            let d = 2.0 * t * w.re + w.norm_sqr();
            let v = w * self.a[j] + q * d;
            out[j] = C64::new(2.0 * v.im, -2.0 * v.re);
        }
        self.fft(out);
        for (z, &keep) in out.iter_mut().zip(&self.keep) {
            if !keep {
                *z = C64::default();
            }
        }
    }

    fn ensure_coefficients(&mut self, h: f64) {
        if self.coeffs.as_ref().map(|c| c.h) != Some(h) {
            self.coeffs = Some(Coefficients::new(h, &self.k, self.params.contour_points));
        }
    }

    fn step(&mut self, v: &mut Vec<C64>, bufs: &mut [Vec<C64>; 5]) {
        let c = self.coeffs.take().expect("coefficients set");
        let [nv, na, nb, nc, tmp] = bufs;
        self.nonlinear(v, nv);
        let mut a: Vec<C64> = (0..v.len()).map(|j| c.e2[j] * v[j] + c.q[j] * nv[j]).collect();
        self.nonlinear(&a, na);
        tmp.clear();
        tmp.extend((0..v.len()).map(|j| c.e2[j] * v[j] + c.q[j] * na[j]));
        self.nonlinear(tmp, nb);
        for j in 0..v.len() {
            a[j] = c.e2[j] * a[j] + c.q[j] * (nb[j] * 2.0 - nv[j]);
        }
        self.nonlinear(&a, nc);
        for j in 0..v.len() {
            v[j] = c.e[j] * v[j] + nv[j] * c.f1[j] + (na[j] + nb[j]) * 2.0 * c.f2[j] + nc[j] * c.f3[j];
        }
        self.coeffs = Some(c);
    }

    fn leakage(&self, w: &[C64]) -> f64 {
        let edge = self.params.half_length - self.params.edge_width;
        self.x.iter().zip(w).filter(|(x, _)| x.abs() >= edge).map(|(_, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Ratio of the largest nonlinear Fourier amplitude above the 2/3
    /// cutoff to the overall largest one.
    pub fn alias_ratio(&mut self, state: &EvolutionState) -> f64 {
        let mut v = state.w.clone();
        for j in 0..v.len() {
            let w = v[j];
            let t = self.tanh[j];
            let d = 2.0 * t * w.re + w.norm_sqr();
            v[j] = w * self.a[j] + (w + t) * d;
        }
        self.fft(&mut v);
        let kmax = PI * (v.len() / 2) as f64 / self.params.half_length;
        let mut top: f64 = 0.0;
        let mut all: f64 = 0.0;
        for (z, &kk) in v.iter().zip(&self.k) {
            all = all.max(z.norm());
            if kk.abs() >= 2.0 / 3.0 * kmax {
                top = top.max(z.norm());
            }
        }
        if all == 0.0 {
            0.0
        } else {
            top / all
        }
    }

    pub fn diagnostics(&self, state: &EvolutionState) -> Diagnostics {
        let dx = self.params.dx();
        let mut what = state.w.clone();
        let mut scratch = vec![C64::default(); self.forward.get_inplace_scratch_len()];
        self.forward.process_with_scratch(&mut what, &mut scratch);
        for (z, &kk) in what.iter_mut().zip(&self.k) {
            *z *= C64::new(0.0, kk);
        }
        let mut scratch = vec![C64::default(); self.inverse.get_inplace_scratch_len()];
        self.inverse.process_with_scratch(&mut what, &mut scratch);
        let n = what.len() as f64;
        let mut mass = 0.0;
        let mut energy = 0.0;
        for j in 0..state.w.len() {
            let w = state.w[j];
            let t = self.tanh[j];
            let m = self.a[j] + 2.0 * t * w.re + w.norm_sqr();
            let qx = what[j] / n + (1.0 - t * t);
            mass += m;
            energy += qx.norm_sqr() + m * m;
        }
        Diagnostics { t: state.t, mass: mass * dx, energy: energy * dx, leakage: self.leakage(&state.w) }
    }

    /// Advance `state` to `t_end`, recording diagnostics and checking the
    /// leakage and stability guards.
    pub fn advance(&mut self, state: &mut EvolutionState, t_end: f64) -> LabResult<()> {
        if state.params != self.params {
            return Err(LabError::Validation("state was created with different parameters".into()));
        }
        let span = t_end - state.t;
        if span < 0.0 || !span.is_finite() {
            return Err(LabError::Validation(format!("cannot advance from t = {} to t = {t_end}", state.t)));
        }
        if span == 0.0 {
            return Ok(());
        }
        let steps = (span / self.params.dt - 1e-9).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        self.ensure_coefficients(h);
        let every = ((self.params.diagnostics_every / h).round() as usize).max(1);
        let mut v = state.w.clone();
        self.fft(&mut v);
        let n = v.len();
        let mut bufs: [Vec<C64>; 5] = std::array::from_fn(|_| Vec::with_capacity(n));
        let t0 = state.t;
        for s in 1..=steps {
            self.step(&mut v, &mut bufs);
            if s % every == 0 || s == steps {
                state.t = if s == steps { t_end } else { t0 + s as f64 * h };
                state.w.copy_from_slice(&v);
                self.ifft(&mut state.w);
                self.check(state)?;
            }
        }
        Ok(())
    }

    fn check(&mut self, state: &mut EvolutionState) -> LabResult<()> {
        let d = self.diagnostics(state);
        if !d.mass.is_finite() || !d.energy.is_finite() || state.w.iter().any(|v| !(v.norm() < 1e3)) {
            return Err(LabError::Numerical(format!("evolution became unstable near t = {}", state.t)));
        }
        state.diagnostics.push(d);
        if d.leakage > self.params.leakage_threshold {
            return Err(LabError::Numerical(format!(
                "boundary leakage {:e} exceeds {:e} at t = {}; enlarge the half-length L = {}",
                d.leakage, self.params.leakage_threshold, state.t, self.params.half_length
            )));
        }
        let ratio = self.alias_ratio(state);
        if ratio > self.params.alias_threshold {
            return Err(LabError::Numerical(format!(
                "aliasing alarm at t = {}: nonlinear spectrum above the 2/3 cutoff is {ratio:e} of its peak; refine the grid",
                state.t
            )));
        }
        Ok(())
    }

    /// q = tanh x + w(x) with w from its trigonometric interpolant.
    pub fn sample_field(&self, state: &EvolutionState, x: f64) -> LabResult<C64> {
        let l = self.params.half_length;
        if !(x.abs() <= l - self.params.edge_width) {
            return Err(LabError::Validation(format!("x = {x} lies outside the sampling window |x| ≤ {}", l - self.params.edge_width)));
        }
        let dx = self.params.dx();
        let pos = (x + l) / dx;
        let j = pos.round();
        if (pos - j).abs() < 1e-12 {
            return Ok(state.w[j as usize % state.w.len()] + x.tanh());
        }
        let mut what = state.w.clone();
        let mut scratch = vec![C64::default(); self.forward.get_inplace_scratch_len()];
        self.forward.process_with_scratch(&mut what, &mut scratch);
        let n = what.len();
        let mut sum = C64::default();
        for (idx, z) in what.iter().enumerate() {
            let kk = self.k[idx];
            let phase = kk * (x + l);
            if idx == n / 2 {
                // Nyquist mode split symmetrically.
                sum += *z * phase.cos();
            } else {
                sum += *z * C64::from_polar(1.0, phase);
            }
        }
        Ok(sum / n as f64 + x.tanh())
    }

    /// Evolve from q₀ and keep a copy of the state at each requested time.
    pub fn run(&mut self, q0: impl Fn(f64) -> C64, times: &[f64]) -> LabResult<Vec<EvolutionState>> {
        let mut state = self.initial_state(q0)?;
        let mut sorted = times.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out = Vec::with_capacity(sorted.len());
        for t in sorted {
            self.advance(&mut state, t)?;
            out.push(state.clone());
        }
        Ok(out)
    }
}

/// ∫(|q|² − 1) and ∫(|q_x|² + (|q|² − 1)²) of the current state.
pub fn conserved_quantities(evolver: &Evolver, state: &EvolutionState) -> (f64, f64) {
    let d = evolver.diagnostics(state);
    (d.mass, d.energy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn black_soliton_invariants() {
        let ev = Evolver::new(EvolverParams::default()).unwrap();
        let s = ev.initial_state(|x| C64::new(x.tanh(), 0.0)).unwrap();
        let (m, e) = conserved_quantities(&ev, &s);
        assert!((m + 2.0).abs() < 1e-10, "{m}");
        assert!((e - 8.0 / 3.0).abs() < 1e-10, "{e}");
    }

    #[test]
    fn rejects_undecayed_perturbation() {
        let ev = Evolver::new(EvolverParams { half_length: 10.0, n: 256, ..EvolverParams::default() }).unwrap();
        assert!(matches!(ev.initial_state(|x| C64::new(x.tanh() + 0.3 * (-x * x / 50.0).exp(), 0.0)), Err(LabError::Validation(_))));
    }

    #[test]
    fn contour_coefficients_match_series_at_small_argument() {
        // For L → 0: Q → h/2, f1 = f3 → h/6, f2 → h/6.
        let c = Coefficients::new(1e-3, &[0.0], 32);
        assert!((c.q[0] - 5e-4).norm() < 1e-15);
        for f in [c.f1[0], c.f2[0], c.f3[0]] {
            assert!((f - 1e-3 / 6.0).norm() < 1e-15);
        }
    }

    #[test]
    fn sampling_on_nodes_and_between() {
        let p = EvolverParams { half_length: 20.0, n: 512, ..EvolverParams::default() };
        let ev = Evolver::new(p).unwrap();
        let q0 = |x: f64| C64::new(x.tanh() + 0.3 * (-x * x).exp(), 0.1 * (-x * x).exp());
        let s = ev.initial_state(q0).unwrap();
        let x = ev.grid()[300];
        assert_eq!(ev.sample_field(&s, x).unwrap(), s.w[300] + x.tanh());
        for x in [0.0137, -1.234, 3.3333] {
            assert!((ev.sample_field(&s, x).unwrap() - q0(x)).norm() < 1e-12);
        }
        assert!(ev.sample_field(&s, 19.0).is_err());
        let far = ev.sample_field(&s, 14.9).unwrap();
        assert!((far - 14.9f64.tanh()).norm() < 1e-8);
    }
}
