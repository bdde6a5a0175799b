use crate::error::domain;
use crate::{Result, C64};
use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Initial datum sampled on a uniform grid x_k = x0 + k·dx, with
/// q → −1 at the left end and q → +1 at the right end.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialDatum {
    pub x0: f64,
    pub dx: f64,
    pub q: Vec<C64>,
}

/// Largest tolerated |q ∓ 1| at the grid ends.
pub const BOUNDARY_TOL: f64 = 1e-8;

impl InitialDatum {
    pub fn new(x0: f64, dx: f64, q: Vec<C64>) -> Result<Self> {
        if !(dx > 0.0) || !x0.is_finite() || !dx.is_finite() {
            return Err(domain("grid origin and spacing must be finite with dx > 0"));
        }
        if q.len() < 16 {
            return Err(domain("need at least 16 samples"));
        }
        if q.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(domain("datum contains non-finite samples"));
        }
        let left = (q[0] + 1.0).norm();
        let right = (q[q.len() - 1] - 1.0).norm();
        let x1 = x0 + dx * (q.len() - 1) as f64;
        let mut bad = Vec::new();
        if left > BOUNDARY_TOL {
            bad.push(format!("left endpoint x = {x0}: |q + 1| = {left:e}"));
        }
        if right > BOUNDARY_TOL {
            bad.push(format!("right endpoint x = {x1}: |q − 1| = {right:e}"));
        }
        if !bad.is_empty() {
            return Err(domain(format!(
                "datum does not reach its background (tolerance {BOUNDARY_TOL:e}) at the {}",
                bad.join(" and the ")
            )));
        }
        Ok(InitialDatum { x0, dx, q })
    }

    /// Sample `f` on [−half_width, half_width] with spacing close to `dx`.
    pub fn sample(f: impl Fn(f64) -> C64, half_width: f64, dx: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(dx > 0.0) {
            return Err(domain("half-width and spacing must be positive"));
        }
        let n = (2.0 * half_width / dx).round() as usize;
        let h = 2.0 * half_width / n as f64;
        let q = (0..=n).map(|k| f(-half_width + k as f64 * h)).collect();
        InitialDatum::new(-half_width, h, q)
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.q.len() - 1)
    }

    /// Cubic (four-point Lagrange) interpolation of q at x, clamped to
    /// the grid.
    pub fn interpolate(&self, x: f64) -> C64 {
        let n = self.q.len();
        let t = ((x - self.x0) / self.dx).clamp(0.0, (n - 1) as f64);
        let k = (t.floor() as usize).clamp(1, n - 3);
        let u = t - k as f64;
        let (a, b, c, d) = (self.q[k - 1], self.q[k], self.q[k + 1], self.q[k + 2]);
        let w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        a * w0 + b * w1 + c * w2 + d * w3
    }
}

/// tanh x + a e^{−x²}: the standard perturbed black soliton.
pub fn tanh_plus_gaussian(amplitude: f64) -> impl Fn(f64) -> C64 {
    move |x: f64| C64::new(x.tanh() + amplitude * (-x * x).exp(), 0.0)
}
