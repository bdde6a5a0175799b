//! Quadrature: globally adaptive 7/15-point Gauss–Kronrod and
//! Gauss–Legendre nodes.

use crate::error::{convergence, domain};
use crate::{Result, C64};
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Number of Kronrod nodes per panel.
pub const KRONROD_POINTS: usize = 15;

/// Kronrod nodes and weights mapped to [a, b], in increasing order.
pub fn kronrod_rule(a: f64, b: f64) -> ([f64; 15], [f64; 15]) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut x = [0.0; 15];
    let mut w = [0.0; 15];
    for j in 0..7 {
        x[j] = c - h * XGK[j];
        w[j] = h * WGK[j];
        x[14 - j] = c + h * XGK[j];
        w[14 - j] = h * WGK[j];
    }
    x[7] = c;
    w[7] = h * WGK[7];
    (x, w)
}

/// One accepted panel of an adaptive integration, with the integrand values
/// at its Kronrod nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub values: [C64; 15],
    pub estimate: C64,
    pub error: f64,
}

impl Panel {
    fn build(a: f64, b: f64, f: &mut impl FnMut(f64) -> C64) -> Panel {
        let (x, _) = kronrod_rule(a, b);
        let mut values = [C64::new(0.0, 0.0); 15];
        for j in 0..15 {
            values[j] = f(x[j]);
        }
        Panel::from_values(a, b, values)
    }

    /// Panel from integrand values already sampled at the Kronrod nodes of
    /// [a, b].
    pub fn from_values(a: f64, b: f64, values: [C64; 15]) -> Panel {
        let (_, w) = kronrod_rule(a, b);
        let h = 0.5 * (b - a);
        let mut k = C64::new(0.0, 0.0);
        let mut g = C64::new(0.0, 0.0);
        let mut resabs = 0.0;
        for j in 0..15 {
            k += values[j] * w[j];
            resabs += w[j] * values[j].norm();
        }
        // Gauss nodes are the odd-indexed Kronrod nodes.
        for (i, wg) in WG.iter().enumerate().take(3) {
            g += (values[2 * i + 1] + values[13 - 2 * i]) * (h * wg);
        }
        g += values[7] * (h * WG[3]);
        let mean = k / (b - a);
        let mut resasc = 0.0;
        for j in 0..15 {
            resasc += w[j] * (values[j] - mean).norm();
        }
        let mut err = (k - g).norm();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        Panel { a, b, values, estimate: k, error: err }
    }

    pub fn nodes(&self) -> ([f64; 15], [f64; 15]) {
        kronrod_rule(self.a, self.b)
    }
}

/// Controls for [`adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Panels wider than this are always split.
    pub max_width: f64,
}

impl Default for AdaptOptions {
    fn default() -> Self {
        AdaptOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_panels: 4000, max_width: f64::INFINITY }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub value: C64,
    pub error: f64,
    pub panels: Vec<Panel>,
}

/// Globally adaptive Gauss–Kronrod integration over consecutive
/// breakpoints `points[0] < points[1] < ...`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate falls below max(abs_tol, rel_tol·|I|). Endpoint singularities
/// of logarithmic type are handled by repeated bisection.
pub fn adaptive(f: &mut impl FnMut(f64) -> C64, points: &[f64], opts: &AdaptOptions) -> Result<Integral> {
    if points.len() < 2 {
        return Err(domain("need at least two breakpoints"));
    }
    if points.windows(2).any(|w| !(w[1] > w[0]) || !w[0].is_finite() || !w[1].is_finite()) {
        return Err(domain("breakpoints must be finite and increasing"));
    }
    let mut panels = Vec::new();
    for w in points.windows(2) {
        split_to_width(w[0], w[1], opts.max_width, &mut |a, b| panels.push(Panel::build(a, b, f)));
    }
    loop {
        let value: C64 = panels.iter().map(|p| p.estimate).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(crate::error::numerical("integrand produced a non-finite value"));
        }
        if error <= opts.abs_tol.max(opts.rel_tol * value.norm()) {
            panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
            return Ok(Integral { value, error, panels });
        }
        if panels.len() >= opts.max_panels {
            return Err(convergence("adaptive quadrature exhausted its panel budget"));
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap())
            .unwrap();
        let p = panels.swap_remove(idx);
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            return Err(convergence("panel width reached machine resolution"));
        }
        panels.push(Panel::build(p.a, m, f));
        panels.push(Panel::build(m, p.b, f));
    }
}

fn split_to_width(a: f64, b: f64, max_width: f64, emit: &mut impl FnMut(f64, f64)) {
    let n = if max_width.is_finite() { ((b - a) / max_width).ceil().max(1.0) as usize } else { 1 };
    for i in 0..n {
        let lo = a + (b - a) * i as f64 / n as f64;
        let hi = if i + 1 == n { b } else { a + (b - a) * (i + 1) as f64 / n as f64 };
        emit(lo, hi);
    }
}

/// Convenience wrapper for a real integrand.
pub fn integrate_real(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let opts = AdaptOptions { abs_tol: tol, rel_tol: tol, ..AdaptOptions::default() };
    Ok(adaptive(&mut |x| C64::new(f(x), 0.0), &[a, b], &opts)?.value.re)
}

/// n-point Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut r = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, r);
            dp = d;
            let dr = p / d;
            r -= dr;
            if dr.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, r);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -r;
        x[n - 1 - i] = r;
        let wi = 2.0 / ((1.0 - r * r) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_for_degree_22() {
        let (x, w) = kronrod_rule(-1.0, 2.0);
        let s: f64 = x.iter().zip(w.iter()).map(|(x, w)| w * x.powi(22)).sum();
        let exact = (2.0f64.powi(23) + 1.0) / 23.0;
        assert!((s / exact - 1.0).abs() < 1e-13);
    }

    #[test]
    fn log_endpoint_singularity() {
        let v = integrate_real(|x| x.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v + 1.0).abs() < 1e-11);
    }

    #[test]
    fn complex_integrand_with_breakpoints() {
        let opts = AdaptOptions::default();
        let r = adaptive(&mut |x| C64::new(0.0, x).exp(), &[0.0, 1.0, PI], &opts).unwrap();
        assert!((r.value - C64::new(0.0, 2.0)).norm() < 1e-13);
        assert!(r.panels.windows(2).all(|w| w[0].b == w[1].a));
    }

    #[test]
    fn max_width_forces_splits() {
        let opts = AdaptOptions { max_width: 0.1, ..AdaptOptions::default() };
        let r = adaptive(&mut |_| C64::new(1.0, 0.0), &[0.0, 1.0], &opts).unwrap();
        assert!(r.panels.len() >= 10);
        assert!(r.panels.iter().all(|p| p.b - p.a <= 0.1 + 1e-15));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = x.iter().zip(w.iter()).map(|(x, w)| w * x.powi(22)).sum();
        assert!((s - 2.0 / 23.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn bad_breakpoints_rejected() {
        let opts = AdaptOptions::default();
        assert!(adaptive(&mut |_| C64::new(1.0, 0.0), &[1.0, 0.0], &opts).is_err());
    }
}
