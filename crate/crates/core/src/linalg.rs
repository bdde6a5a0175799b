//! 2×2 complex matrices, just enough for the Lax operator and the
//! residue matrices.

use crate::C64;
use core::ops::{Add, Mul, Sub};
#[allow(unused_imports)]
use num_traits::Float;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn sigma1() -> Self {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma3() -> Self {
        Mat2::new(ONE, ZERO, ZERO, -ONE)
    }

    pub fn scale(self, s: C64) -> Self {
        let m = self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn det(self) -> C64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn commutator(self, other: Mat2) -> Mat2 {
        self * other - other * self
    }

    pub fn apply(self, v: [C64; 2]) -> [C64; 2] {
        let m = self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn col(self, j: usize) -> [C64; 2] {
        [self.0[0][j], self.0[1][j]]
    }

    pub fn max_abs(self) -> f64 {
        let m = self.0;
        m[0][0].norm().max(m[0][1].norm()).max(m[1][0].norm()).max(m[1][1].norm())
    }

    /// exp of a traceless matrix: cosh(δ) I + sinh(δ)/δ A with δ² = −det A.
    pub fn exp_traceless(self) -> Mat2 {
        let d2 = -self.det();
        let d = d2.sqrt();
        let (c, s) = if d.norm() < 1e-4 {
            // Taylor series to keep sinh(δ)/δ accurate for tiny δ.
            let c = ONE + d2 / 2.0 + d2 * d2 / 24.0 + d2 * d2 * d2 / 720.0;
            let s = ONE + d2 / 6.0 + d2 * d2 / 120.0 + d2 * d2 * d2 / 5040.0;
            (c, s)
        } else {
            (d.cosh(), d.sinh() / d)
        };
        Mat2::identity().scale(c) + self.scale(s)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// det[a, b] of two column vectors.
pub fn det_cols(a: [C64; 2], b: [C64; 2]) -> C64 {
    a[0] * b[1] - a[1] * b[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_traceless_matches_series() {
        let a = Mat2::new(C64::new(0.3, -0.1), C64::new(0.2, 0.5), C64::new(-0.4, 0.1), C64::new(-0.3, 0.1));
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for k in 1..30 {
            term = (term * a).scale(C64::new(1.0 / k as f64, 0.0));
            sum = sum + term;
        }
        assert!((a.exp_traceless() - sum).max_abs() < 1e-14);
        let small = a.scale(C64::new(1e-6, 0.0));
        let e = small.exp_traceless();
        let approx = Mat2::identity() + small + (small * small).scale(C64::new(0.5, 0.0));
        assert!((e - approx).max_abs() < 5e-16);
    }

    #[test]
    fn exp_traceless_has_unit_determinant() {
        let a = Mat2::new(C64::new(1.2, 0.7), C64::new(-2.0, 0.5), C64::new(0.4, 3.1), C64::new(-1.2, -0.7));
        assert!((a.exp_traceless().det() - ONE).norm() < 1e-12);
    }
}
