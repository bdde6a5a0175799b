//! The phase θ(z; ξ) = ξ(z − 1/z) − ½(z² − z⁻²), its signature, stationary
//! points, region labels and the cubic scaling near z = ∓1.
//!
//! Both transition layers are related by θ(z; ξ) = θ(−z; −ξ), and the code
//! uses that map to treat the ξ ≈ +1 layer as a mirror of the ξ ≈ −1 layer.

use crate::error::domain;
use crate::{Result, C64};
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Which transition layer: ξ ≈ −1 or ξ ≈ +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    MinusOne,
    PlusOne,
}

impl Case {
    /// The critical value of ξ = x/(2t).
    pub fn edge(self) -> f64 {
        match self {
            Case::MinusOne => -1.0,
            Case::PlusOne => 1.0,
        }
    }

    /// +1 for the ξ ≈ −1 layer, −1 for the mirrored one.
    pub fn orientation(self) -> f64 {
        match self {
            Case::MinusOne => 1.0,
            Case::PlusOne => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Case::MinusOne => "minus1",
            Case::PlusOne => "plus1",
        }
    }

    pub fn from_label(s: &str) -> Option<Case> {
        match s {
            "minus1" => Some(Case::MinusOne),
            "plus1" => Some(Case::PlusOne),
            _ => None,
        }
    }
}

/// Asymptotic region of a space-time point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// |ξ| < 1, outside both transition wedges.
    Solitonic,
    /// |ξ ∓ 1| t^{2/3} ≤ C.
    Transition(Case),
    /// |ξ| > 1, outside both transition wedges.
    Solitonless,
}

/// A nonzero point of the uniformization plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint(C64);

impl SpectralPoint {
    pub fn new(z: C64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(domain("spectral point is not finite"));
        }
        if z.norm() == 0.0 {
            return Err(domain("z = 0 is excluded"));
        }
        Ok(SpectralPoint(z))
    }

    pub fn z(self) -> C64 {
        self.0
    }

    /// λ = (z + 1/z)/2.
    pub fn lambda(self) -> C64 {
        lambda(self.0)
    }

    /// ζ = (z − 1/z)/2.
    pub fn zeta(self) -> C64 {
        zeta(self.0)
    }
}

pub(crate) fn lambda(z: C64) -> C64 {
    (z + z.inv()) * 0.5
}

pub(crate) fn zeta(z: C64) -> C64 {
    (z - z.inv()) * 0.5
}

fn check_z(z: C64) -> Result<()> {
    SpectralPoint::new(z).map(|_| ())
}

/// θ(z; ξ).
pub fn theta(z: C64, xi: f64) -> Result<C64> {
    check_z(z)?;
    Ok(theta_unchecked(z, xi))
}

pub(crate) fn theta_unchecked(z: C64, xi: f64) -> C64 {
    let zi = z.inv();
    (z - zi) * xi - (z * z - zi * zi) * 0.5
}

/// dθ/dz = ξ(1 + z⁻²) − z − z⁻³.
pub fn theta_prime(z: C64, xi: f64) -> Result<C64> {
    check_z(z)?;
    let zi = z.inv();
    let zi2 = zi * zi;
    Ok((zi2 + 1.0) * xi - z - zi2 * zi)
}

/// Re(2iθ) from the closed form
/// 2 Re z Im z (1 + |z|⁻⁴) − 2ξ Im z (1 + |z|⁻²).
pub fn re_2i_theta(z: C64, xi: f64) -> Result<f64> {
    check_z(z)?;
    let m2 = z.norm_sqr();
    Ok(2.0 * z.re * z.im * (1.0 + 1.0 / (m2 * m2)) - 2.0 * xi * z.im * (1.0 + 1.0 / m2))
}

/// Stationary-phase data for a given ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGeometry {
    pub xi: f64,
    pub region: Region,
    /// η at the stationary points: η = z + 1/z.
    pub eta: Option<f64>,
    /// (ξ₁, ξ₂) with |ξ₁| ≤ 1 ≤ |ξ₂| and ξ₁ξ₂ = 1. Present only for |ξ| ≥ 1.
    pub points: Option<(f64, f64)>,
}

/// Real stationary points of θ for |ξ| ≥ 1.
///
/// η solves η² − ξη − 2 = 0 (the root with |η| ≥ 2) and the points are the
/// roots of z² − ηz + 1 = 0. Both steps are written so that nothing cancels
/// as ξ → ±1.
pub fn stationary_points(xi: f64) -> Result<PhaseGeometry> {
    if !xi.is_finite() {
        return Err(domain("ξ must be finite"));
    }
    let a = xi.abs();
    if a < 1.0 {
        return Ok(PhaseGeometry { xi, region: Region::Solitonic, eta: None, points: None });
    }
    let sigma = xi.signum();
    let root = (a * a + 8.0).sqrt();
    let eta_a = 0.5 * (a + root);
    let eta_m2 = 4.0 * (a - 1.0) / (4.0 + 8.0 / (root + a));
    let big = 0.5 * (eta_a + (eta_m2 * (eta_a + 2.0)).sqrt());
    let small = 1.0 / big;
    let region = if a == 1.0 {
        Region::Transition(if xi < 0.0 { Case::MinusOne } else { Case::PlusOne })
    } else {
        Region::Solitonless
    };
    Ok(PhaseGeometry {
        xi,
        region,
        eta: Some(sigma * eta_a),
        points: Some((sigma * small, sigma * big)),
    })
}

/// Region label of (x, t) for the wedge constant C.
pub fn classify_region(x: f64, t: f64, c: f64) -> Result<Region> {
    if !(t > 0.0) || !x.is_finite() || !t.is_finite() {
        return Err(domain("need finite x and t > 0"));
    }
    if !(c > 0.0) {
        return Err(domain("wedge constant must be positive"));
    }
    let xi = x / (2.0 * t);
    let w = t.powf(2.0 / 3.0);
    if (xi + 1.0).abs() * w <= c {
        Ok(Region::Transition(Case::MinusOne))
    } else if (xi - 1.0).abs() * w <= c {
        Ok(Region::Transition(Case::PlusOne))
    } else if xi.abs() < 1.0 {
        Ok(Region::Solitonic)
    } else {
        Ok(Region::Solitonless)
    }
}

/// Cubic scaling of one transition layer at a point (x, t).
///
/// With τ = 3t/4, the layer at ξ ≈ −1 uses k = τ^{1/3}(z + 1) and
/// s = (8/3)(ξ + 1)τ^{2/3}; the other uses k = −τ^{1/3}(z − 1) and
/// s = −(8/3)(ξ − 1)τ^{2/3}. In both, tθ = (4/3)k³ + sk + S(t; k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaling {
    pub case: Case,
    pub x: f64,
    pub t: f64,
    pub xi: f64,
    pub tau: f64,
    pub s: f64,
}

pub fn scaled_vars(x: f64, t: f64, case: Case) -> Result<Scaling> {
    if !(t > 0.0) || !t.is_finite() || !x.is_finite() {
        return Err(domain("need finite x and t > 0"));
    }
    let xi = x / (2.0 * t);
    let tau = 0.75 * t;
    let s = (8.0 / 3.0) * case.orientation() * (xi - case.edge()) * tau.powf(2.0 / 3.0);
    Ok(Scaling { case, x, t, xi, tau, s })
}

/// The x at which the layer variable takes the value s at time t.
pub fn x_for_s(s: f64, t: f64, case: Case) -> Result<f64> {
    if !(t > 0.0) || !s.is_finite() {
        return Err(domain("need finite s and t > 0"));
    }
    let tau = 0.75 * t;
    let xi = case.edge() + case.orientation() * 3.0 * s / (8.0 * tau.powf(2.0 / 3.0));
    Ok(2.0 * t * xi)
}

impl Scaling {
    pub fn k_of_z(&self, z: C64) -> C64 {
        (z - self.case.edge()) * (self.case.orientation() * self.tau.cbrt())
    }

    pub fn z_of_k(&self, k: C64) -> C64 {
        k * (self.case.orientation() / self.tau.cbrt()) + self.case.edge()
    }

    /// S(t; k) = tθ(z) − (4/3)k³ − sk, evaluated without cancellation.
    pub fn remainder(&self, k: C64) -> Result<C64> {
        let z = self.z_of_k(k);
        check_z(z)?;
        // Mirror onto the ξ ≈ −1 layer: θ(z; ξ) = θ(−z; −ξ).
        let (zc, xic) = match self.case {
            Case::MinusOne => (z, self.xi),
            Case::PlusOne => (-z, -self.xi),
        };
        let w = zc + 1.0;
        let zi = zc.inv();
        let t = self.t;
        Ok(-(w * w * zi) * (t * (xic + 1.0)) - w * w * w * w * (zc * 2.0 - 1.0) * zi * zi * (0.5 * t))
    }

    /// Stationary points in the k variable, when they are real.
    pub fn phase_points_k(&self) -> Option<(f64, f64)> {
        let g = stationary_points(self.xi).ok()?;
        let (p1, p2) = g.points?;
        let k = |p: f64| self.k_of_z(C64::new(p, 0.0)).re;
        Some((k(p1), k(p2)))
    }
}

pub fn phase_remainder(z: C64, x: f64, t: f64, case: Case) -> Result<C64> {
    let sc = scaled_vars(x, t, case)?;
    sc.remainder(sc.k_of_z(z))
}

/// (3/4)^{1/3} √(2C): bound on |k_j| inside the wedge.
pub fn phase_point_bound(c: f64) -> f64 {
    0.75f64.cbrt() * (2.0 * c).sqrt()
}

/// The four families of sectors where the sign of Re(2iθ) is controlled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorKind {
    /// Opens from the origin toward the interior of the critical interval.
    Origin,
    /// Opens from ξ₁, bounded by Re z = ξ₁/2.
    Inner,
    /// Opens from ξ₂ outward, unbounded.
    Outer,
    /// Opens from the origin away from the stationary points, unbounded.
    Far,
}

impl SectorKind {
    pub const ALL: [SectorKind; 4] = [SectorKind::Origin, SectorKind::Inner, SectorKind::Outer, SectorKind::Far];
}

/// A sector together with the half-plane it lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sector {
    pub kind: SectorKind,
    pub upper: bool,
}

/// Outcome of one pointwise check of the signature inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorCheck {
    pub z: C64,
    pub value: f64,
    /// Nonnegative lower bound on |Re(2iθ)|.
    pub bound: f64,
    /// +1 if Re(2iθ) ≥ bound is asserted, −1 if Re(2iθ) ≤ −bound.
    pub expected_sign: f64,
    pub sign_ok: bool,
    pub bound_ok: bool,
    /// True for the |z| > 2 branch of the outer sector.
    pub far_branch: bool,
}

/// Sector layout for one value of ξ with |ξ| > 1 and opening angle φ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorGeometry {
    pub case: Case,
    pub xi: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub phi: f64,
    /// Radial extent used when sampling the unbounded sectors.
    pub reach: f64,
}

impl SectorGeometry {
    pub fn new(xi: f64, phi: f64) -> Result<Self> {
        if !(xi.abs() > 1.0) {
            return Err(domain("sector layout needs |ξ| > 1"));
        }
        if !(phi > 0.0 && phi < PI / 4.0) {
            return Err(domain("opening angle must lie in (0, π/4)"));
        }
        let (xi1, xi2) = stationary_points(xi)?.points.expect("|ξ| > 1 has real points");
        let case = if xi < 0.0 { Case::MinusOne } else { Case::PlusOne };
        Ok(SectorGeometry { case, xi, xi1, xi2, phi, reach: 6.0 })
    }

    /// Canonical (ξ < −1) stationary points.
    fn canon(&self) -> (f64, f64, f64) {
        let o = self.case.orientation();
        (o * self.xi, o * self.xi1, o * self.xi2)
    }

    fn to_canon(&self, z: C64) -> C64 {
        match self.case {
            Case::MinusOne => z,
            Case::PlusOne => -z.conj(),
        }
    }

    /// Map (a, b) ∈ (0, 1)² onto a point of the sector.
    pub fn sample(&self, sector: Sector, a: f64, b: f64) -> C64 {
        let (_, x1, x2) = self.canon();
        let gamma = 0.5 * x1.abs();
        let phi = self.phi;
        let zc = match sector.kind {
            SectorKind::Origin => {
                let psi = PI - phi * a;
                let rmax = gamma / psi.cos().abs();
                C64::from_polar(rmax * b, psi)
            }
            SectorKind::Inner => {
                let psi = phi * a;
                let rmax = gamma / psi.cos();
                C64::new(x1, 0.0) + C64::from_polar(rmax * b, psi)
            }
            SectorKind::Outer => {
                let psi = PI - phi * a;
                C64::new(x2, 0.0) + C64::from_polar(self.reach * b, psi)
            }
            SectorKind::Far => C64::from_polar(self.reach * b, phi * a),
        };
        let zc = if sector.upper { zc } else { zc.conj() };
        self.to_canon(zc)
    }

    /// Membership test for a sector (open sets).
    pub fn contains(&self, sector: Sector, z: C64) -> bool {
        let zc = self.to_canon(z);
        if zc.im == 0.0 || (zc.im > 0.0) != sector.upper {
            return false;
        }
        let zc = if sector.upper { zc } else { zc.conj() };
        let (_, x1, x2) = self.canon();
        let gamma = 0.5 * x1.abs();
        let phi = self.phi;
        match sector.kind {
            SectorKind::Origin => zc.arg() > PI - phi && zc.re.abs() < gamma,
            SectorKind::Inner => {
                let d = zc - x1;
                d.arg() < phi && zc.re < -gamma
            }
            SectorKind::Outer => (zc - x2).arg() > PI - phi,
            SectorKind::Far => zc.arg() < phi,
        }
    }

    /// Check the signature inequality at z, which is assumed to lie in `sector`.
    pub fn check(&self, sector: Sector, z: C64) -> Result<SectorCheck> {
        let value = re_2i_theta(z, self.xi)?;
        let zc = self.to_canon(z);
        let (_, x1, x2) = self.canon();
        let v = zc.im.abs();
        let mut far_branch = false;
        let (canon_sign, bound) = match sector.kind {
            SectorKind::Origin => (-1.0, (2.0 * zc.arg()).sin().abs() * v),
            SectorKind::Far => (1.0, (2.0 * zc.arg()).sin().abs() * v),
            SectorKind::Inner => {
                let u = zc.re - x1;
                (-1.0, 4.0 / x1.abs() * u * u * v)
            }
            SectorKind::Outer => {
                let u = zc.re - x2;
                if zc.norm() <= 2.0 {
                    (-1.0, u * u * v / (8.0 * x2.abs().powi(3)))
                } else {
                    far_branch = true;
                    (-1.0, 2.0 * 2.0f64.sqrt() * v)
                }
            }
        };
        let mut expected_sign = canon_sign * self.case.orientation();
        if !sector.upper {
            expected_sign = -expected_sign;
        }
        let signed = expected_sign * value;
        Ok(SectorCheck {
            z,
            value,
            bound,
            expected_sign,
            sign_ok: signed >= 0.0,
            bound_ok: signed >= bound,
            far_branch,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_vanishes_at_unit_points() {
        for xi in [-3.0, -1.0, 0.2, 5.0] {
            assert!(theta(C64::new(1.0, 0.0), xi).unwrap().norm() < 1e-15);
            assert!(theta(C64::new(-1.0, 0.0), xi).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn theta_prime_matches_finite_difference() {
        let z = C64::new(0.7, -0.4);
        let h = 1e-6;
        let fd = (theta(z + h, 1.3).unwrap() - theta(z - h, 1.3).unwrap()) / (2.0 * h);
        assert!((fd - theta_prime(z, 1.3).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn closed_form_signature_matches_definition() {
        for &(re, im, xi) in &[(0.3, 0.2, -1.2), (-2.0, 0.5, 1.7), (1.1, -0.9, 0.0)] {
            let z = C64::new(re, im);
            let direct = (C64::new(0.0, 2.0) * theta(z, xi).unwrap()).re;
            assert!((direct - re_2i_theta(z, xi).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn origin_rejected() {
        assert!(matches!(theta(C64::new(0.0, 0.0), 1.0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn double_point_at_the_edge() {
        let g = stationary_points(-1.0).unwrap();
        let (a, b) = g.points.unwrap();
        assert_eq!(a, -1.0);
        assert_eq!(b, -1.0);
        assert_eq!(g.region, Region::Transition(Case::MinusOne));
        assert_eq!(stationary_points(0.5).unwrap().points, None);
    }

    #[test]
    fn points_near_edge_are_accurate() {
        let eps = 1e-12;
        let (a, b) = stationary_points(-1.0 - eps).unwrap().points.unwrap();
        // ξ₁ + 1 ≈ √(2ε/3) to leading order.
        let lead = (2.0 * eps / 3.0).sqrt();
        assert!(((a + 1.0) / lead - 1.0).abs() < 1e-3);
        assert!(((-1.0 - b) / lead - 1.0).abs() < 1e-3);
    }

    #[test]
    fn remainder_matches_direct_definition() {
        for case in [Case::MinusOne, Case::PlusOne] {
            let x = x_for_s(0.7, 50.0, case).unwrap();
            let sc = scaled_vars(x, 50.0, case).unwrap();
            assert!((sc.s - 0.7).abs() < 1e-12);
            let k = C64::new(0.9, 0.6);
            let z = sc.z_of_k(k);
            let direct = theta(z, sc.xi).unwrap() * sc.t - k * k * k * (4.0 / 3.0) - k * sc.s;
            assert!((direct - sc.remainder(k).unwrap()).norm() < 1e-11);
        }
    }

    #[test]
    fn remainder_leading_term() {
        // S ≈ 2k⁴ τ^{-1/3} on the critical ray.
        let sc = scaled_vars(-2.0e6, 1.0e6, Case::MinusOne).unwrap();
        let k = C64::new(0.3, 0.1);
        let lead = k.powi(4) * 2.0 / sc.tau.cbrt();
        assert!(((sc.remainder(k).unwrap() - lead) / lead).norm() < 1e-2);
    }

    #[test]
    fn region_labels() {
        assert_eq!(classify_region(0.0, 10.0, 1.0).unwrap(), Region::Solitonic);
        assert_eq!(classify_region(-20.0, 10.0, 1.0).unwrap(), Region::Transition(Case::MinusOne));
        assert_eq!(classify_region(20.1, 10.0, 1.0).unwrap(), Region::Transition(Case::PlusOne));
        assert_eq!(classify_region(100.0, 10.0, 1.0).unwrap(), Region::Solitonless);
        assert!(classify_region(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn sampled_points_lie_in_their_sector() {
        for xi in [-1.01, 1.01] {
            let g = SectorGeometry::new(xi, PI / 6.0).unwrap();
            for kind in SectorKind::ALL {
                for upper in [true, false] {
                    let s = Sector { kind, upper };
                    for &(a, b) in &[(0.2, 0.3), (0.9, 0.95), (0.5, 0.01)] {
                        assert!(g.contains(s, g.sample(s, a, b)), "{kind:?} {upper} {xi}");
                    }
                }
            }
        }
    }

    #[test]
    fn mislabelled_sector_fails_the_sign() {
        let g = SectorGeometry::new(-1.01, PI / 6.0).unwrap();
        let far = Sector { kind: SectorKind::Far, upper: true };
        let origin = Sector { kind: SectorKind::Origin, upper: true };
        let z = g.sample(far, 0.5, 0.5);
        assert!(g.check(far, z).unwrap().sign_ok);
        assert!(!g.check(origin, z).unwrap().sign_ok);
    }
}
