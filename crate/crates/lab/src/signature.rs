//! Sampled audit of the phase-function geometry: stationary points, the
//! sign of Re(2iθ) on the lens sectors, phase-point confinement inside the
//! transition wedges and the decay of the cubic-model remainder.

use crate::config::RunConfig;
use crate::error::LabResult;
use crate::formats::Provenance;
use crate::harness::fit_exponent;
use dnls_core::phase::{
    phase_point_bound, scaled_vars, stationary_points, theta_prime, x_for_s, Case, Sector, SectorGeometry, SectorKind,
};
use dnls_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const SIGNATURE_SCHEMA: &str = "dnls-signature/1";
pub const VIETA_TOL: f64 = 1e-12;
pub const CRITICAL_TOL: f64 = 1e-10;
pub const REMAINDER_EXPONENT_MAX: f64 = -0.30;
/// Radius of the k-disk on which the remainder is maximized.
pub const REMAINDER_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryAudit {
    pub samples: usize,
    pub max_product_defect: f64,
    pub max_theta_prime: f64,
    /// |θ′(ξⱼ)| divided by the size of its terms, |ξ|(1 + ξⱼ⁻²) + |ξⱼ| + |ξⱼ|⁻³.
    pub max_theta_prime_scaled: f64,
    pub ordering_failures: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorAudit {
    pub xi: f64,
    pub kind: String,
    pub upper: bool,
    pub samples: usize,
    pub sign_failures: usize,
    pub bound_failures: usize,
    /// Samples on the |z| > 2 branch of the outer sector, and how many of
    /// them miss the bound.
    pub far_branch_samples: usize,
    pub far_branch_bound_failures: usize,
    /// min over samples of (signed value − bound).
    pub min_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfinementAudit {
    pub samples: usize,
    pub bound: f64,
    pub max_abs_k: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderAudit {
    pub case: String,
    pub s: f64,
    pub t: Vec<f64>,
    pub max_abs: Vec<f64>,
    pub exponent: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureReport {
    pub schema: String,
    pub provenance: Provenance,
    pub seed: u64,
    pub phi: f64,
    pub region_c: f64,
    pub stationary: StationaryAudit,
    pub sectors: Vec<SectorAudit>,
    pub sign_pass: bool,
    pub bound_pass: bool,
    /// Same as `bound_pass` with the |z| > 2 outer branch left out.
    pub bound_pass_near: bool,
    pub confinement: ConfinementAudit,
    pub remainder: Vec<RemainderAudit>,
    pub remainder_pass: bool,
    /// The mislabelled-sector control produced sign failures, as it should.
    pub negative_control_detected: bool,
}

impl SignatureReport {
    pub fn pass(&self) -> bool {
        self.stationary.pass
            && self.sign_pass
            && self.bound_pass
            && self.confinement.pass
            && self.remainder_pass
            && self.negative_control_detected
    }
}

fn random_xi(rng: &mut ChaCha8Rng) -> f64 {
    // |ξ| − 1 log-uniform on [1e-6, 1e2].
    let d = (rng.gen_range(-6.0..2.0f64) * std::f64::consts::LN_10).exp();
    if rng.gen_bool(0.5) {
        1.0 + d
    } else {
        -1.0 - d
    }
}

pub fn stationary_audit(rng: &mut ChaCha8Rng, samples: usize) -> LabResult<StationaryAudit> {
    let mut a = StationaryAudit { samples, max_product_defect: 0.0, max_theta_prime: 0.0, max_theta_prime_scaled: 0.0, ordering_failures: 0, pass: false };
    for _ in 0..samples {
        let xi = random_xi(rng);
        let (x1, x2) = stationary_points(xi)?.points.expect("|ξ| > 1");
        a.max_product_defect = a.max_product_defect.max((x1 * x2 - 1.0).abs());
        for p in [x1, x2] {
            let d = theta_prime(C64::new(p, 0.0), xi)?.norm();
            let scale = xi.abs() * (1.0 + p.powi(-2)) + p.abs() + p.abs().powi(-3);
            a.max_theta_prime = a.max_theta_prime.max(d);
            a.max_theta_prime_scaled = a.max_theta_prime_scaled.max(d / scale);
        }
        let ordered = if xi < 0.0 { x2 < -1.0 && -1.0 < x1 && x1 < 0.0 } else { 0.0 < x1 && x1 < 1.0 && 1.0 < x2 };
        if !ordered {
            a.ordering_failures += 1;
        }
    }
    a.pass = a.max_product_defect <= VIETA_TOL && a.max_theta_prime_scaled <= CRITICAL_TOL && a.ordering_failures == 0;
    Ok(a)
}

fn sectors() -> Vec<Sector> {
    SectorKind::ALL.iter().flat_map(|&kind| [true, false].map(|upper| Sector { kind, upper })).collect()
}

/// Check `samples` points spread evenly over the eight sectors. Points are
/// drawn from `draw_from` and checked against `label`; the two differ only
/// in the negative control.
fn audit_sector(
    g: &SectorGeometry,
    draw_from: Sector,
    label: Sector,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> LabResult<SectorAudit> {
    let mut a = SectorAudit {
        xi: g.xi,
        kind: format!("{:?}", label.kind).to_lowercase(),
        upper: label.upper,
        samples,
        sign_failures: 0,
        bound_failures: 0,
        far_branch_samples: 0,
        far_branch_bound_failures: 0,
        min_margin: f64::INFINITY,
    };
    for _ in 0..samples {
        let z = g.sample(draw_from, rng.gen_range(1e-3..1.0), rng.gen_range(1e-3..1.0));
        let c = g.check(label, z)?;
        a.sign_failures += usize::from(!c.sign_ok);
        a.bound_failures += usize::from(!c.bound_ok);
        if c.far_branch {
            a.far_branch_samples += 1;
            a.far_branch_bound_failures += usize::from(!c.bound_ok);
        }
        a.min_margin = a.min_margin.min(c.expected_sign * c.value - c.bound);
    }
    Ok(a)
}

pub fn sector_audit(rng: &mut ChaCha8Rng, xi_values: &[f64], phi: f64, samples_per_xi: usize) -> LabResult<Vec<SectorAudit>> {
    let all = sectors();
    let per = samples_per_xi.div_ceil(all.len());
    let mut out = Vec::new();
    for &xi in xi_values {
        let g = SectorGeometry::new(xi, phi)?;
        for &s in &all {
            out.push(audit_sector(&g, s, s, per, rng)?);
        }
    }
    Ok(out)
}

/// Points drawn from the far sector but labelled as the origin sector,
/// where the expected sign is the opposite one.
pub fn negative_control(rng: &mut ChaCha8Rng, phi: f64) -> LabResult<SectorAudit> {
    let g = SectorGeometry::new(-1.01, phi)?;
    audit_sector(
        &g,
        Sector { kind: SectorKind::Far, upper: true },
        Sector { kind: SectorKind::Origin, upper: true },
        100,
        rng,
    )
}

/// Random points of the wedges on the side with real stationary points;
/// both points must satisfy |k_j| ≤ (3/4)^{1/3}√(2C).
pub fn confinement_audit(rng: &mut ChaCha8Rng, c: f64, samples: usize) -> LabResult<ConfinementAudit> {
    let bound = phase_point_bound(c);
    let s_max = 8.0 / 3.0 * 0.75f64.powf(2.0 / 3.0) * c;
    let mut max_abs_k = 0.0f64;
    for _ in 0..samples {
        let case = if rng.gen_bool(0.5) { Case::MinusOne } else { Case::PlusOne };
        let t = (rng.gen_range(1.0..4.0f64) * std::f64::consts::LN_10).exp();
        let s = -s_max * rng.gen_range(1e-6..1.0);
        let sc = scaled_vars(x_for_s(s, t, case)?, t, case)?;
        if let Some((k1, k2)) = sc.phase_points_k() {
            max_abs_k = max_abs_k.max(k1.abs()).max(k2.abs());
        }
    }
    Ok(ConfinementAudit { samples, bound, max_abs_k, pass: max_abs_k <= bound })
}

/// max over a polar grid of the disk |k| ≤ 0.5 of |S(t; k)|.
pub fn remainder_max(case: Case, s: f64, t: f64) -> LabResult<f64> {
    let sc = scaled_vars(x_for_s(s, t, case)?, t, case)?;
    let mut m = 0.0f64;
    for i in 1..=20 {
        let r = REMAINDER_RADIUS * i as f64 / 20.0;
        for j in 0..64 {
            let k = C64::from_polar(r, std::f64::consts::TAU * j as f64 / 64.0);
            m = m.max(sc.remainder(k)?.norm());
        }
    }
    Ok(m)
}

pub fn remainder_audit(case: Case, s: f64, times: &[f64]) -> LabResult<RemainderAudit> {
    let max_abs: Vec<f64> = times.iter().map(|&t| remainder_max(case, s, t)).collect::<LabResult<_>>()?;
    let exponent = fit_exponent(times, &max_abs)?;
    Ok(RemainderAudit {
        case: case.label().into(),
        s,
        t: times.to_vec(),
        max_abs,
        exponent,
        pass: exponent <= REMAINDER_EXPONENT_MAX,
    })
}

pub fn run_signature(cfg: &RunConfig, seed: u64) -> LabResult<SignatureReport> {
    cfg.validate()?;
    let sig = &cfg.signature;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stationary = stationary_audit(&mut rng, sig.random_xi)?;
    let sectors = sector_audit(&mut rng, &sig.xi_values, sig.phi, sig.samples_per_xi)?;
    let confinement = confinement_audit(&mut rng, cfg.region_c, sig.transition_points)?;
    let control = negative_control(&mut rng, sig.phi)?;
    let mut remainder = Vec::new();
    for case in [Case::MinusOne, Case::PlusOne] {
        for s in [-1.0, 0.0, 1.0] {
            remainder.push(remainder_audit(case, s, &sig.remainder_times)?);
        }
    }
    let near = |a: &SectorAudit| a.bound_failures - a.far_branch_bound_failures == 0;
    Ok(SignatureReport {
        schema: SIGNATURE_SCHEMA.into(),
        provenance: Provenance::new(&cfg.hash(), &cfg.datum.describe()),
        seed,
        phi: sig.phi,
        region_c: cfg.region_c,
        sign_pass: sectors.iter().all(|a| a.sign_failures == 0),
        bound_pass: sectors.iter().all(|a| a.bound_failures == 0),
        bound_pass_near: sectors.iter().all(near),
        stationary,
        sectors,
        confinement,
        remainder_pass: remainder.iter().all(|r| r.pass),
        remainder,
        negative_control_detected: control.sign_failures > 0,
    })
}
