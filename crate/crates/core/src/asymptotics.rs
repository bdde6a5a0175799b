//! Leading-order asymptotics in the two transition layers,
//!
//! ```text
//! q(x, t) = e^{iα(∞)} (1 + τ^{−1/3} β) + O(t^{−1/2}),
//! β(−1) = −(i/2)(u(s) e^{iφ₀} + ∫_s^∞ u²),   κ = −|r(−1)|,
//! β(+1) = +(i/2)(u(s) e^{iφ₀} + ∫_s^∞ u²),   κ = +|R(1)|,
//! ```
//!
//! with u the Painlevé II solution u ~ κ Ai(s) as s → +∞.

use crate::error::domain;
use crate::painleve::{solve_pii, PainleveConfig, PainleveTable, KAPPA_CLAMP};
use crate::phase::{classify_region, scaled_vars, Case, Region};
use crate::scattering::{Half, ScatteringData};
use crate::{Error, Result, C64};
use alloc::format;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Exponent of the error term the asymptotic formula claims.
pub const ERROR_EXPONENT: f64 = -0.5;

/// α(∞): −2 Σ arg z_j + ∫₀^∞ ν/ζ for Case I, ∫₀^∞ ν/ζ for Case II.
pub fn alpha_infty(data: &ScatteringData, case: Case) -> f64 {
    let m = data.nu_moment();
    match case {
        Case::MinusOne => m - 2.0 * data.discrete.iter().map(|e| e.z.arg()).sum::<f64>(),
        Case::PlusOne => m,
    }
}

/// Wrap an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phi0 {
    pub value: f64,
    /// Case II only: arg F(1) + 2Σ arg(1 − z_j) − ∫₀^∞ ν/(2ζ) − ∫_{−∞}^0 ν/(ζ − 1),
    /// which equals arg F(1) + arg G(1) rather than arg R(1).
    pub single_g: Option<f64>,
    /// Case I with r(−1) ≈ 0: φ₀ = 0 was substituted.
    pub fallback: bool,
}

pub fn phi0(data: &ScatteringData, case: Case) -> Result<Phi0> {
    match case {
        Case::MinusOne => {
            let r = data.edge(case).r_limit;
            if r.norm() < 1e-8 {
                Ok(Phi0 { value: 0.0, single_g: None, fallback: true })
            } else {
                Ok(Phi0 { value: wrap_angle(r.arg()), single_g: None, fallback: false })
            }
        }
        Case::PlusOne => {
            let edge = data.edge(case);
            if !edge.generic {
                return Err(Error::Numerical(format!(
                    "degenerate edge: |S11(1)| = {:e} is below threshold",
                    edge.big_s11.norm()
                )));
            }
            let value = wrap_angle(data.r_at_one()?.arg());
            let f = edge.f_value()?;
            let blaschke: f64 = data.discrete.iter().map(|e| (C64::new(1.0, 0.0) - e.z).arg()).sum();
            let neg = data.table.cauchy(C64::new(1.0, 0.0), Half::Negative).re;
            let literal = f.arg() + 2.0 * blaschke - 0.5 * data.nu_moment() - neg;
            Ok(Phi0 { value, single_g: Some(wrap_angle(literal)), fallback: false })
        }
    }
}

/// κ for the case, before clamping: −|r(−1)| or +|R(1)|.
pub fn kappa_raw(data: &ScatteringData, case: Case) -> Result<f64> {
    match case {
        Case::MinusOne => Ok(-data.edge(case).r_limit.norm()),
        Case::PlusOne => Ok(data.r_at_one()?.norm()),
    }
}

/// κ clamped to [−1, 1] when the excess is at most the clamp tolerance.
pub fn clamp_kappa(k: f64) -> Result<(f64, bool)> {
    if k.abs() <= 1.0 {
        Ok((k, false))
    } else if k.abs() - 1.0 <= KAPPA_CLAMP {
        Ok((k.signum(), true))
    } else {
        Err(domain(format!("|κ| = {} exceeds 1", k.abs())))
    }
}

/// β(∓1) from u(s), I(s) and φ₀.
pub fn beta_from(case: Case, u: f64, tail: f64, phi0: f64) -> C64 {
    let inner = C64::from_polar(u, phi0) + tail;
    let sign = match case {
        Case::MinusOne => -0.5,
        Case::PlusOne => 0.5,
    };
    C64::new(0.0, sign) * inner
}

pub fn beta(case: Case, table: &PainleveTable, s: f64, phi0: f64) -> Result<C64> {
    let (u, _) = table.eval(s)?;
    let tail = table.tail_integral(s)?;
    Ok(beta_from(case, u, tail, phi0))
}

/// Constants of one transition layer, fixed by the scattering data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerConstants {
    pub case: Case,
    pub alpha: f64,
    pub t_infinity: C64,
    pub phi0: Phi0,
    pub kappa_raw: f64,
    pub kappa: f64,
    pub kappa_clamped: bool,
}

impl LayerConstants {
    pub fn new(data: &ScatteringData, case: Case) -> Result<LayerConstants> {
        let phi0 = phi0(data, case)?;
        let kappa_raw = kappa_raw(data, case)?;
        let (kappa, kappa_clamped) = clamp_kappa(kappa_raw)?;
        Ok(LayerConstants {
            case,
            alpha: alpha_infty(data, case),
            t_infinity: data.t_infinity(case),
            phi0,
            kappa_raw,
            kappa,
            kappa_clamped,
        })
    }

    /// |e^{iα} − T(∞)²|.
    pub fn phase_identity_defect(&self) -> f64 {
        (C64::from_polar(1.0, self.alpha) - self.t_infinity * self.t_infinity).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPrediction {
    pub case: Case,
    pub x: f64,
    pub t: f64,
    pub xi: f64,
    pub s: f64,
    pub tau: f64,
    pub alpha: f64,
    pub phi0: f64,
    pub u: f64,
    pub tail: f64,
    pub beta: C64,
    pub q_pred: C64,
    pub error_exponent: f64,
}

/// The layer constants together with the Painlevé table for κ.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    pub constants: LayerConstants,
    pub table: PainleveTable,
}

impl TransitionModel {
    pub fn new(data: &ScatteringData, case: Case, cfg: &PainleveConfig) -> Result<TransitionModel> {
        let constants = LayerConstants::new(data, case)?;
        let table = solve_pii(constants.kappa, cfg)?;
        Ok(TransitionModel { constants, table })
    }

    pub fn from_parts(constants: LayerConstants, table: PainleveTable) -> Result<TransitionModel> {
        if (table.kappa - constants.kappa).abs() > 1e-15 {
            return Err(domain("Painlevé table built for a different κ"));
        }
        Ok(TransitionModel { constants, table })
    }

    /// Prediction at (x, t); (x, t) must lie in this layer's wedge for the
    /// wedge constant `c`.
    pub fn predict(&self, x: f64, t: f64, c: f64) -> Result<AsymptoticPrediction> {
        let case = self.constants.case;
        match classify_region(x, t, c)? {
            Region::Transition(k) if k == case => {}
            other => {
                return Err(domain(format!("(x, t) = ({x}, {t}) lies in {other:?}, outside the {} layer", case.label())))
            }
        }
        let sc = scaled_vars(x, t, case)?;
        let (u, _) = self.table.eval(sc.s)?;
        let tail = self.table.tail_integral(sc.s)?;
        let phi0 = self.constants.phi0.value;
        let beta = beta_from(case, u, tail, phi0);
        let alpha = self.constants.alpha;
        let q_pred = C64::from_polar(1.0, alpha) * (beta * sc.tau.powf(-1.0 / 3.0) + 1.0);
        Ok(AsymptoticPrediction {
            case,
            x,
            t,
            xi: sc.xi,
            s: sc.s,
            tau: sc.tau,
            alpha,
            phi0,
            u,
            tail,
            beta,
            q_pred,
            error_exponent: ERROR_EXPONENT,
        })
    }
}
