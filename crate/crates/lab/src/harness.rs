//! Prediction batches and the comparison of predictions against direct
//! evolution.

use crate::config::{EvolverSection, RunConfig};
use crate::error::{LabError, LabResult};
use crate::evolver::{smooth_size, Diagnostics, EvolutionState, Evolver, EvolverParams};
use crate::formats::{PredictionRow, Provenance};
use crate::scatter::radiation_speed;
use dnls_core::asymptotics::{beta_from, TransitionModel};
use dnls_core::phase::{classify_region, x_for_s, Case, Region};
use dnls_core::scattering::{JostSolver, ScatteringData};
use dnls_core::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "dnls-compare/1";

/// Reading of the leading term being tested. The stated formula is
/// e^{iα}(1 + τ^{−1/3}β); the variants flip the sign of α and/or of the
/// Airy matching constant κ (equivalently of u).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Stated,
    AlphaConjugate,
    KappaFlipped,
    AlphaConjugateKappaFlipped,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 4] =
        [Hypothesis::Stated, Hypothesis::AlphaConjugate, Hypothesis::KappaFlipped, Hypothesis::AlphaConjugateKappaFlipped];

    pub fn label(self) -> &'static str {
        match self {
            Hypothesis::Stated => "stated",
            Hypothesis::AlphaConjugate => "alpha_conjugate",
            Hypothesis::KappaFlipped => "kappa_flipped",
            Hypothesis::AlphaConjugateKappaFlipped => "alpha_conjugate_kappa_flipped",
        }
    }

    fn alpha_sign(self) -> f64 {
        match self {
            Hypothesis::Stated | Hypothesis::KappaFlipped => 1.0,
            _ => -1.0,
        }
    }

    fn u_sign(self) -> f64 {
        match self {
            Hypothesis::Stated | Hypothesis::AlphaConjugate => 1.0,
            _ => -1.0,
        }
    }
}

/// Leading-order value at (x, t) under a hypothesis.
pub fn hypothesis_value(model: &TransitionModel, x: f64, t: f64, c: f64, h: Hypothesis) -> LabResult<C64> {
    let p = model.predict(x, t, c)?;
    let beta = beta_from(p.case, h.u_sign() * p.u, p.tail, p.phi0);
    Ok(C64::from_polar(1.0, h.alpha_sign() * p.alpha) * (beta * p.tau.powf(-1.0 / 3.0) + 1.0))
}

/// Prediction rows for the (s, t) grid of the config plus explicit (x, t)
/// points; points outside the layer are flagged rather than computed.
pub fn prediction_rows(model: &TransitionModel, cfg: &RunConfig, points: &[(f64, f64)]) -> LabResult<Vec<PredictionRow>> {
    let case = model.constants.case;
    let defect = model.constants.phase_identity_defect();
    let mut xt = Vec::new();
    for &t in &cfg.t_values {
        for &s in &cfg.s_values {
            xt.push((x_for_s(s, t, case)?, t));
        }
    }
    xt.extend_from_slice(points);
    xt.iter()
        .map(|&(x, t)| {
            if !(t > 0.0) {
                return Ok(PredictionRow { x, t, prediction: None, phase_identity_defect: defect, status: "invalid_time".into() });
            }
            match classify_region(x, t, cfg.region_c)? {
                Region::Transition(c) if c == case => {}
                other => {
                    return Ok(PredictionRow {
                        x,
                        t,
                        prediction: None,
                        phase_identity_defect: defect,
                        status: format!("out_of_region:{}", region_label(other)),
                    })
                }
            }
            let p = model.predict(x, t, cfg.region_c)?;
            Ok(PredictionRow { x, t, prediction: Some(p), phase_identity_defect: defect, status: "ok".into() })
        })
        .collect()
}

pub fn region_label(r: Region) -> String {
    match r {
        Region::Solitonic => "solitonic".into(),
        Region::Solitonless => "solitonless".into(),
        Region::Transition(c) => format!("transition_{}", c.label()),
    }
}

/// Evolver parameters for a run to `t_end`: a box of half-length
/// 2·speed·t_end + margin and the smallest fast FFT size with dx ≤ dx_max.
pub fn evolver_params(section: &EvolverSection, t_end: f64, speed: f64) -> EvolverParams {
    let half_length = 2.0 * speed * t_end + section.margin;
    let n = smooth_size((2.0 * half_length / section.dx_max).ceil() as usize);
    EvolverParams {
        half_length,
        n,
        dt: section.dt,
        leakage_threshold: section.leakage_threshold,
        alias_threshold: section.alias_threshold,
        edge_width: section.edge_width,
        ..EvolverParams::default()
    }
}

pub fn choose_speed(cfg: &RunConfig, solver: &JostSolver, t_end: f64) -> LabResult<f64> {
    match cfg.evolver.radiation_speed {
        Some(v) => Ok(v),
        None => radiation_speed(solver, t_end, cfg.evolver.leakage_threshold),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisError {
    pub hypothesis: Hypothesis,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub case: String,
    pub s: f64,
    pub t: f64,
    pub x: f64,
    pub q_num: [f64; 2],
    pub q_pred: [f64; 2],
    /// |q_num − q_pred| for the stated formula.
    pub error: f64,
    /// min over a global phase: ||q_num| − |q_pred||.
    pub phase_aligned_error: f64,
    pub hypotheses: Vec<HypothesisError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub case: String,
    pub s: f64,
    pub hypothesis: Hypothesis,
    pub t: Vec<f64>,
    pub errors: Vec<f64>,
    pub exponent: f64,
    pub strictly_decreasing: bool,
    /// e(t_{k+1})/e(t_k).
    pub ratios: Vec<f64>,
    /// Some error sits at the solver floor, so the slope says little.
    pub inconclusive: bool,
}

/// Least-squares slope of log e against log t.
pub fn fit_exponent(t: &[f64], e: &[f64]) -> LabResult<f64> {
    if t.len() < 3 || t.len() != e.len() {
        return Err(LabError::Validation("an exponent fit needs at least three (t, e) points".into()));
    }
    if e.iter().chain(t).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(LabError::Numerical("exponent fit needs positive finite data".into()));
    }
    let n = t.len() as f64;
    let lx: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSummary {
    pub case: String,
    pub alpha_inf: f64,
    pub phi0: f64,
    pub phi0_single_g: Option<f64>,
    pub kappa_raw: f64,
    pub kappa: f64,
    pub kappa_clamped: bool,
    pub t_infinity: [f64; 2],
    pub phase_identity_defect: f64,
}

impl LayerSummary {
    pub fn new(model: &TransitionModel) -> LayerSummary {
        let c = &model.constants;
        LayerSummary {
            case: c.case.label().into(),
            alpha_inf: c.alpha,
            phi0: c.phi0.value,
            phi0_single_g: c.phi0.single_g,
            kappa_raw: c.kappa_raw,
            kappa: c.kappa,
            kappa_clamped: c.kappa_clamped,
            t_infinity: [c.t_infinity.re, c.t_infinity.im],
            phase_identity_defect: c.phase_identity_defect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub case: String,
    pub s: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema: String,
    pub provenance: Provenance,
    pub config: RunConfig,
    pub evolver: EvolverParams,
    pub radiation_speed: f64,
    pub layers: Vec<LayerSummary>,
    pub cells: Vec<Cell>,
    pub skipped: Vec<SkippedCell>,
    pub fits: Vec<ExponentFit>,
    pub final_diagnostics: Diagnostics,
    pub mass_drift: f64,
}

impl ComparisonReport {
    pub fn fit(&self, case: Case, s: f64, h: Hypothesis) -> Option<&ExponentFit> {
        self.fits.iter().find(|f| f.case == case.label() && f.s == s && f.hypothesis == h)
    }

    /// Headline verdict for one fit: strictly decreasing, exponent inside
    /// the band and final error below the bound.
    pub fn passes(&self, fit: &ExponentFit) -> bool {
        let tol = &self.config.tolerances;
        fit.strictly_decreasing
            && fit.exponent >= tol.exponent_band[0]
            && fit.exponent <= tol.exponent_band[1]
            && fit.errors.last().is_some_and(|&e| e < tol.final_error)
    }

    /// Plot-ready CSV: one row per cell.
    pub fn cells_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# dnls comparison cells\n# config_hash = {}\n", self.provenance.config_hash));
        let mut cols = vec!["case", "s", "t", "x", "re_q_num", "im_q_num", "re_q_pred", "im_q_pred", "error", "phase_aligned_error"];
        for h in Hypothesis::ALL {
            cols.push(h.label());
        }
        out.push_str(&cols.join(","));
        out.push('\n');
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}",
                c.case, c.s, c.t, c.x, c.q_num[0], c.q_num[1], c.q_pred[0], c.q_pred[1], c.error, c.phase_aligned_error
            ));
            for h in &c.hypotheses {
                out.push_str(&format!(",{}", h.error));
            }
            out.push('\n');
        }
        out
    }
}

/// Everything `compare` computes, before it is written out.
pub struct Comparison {
    pub report: ComparisonReport,
    pub states: Vec<EvolutionState>,
    pub evolver: Evolver,
}

pub fn compare(cfg: &RunConfig, solver: &JostSolver, data: &ScatteringData) -> LabResult<Comparison> {
    cfg.validate()?;
    if cfg.t_values.len() < 3 {
        return Err(LabError::Validation("compare needs at least three t values".into()));
    }
    let cases = cfg.case_list()?;
    let pcfg = cfg.painleve.config();
    let models: Vec<TransitionModel> =
        cases.iter().map(|&c| TransitionModel::new(data, c, &pcfg)).collect::<Result<_, _>>()?;
    let t_end = *cfg.t_values.last().unwrap();
    let speed = choose_speed(cfg, solver, t_end)?;
    let params = evolver_params(&cfg.evolver, t_end, speed);
    let mut evolver = Evolver::new(params)?;
    let datum = cfg.datum;
    let states = evolver.run(move |x| datum.eval(x), &cfg.t_values)?;

    let mut jobs = Vec::new();
    let mut skipped = Vec::new();
    for m in &models {
        for &s in &cfg.s_values {
            if s < 0.0 && m.constants.kappa.abs() >= 0.999 {
                skipped.push(SkippedCell {
                    case: m.constants.case.label().into(),
                    s,
                    reason: format!("negative s needs |kappa| < 0.999, measured {}", m.constants.kappa.abs()),
                });
                continue;
            }
            for st in &states {
                jobs.push((m, s, st));
            }
        }
    }
    let cells: Vec<Cell> = jobs
        .par_iter()
        .map(|&(m, s, st)| -> LabResult<Cell> {
            let case = m.constants.case;
            let x = x_for_s(s, st.t, case)?;
            let q_num = evolver.sample_field(st, x)?;
            let mut hyps = Vec::with_capacity(4);
            for h in Hypothesis::ALL {
                let q = hypothesis_value(m, x, st.t, cfg.region_c, h)?;
                hyps.push(HypothesisError { hypothesis: h, error: (q_num - q).norm() });
            }
            let q_pred = m.predict(x, st.t, cfg.region_c)?.q_pred;
            Ok(Cell {
                case: case.label().into(),
                s,
                t: st.t,
                x,
                q_num: [q_num.re, q_num.im],
                q_pred: [q_pred.re, q_pred.im],
                error: (q_num - q_pred).norm(),
                phase_aligned_error: (q_num.norm() - q_pred.norm()).abs(),
                hypotheses: hyps,
            })
        })
        .collect::<LabResult<_>>()?;

    let mut fits = Vec::new();
    for m in &models {
        let label = m.constants.case.label();
        for &s in &cfg.s_values {
            let row: Vec<&Cell> = cells.iter().filter(|c| c.case == label && c.s == s).collect();
            if row.is_empty() {
                continue;
            }
            let t: Vec<f64> = row.iter().map(|c| c.t).collect();
            for h in Hypothesis::ALL {
                let e: Vec<f64> =
                    row.iter().map(|c| c.hypotheses.iter().find(|x| x.hypothesis == h).map(|x| x.error).unwrap()).collect();
                fits.push(ExponentFit {
                    case: label.into(),
                    s,
                    hypothesis: h,
                    exponent: fit_exponent(&t, &e)?,
                    strictly_decreasing: e.windows(2).all(|w| w[1] < w[0]),
                    ratios: e.windows(2).map(|w| w[1] / w[0]).collect(),
                    inconclusive: e.iter().any(|&v| v < cfg.tolerances.error_floor),
                    t: t.clone(),
                    errors: e,
                });
            }
        }
    }
    let last = states.last().unwrap();
    let d0 = last.diagnostics[0];
    let dn = *last.diagnostics.last().unwrap();
    let report = ComparisonReport {
        schema: REPORT_SCHEMA.into(),
        provenance: Provenance::new(&cfg.hash(), &cfg.datum.describe()),
        config: cfg.clone(),
        evolver: params,
        radiation_speed: speed,
        layers: models.iter().map(LayerSummary::new).collect(),
        cells,
        skipped,
        fits,
        final_diagnostics: dn,
        mass_drift: (dn.mass - d0.mass).abs(),
    };
    Ok(Comparison { report, states, evolver })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_of_a_power_law() {
        let t = [40.0, 80.0, 160.0];
        let e: Vec<f64> = t.iter().map(|v: &f64| 3.0 * v.powf(-0.5)).collect();
        assert!((fit_exponent(&t, &e).unwrap() + 0.5).abs() < 1e-12);
        assert!(fit_exponent(&t[..2], &e[..2]).is_err());
        assert!(fit_exponent(&t, &[1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn sizing_policy() {
        let p = evolver_params(&EvolverSection::default(), 160.0, 10.0);
        assert_eq!(p.half_length, 3240.0);
        assert!(p.dx() <= 0.08);
        assert_eq!(p.n, 81000);
    }
}
