//! Run configuration, read from TOML. Unknown keys are rejected everywhere.

use crate::error::{LabError, LabResult};
use dnls_core::painleve::PainleveConfig;
use dnls_core::phase::Case;
use dnls_core::scattering::{InitialDatum, NuSettings, ScatteringSettings, SpectrumSettings};
use dnls_core::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatumKind {
    /// q₀ = tanh x.
    Tanh,
    /// q₀ = tanh x + a exp(−(x/w)²).
    Gaussian,
    /// q₀ = tanh x + a sech²(x/w).
    Sech2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatumConfig {
    pub kind: DatumKind,
    pub amplitude: f64,
    pub width: f64,
    /// The scattering grid covers [−half_width, half_width].
    pub half_width: f64,
    pub dx: f64,
}

impl Default for DatumConfig {
    fn default() -> Self {
        DatumConfig { kind: DatumKind::Gaussian, amplitude: 0.3, width: 1.0, half_width: 20.0, dx: 0.005 }
    }
}

impl DatumConfig {
    pub fn eval(&self, x: f64) -> C64 {
        let y = x / self.width;
        let bump = match self.kind {
            DatumKind::Tanh => 0.0,
            DatumKind::Gaussian => self.amplitude * (-y * y).exp(),
            DatumKind::Sech2 => self.amplitude / y.cosh().powi(2),
        };
        C64::new(x.tanh() + bump, 0.0)
    }

    pub fn describe(&self) -> String {
        match self.kind {
            DatumKind::Tanh => "tanh(x)".into(),
            DatumKind::Gaussian => format!("tanh(x) + {}*exp(-(x/{})^2)", self.amplitude, self.width),
            DatumKind::Sech2 => format!("tanh(x) + {}*sech^2(x/{})", self.amplitude, self.width),
        }
    }

    pub fn sample(&self) -> LabResult<InitialDatum> {
        let d = *self;
        Ok(InitialDatum::sample(move |x| d.eval(x), self.half_width, self.dx)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatteringConfig {
    pub nu_cutoff: f64,
    pub nu_abs_tol: f64,
    pub nu_max_panels: usize,
    pub nu_batch: usize,
    pub arc_nodes: usize,
    pub generic_threshold: f64,
    pub edge_delta: f64,
    pub chi_radius: f64,
}

impl Default for ScatteringConfig {
    fn default() -> Self {
        let s = ScatteringSettings::default();
        ScatteringConfig {
            nu_cutoff: s.nu.cutoff,
            nu_abs_tol: s.nu.abs_tol,
            nu_max_panels: s.nu.max_panels,
            nu_batch: s.nu.batch,
            arc_nodes: s.spectrum.arc_nodes,
            generic_threshold: s.generic_threshold,
            edge_delta: s.edge_delta,
            chi_radius: s.chi_radius,
        }
    }
}

impl ScatteringConfig {
    pub fn settings(&self) -> ScatteringSettings {
        ScatteringSettings {
            spectrum: SpectrumSettings { arc_nodes: self.arc_nodes, ..SpectrumSettings::default() },
            nu: NuSettings {
                cutoff: self.nu_cutoff,
                abs_tol: self.nu_abs_tol,
                max_panels: self.nu_max_panels,
                batch: self.nu_batch,
                ..NuSettings::default()
            },
            generic_threshold: self.generic_threshold,
            edge_delta: self.edge_delta,
            chi_radius: self.chi_radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PainleveSection {
    pub s_max: f64,
    pub s_min: f64,
    pub s_min_hm: f64,
    pub spacing: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for PainleveSection {
    fn default() -> Self {
        let c = PainleveConfig::default();
        PainleveSection { s_max: c.s_max, s_min: c.s_min, s_min_hm: c.s_min_hm, spacing: c.spacing, rtol: c.rtol, atol: c.atol }
    }
}

impl PainleveSection {
    pub fn config(&self) -> PainleveConfig {
        PainleveConfig {
            s_max: self.s_max,
            s_min: self.s_min,
            s_min_hm: self.s_min_hm,
            spacing: self.spacing,
            rtol: self.rtol,
            atol: self.atol,
            ..PainleveConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolverSection {
    /// Largest |ξ| of radiation the box must hold; when absent it is
    /// chosen from the measured decay of |r|.
    pub radiation_speed: Option<f64>,
    pub margin: f64,
    pub dt: f64,
    pub dx_max: f64,
    pub leakage_threshold: f64,
    pub alias_threshold: f64,
    pub edge_width: f64,
}

impl Default for EvolverSection {
    fn default() -> Self {
        EvolverSection {
            radiation_speed: None,
            margin: 40.0,
            dt: 4e-3,
            dx_max: 0.08,
            leakage_threshold: 1e-7,
            alias_threshold: 1e-6,
            edge_width: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub phase_identity: f64,
    pub unitarity: f64,
    /// Errors below this are at the solver floor; exponent fits that reach
    /// it are flagged inconclusive.
    pub error_floor: f64,
    pub exponent_band: [f64; 2],
    pub final_error: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { phase_identity: 1e-8, unitarity: 1e-6, error_floor: 1e-6, exponent_band: [-0.9, -0.25], final_error: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SignatureSection {
    pub samples_per_xi: usize,
    pub xi_values: [f64; 4],
    pub random_xi: usize,
    pub transition_points: usize,
    pub remainder_times: [f64; 4],
    /// Opening angle of the sectors.
    pub phi: f64,
}

impl Default for SignatureSection {
    fn default() -> Self {
        SignatureSection {
            samples_per_xi: 1000,
            xi_values: [-1.01, -1.001, 1.001, 1.01],
            random_xi: 1000,
            transition_points: 100,
            remainder_times: [100.0, 200.0, 400.0, 800.0],
            phi: std::f64::consts::PI / 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub datum: DatumConfig,
    pub scattering: ScatteringConfig,
    pub painleve: PainleveSection,
    pub evolver: EvolverSection,
    pub tolerances: Tolerances,
    pub signature: SignatureSection,
    /// Wedge constant C of the transition regions |ξ ∓ 1| t^{2/3} ≤ C.
    pub region_c: f64,
    pub s_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub cases: Vec<String>,
    pub out_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            datum: DatumConfig::default(),
            scattering: ScatteringConfig::default(),
            painleve: PainleveSection::default(),
            evolver: EvolverSection::default(),
            tolerances: Tolerances::default(),
            signature: SignatureSection::default(),
            region_c: 2.0,
            s_values: vec![0.0],
            t_values: vec![40.0, 80.0, 160.0],
            cases: vec!["minus1".into(), "plus1".into()],
            out_dir: "out".into(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> LabError {
    LabError::Validation(msg.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> LabResult<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> LabResult<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::from_toml(&text)
    }

    pub fn validate(&self) -> LabResult<()> {
        let d = &self.datum;
        if !(d.half_width > 0.0 && d.dx > 0.0 && d.dx < d.half_width && d.width > 0.0 && d.amplitude.is_finite()) {
            return Err(invalid("datum: need half_width > dx > 0, width > 0 and a finite amplitude"));
        }
        self.scattering.settings().nu.validate()?;
        self.painleve.config().validate()?;
        let e = &self.evolver;
        if !(e.margin > e.edge_width && e.edge_width > 0.0 && e.dt > 0.0 && e.dx_max > 0.0 && e.leakage_threshold > 0.0) {
            return Err(invalid("evolver: need margin > edge_width > 0 and positive dt, dx_max, leakage_threshold"));
        }
        if let Some(v) = e.radiation_speed {
            if !(v >= 1.0) {
                return Err(invalid("evolver: radiation_speed must be at least 1"));
            }
        }
        if !(self.region_c > 0.0) {
            return Err(invalid("region_c must be positive"));
        }
        if self.s_values.is_empty() || self.s_values.iter().any(|s| !s.is_finite()) {
            return Err(invalid("s_values must be a non-empty list of finite numbers"));
        }
        if self.t_values.is_empty() || self.t_values.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(invalid("t_values must be a non-empty list of positive times"));
        }
        if self.t_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("t_values must be strictly increasing"));
        }
        self.case_list()?;
        let t = &self.tolerances;
        if !(t.exponent_band[0] < t.exponent_band[1]) || !(t.error_floor > 0.0) {
            return Err(invalid("tolerances: need an ordered exponent band and a positive error floor"));
        }
        let s = &self.signature;
        if !(s.phi > 0.0 && s.phi < std::f64::consts::FRAC_PI_4) || s.xi_values.iter().any(|x| !(x.abs() > 1.0)) {
            return Err(invalid("signature: need 0 < phi < π/4 and |ξ| > 1"));
        }
        Ok(())
    }

    pub fn case_list(&self) -> LabResult<Vec<Case>> {
        if self.cases.is_empty() {
            return Err(invalid("cases must not be empty"));
        }
        self.cases
            .iter()
            .map(|c| Case::from_label(c).ok_or_else(|| invalid(format!("unknown case {c:?} (expected minus1 or plus1)"))))
            .collect()
    }

    /// SHA-256 of the canonical JSON form of the parsed configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = RunConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash(), back.hash());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("region_c = 2.0\nbogus = 1\n").is_err());
        assert!(RunConfig::from_toml("[datum]\nkind = \"tanh\"\nextra = 3\n").is_err());
        assert!(RunConfig::from_toml("[datum]\nkind = \"square\"\n").is_err());
    }

    #[test]
    fn partial_config_fills_defaults() {
        let cfg = RunConfig::from_toml("t_values = [10.0, 20.0, 40.0]\n[datum]\nkind = \"sech2\"\namplitude = 0.2\n").unwrap();
        assert_eq!(cfg.datum.kind, DatumKind::Sech2);
        assert_eq!(cfg.datum.half_width, 20.0);
        assert_eq!(cfg.t_values.len(), 3);
        assert_ne!(cfg.hash(), RunConfig::default().hash());
    }

    #[test]
    fn validation_catches_bad_lists() {
        assert!(RunConfig::from_toml("t_values = [80.0, 40.0]\n").is_err());
        assert!(RunConfig::from_toml("cases = [\"zero\"]\n").is_err());
        assert!(RunConfig::from_toml("s_values = []\n").is_err());
    }

    #[test]
    fn datum_kinds() {
        let mut d = DatumConfig { kind: DatumKind::Tanh, ..DatumConfig::default() };
        assert_eq!(d.eval(0.7).re, 0.7f64.tanh());
        d.kind = DatumKind::Sech2;
        assert!((d.eval(0.0).re - 0.3).abs() < 1e-15);
    }
}
