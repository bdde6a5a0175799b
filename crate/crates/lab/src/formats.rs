//! On-disk formats: scattering data (JSON), Painlevé tables, predictions,
//! snapshots and diagnostics (CSV with `#` comment headers).
//!
//! Floats are written in Rust's shortest round-trip form, so every format
//! reproduces its doubles exactly when read back.

use crate::error::{LabError, LabResult};
use crate::evolver::{Diagnostics, EvolutionState, Evolver};
use dnls_core::airy::ai;
use dnls_core::asymptotics::AsymptoticPrediction;
use dnls_core::painleve::{PainleveConfig, PainleveTable};
use dnls_core::scattering::nu::NuPanel;
use dnls_core::scattering::{
    DiscreteEigenvalue, EdgeData, GridInfo, NuSettings, NuTable, ScatteringData, ScatteringSettings, SpectrumSettings,
};
use dnls_core::C64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

pub const SCATTERING_SCHEMA: &str = "dnls-scattering/1";

/// Where a file came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub datum: String,
}

impl Provenance {
    pub fn new(config_hash: &str, datum: &str) -> Provenance {
        Provenance {
            tool: "dnls".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config_hash.into(),
            datum: datum.into(),
        }
    }
}

type Cx = [f64; 2];

fn cx(z: C64) -> Cx {
    [z.re, z.im]
}

fn uncx(v: Cx) -> C64 {
    C64::new(v[0], v[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumRecord {
    arc_nodes: usize,
    exclusion: f64,
    threshold: f64,
    cauchy_radius: f64,
    cauchy_nodes: usize,
    newton_tol: f64,
    max_newton: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NuRecord {
    cutoff: f64,
    core: f64,
    core_width: f64,
    outer_width: f64,
    abs_tol: f64,
    max_panels: usize,
    batch: usize,
    subtract_below: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SettingsRecord {
    spectrum: SpectrumRecord,
    nu: NuRecord,
    generic_threshold: f64,
    edge_delta: f64,
    chi_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRecord {
    x0: f64,
    dx: f64,
    n: usize,
    x_match: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EigenRecord {
    z: Cx,
    norming: Cx,
    b: Cx,
    s11_prime: Cx,
    residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PanelRecord {
    a: f64,
    b: f64,
    big_s11: Vec<Cx>,
    big_s21: Vec<Cx>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    z: f64,
    big_s11: Cx,
    big_s21: Cx,
    generic: bool,
    r_limit: Cx,
}

/// Derived quantities stored for inspection only; they are recomputed, not
/// trusted, on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringSummary {
    pub nu_moment: f64,
    pub table_error: f64,
    pub panels: usize,
    pub r_minus_one: Cx,
    pub r_plus_one: Cx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringFile {
    pub schema: String,
    pub provenance: Provenance,
    settings: SettingsRecord,
    grid: GridRecord,
    discrete: Vec<EigenRecord>,
    table_error: f64,
    panels: Vec<PanelRecord>,
    edges: Vec<EdgeRecord>,
    pub summary: ScatteringSummary,
}

impl ScatteringFile {
    pub fn from_data(data: &ScatteringData, provenance: Provenance) -> ScatteringFile {
        let s = &data.settings;
        let sp = &s.spectrum;
        let nu = &s.nu;
        ScatteringFile {
            schema: SCATTERING_SCHEMA.into(),
            provenance,
            settings: SettingsRecord {
                spectrum: SpectrumRecord {
                    arc_nodes: sp.arc_nodes,
                    exclusion: sp.exclusion,
                    threshold: sp.threshold,
                    cauchy_radius: sp.cauchy_radius,
                    cauchy_nodes: sp.cauchy_nodes,
                    newton_tol: sp.newton_tol,
                    max_newton: sp.max_newton,
                },
                nu: NuRecord {
                    cutoff: nu.cutoff,
                    core: nu.core,
                    core_width: nu.core_width,
                    outer_width: nu.outer_width,
                    abs_tol: nu.abs_tol,
                    max_panels: nu.max_panels,
                    batch: nu.batch,
                    subtract_below: nu.subtract_below,
                },
                generic_threshold: s.generic_threshold,
                edge_delta: s.edge_delta,
                chi_radius: s.chi_radius,
            },
            grid: GridRecord { x0: data.grid.x0, dx: data.grid.dx, n: data.grid.n, x_match: data.grid.x_match },
            discrete: data
                .discrete
                .iter()
                .map(|e| EigenRecord {
                    z: cx(e.z),
                    norming: cx(e.norming),
                    b: cx(e.b),
                    s11_prime: cx(e.s11_prime),
                    residual: e.residual,
                })
                .collect(),
            table_error: data.table.error,
            panels: data
                .table
                .panels
                .iter()
                .map(|p| PanelRecord {
                    a: p.a,
                    b: p.b,
                    big_s11: p.big_s11.iter().map(|&z| cx(z)).collect(),
                    big_s21: p.big_s21.iter().map(|&z| cx(z)).collect(),
                })
                .collect(),
            edges: data
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    z: e.z,
                    big_s11: cx(e.big_s11),
                    big_s21: cx(e.big_s21),
                    generic: e.generic,
                    r_limit: cx(e.r_limit),
                })
                .collect(),
            summary: ScatteringSummary {
                nu_moment: data.nu_moment(),
                table_error: data.table.error,
                panels: data.table.panels.len(),
                r_minus_one: cx(data.edges[0].r_limit),
                r_plus_one: cx(data.edges[1].r_limit),
            },
        }
    }

    pub fn to_data(&self) -> LabResult<ScatteringData> {
        if self.schema != SCATTERING_SCHEMA {
            return Err(LabError::Validation(format!("unsupported scattering schema {:?}", self.schema)));
        }
        let r = &self.settings;
        let settings = ScatteringSettings {
            spectrum: SpectrumSettings {
                arc_nodes: r.spectrum.arc_nodes,
                exclusion: r.spectrum.exclusion,
                threshold: r.spectrum.threshold,
                cauchy_radius: r.spectrum.cauchy_radius,
                cauchy_nodes: r.spectrum.cauchy_nodes,
                newton_tol: r.spectrum.newton_tol,
                max_newton: r.spectrum.max_newton,
            },
            nu: NuSettings {
                cutoff: r.nu.cutoff,
                core: r.nu.core,
                core_width: r.nu.core_width,
                outer_width: r.nu.outer_width,
                abs_tol: r.nu.abs_tol,
                max_panels: r.nu.max_panels,
                batch: r.nu.batch,
                subtract_below: r.nu.subtract_below,
            },
            generic_threshold: r.generic_threshold,
            edge_delta: r.edge_delta,
            chi_radius: r.chi_radius,
        };
        settings.nu.validate()?;
        let grid = GridInfo { x0: self.grid.x0, dx: self.grid.dx, n: self.grid.n, x_match: self.grid.x_match };
        let discrete = self
            .discrete
            .iter()
            .map(|e| DiscreteEigenvalue {
                z: uncx(e.z),
                norming: uncx(e.norming),
                b: uncx(e.b),
                s11_prime: uncx(e.s11_prime),
                residual: e.residual,
            })
            .collect();
        let mut panels = Vec::with_capacity(self.panels.len());
        for p in &self.panels {
            let to15 = |v: &[Cx]| -> LabResult<[C64; 15]> {
                if v.len() != 15 {
                    return Err(LabError::Validation("ν panel must hold 15 samples".into()));
                }
                Ok(std::array::from_fn(|j| uncx(v[j])))
            };
            panels.push(NuPanel { a: p.a, b: p.b, big_s11: to15(&p.big_s11)?, big_s21: to15(&p.big_s21)? });
        }
        if panels.windows(2).any(|w| w[0].b != w[1].a) {
            return Err(LabError::Validation("ν panels must tile the cutoff interval".into()));
        }
        let table = NuTable { settings: settings.nu, panels, error: self.table_error };
        if self.edges.len() != 2 {
            return Err(LabError::Validation("expected edge data at z = −1 and z = +1".into()));
        }
        let e = |r: &EdgeRecord| EdgeData {
            z: r.z,
            big_s11: uncx(r.big_s11),
            big_s21: uncx(r.big_s21),
            generic: r.generic,
            r_limit: uncx(r.r_limit),
        };
        Ok(ScatteringData::from_parts(settings, grid, discrete, table, [e(&self.edges[0]), e(&self.edges[1])])?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scattering file serializes")
    }

    pub fn from_json(text: &str) -> LabResult<ScatteringFile> {
        serde_json::from_str(text).map_err(|e| LabError::Validation(format!("scattering file: {e}")))
    }
}

pub fn write_scattering(path: &Path, data: &ScatteringData, provenance: Provenance) -> LabResult<()> {
    write_text(path, &ScatteringFile::from_data(data, provenance).to_json())
}

pub fn read_scattering(path: &Path) -> LabResult<(ScatteringData, Provenance)> {
    let f = ScatteringFile::from_json(&std::fs::read_to_string(path)?)?;
    Ok((f.to_data()?, f.provenance))
}

/// Write through a temporary file so readers never see a partial file.
pub fn write_text(path: &Path, text: &str) -> LabResult<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension("partial");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Header lines `# key = value` followed by the column line.
fn csv_header(out: &mut String, title: &str, meta: &[(&str, String)], columns: &[&str]) {
    let _ = writeln!(out, "# {title}");
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
    let _ = writeln!(out, "{}", columns.join(","));
}

/// Parsed CSV body: metadata from `# key = value` lines, the column names,
/// and the rows as strings.
pub struct CsvDoc {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn parse(text: &str) -> LabResult<CsvDoc> {
        let mut meta = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            if let Some(c) = line.strip_prefix('#') {
                if let Some((k, v)) = c.split_once('=') {
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            match &columns {
                None => columns = Some(fields),
                Some(c) => {
                    if fields.len() != c.len() {
                        return Err(LabError::Validation(format!("row with {} fields, expected {}", fields.len(), c.len())));
                    }
                    rows.push(fields)
                }
            }
        }
        let columns = columns.ok_or_else(|| LabError::Validation("CSV without a column line".into()))?;
        Ok(CsvDoc { meta, columns, rows })
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn meta_f64(&self, key: &str) -> LabResult<f64> {
        self.meta(key)
            .ok_or_else(|| LabError::Validation(format!("missing header field {key}")))?
            .parse()
            .map_err(|_| LabError::Validation(format!("header field {key} is not a number")))
    }

    pub fn column(&self, name: &str) -> LabResult<Vec<f64>> {
        let j = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| LabError::Validation(format!("missing column {name}")))?;
        self.rows
            .iter()
            .map(|r| r[j].parse().map_err(|_| LabError::Validation(format!("bad number {:?} in column {name}", r[j]))))
            .collect()
    }
}

/// Largest |u/(κ Ai) − 1| on s ∈ [5, 9] (zero for κ = 0).
pub fn airy_check(table: &PainleveTable) -> f64 {
    if table.kappa == 0.0 {
        return 0.0;
    }
    table
        .s
        .iter()
        .zip(&table.u)
        .filter(|(s, _)| **s >= 5.0 && **s <= 9.0)
        .map(|(&s, &u)| (u / (table.kappa * ai(s)) - 1.0).abs())
        .fold(0.0, f64::max)
}

pub const AIRY_CHECK_TOL: f64 = 1e-3;

pub fn painleve_csv(table: &PainleveTable, config_hash: &str) -> String {
    let c = &table.config;
    let mut out = String::new();
    csv_header(
        &mut out,
        "dnls painleve table: u'' = 2u^3 + s u, u ~ kappa Ai(s) as s -> +inf; tail = int_s^inf u^2",
        &[
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("config_hash", config_hash.to_string()),
            ("kappa", table.kappa.to_string()),
            ("clamped", table.clamped.to_string()),
            ("s_max", c.s_max.to_string()),
            ("s_min", c.s_min.to_string()),
            ("s_min_hm", c.s_min_hm.to_string()),
            ("spacing", c.spacing.to_string()),
            ("rtol", c.rtol.to_string()),
            ("atol", c.atol.to_string()),
            ("growth_limit", c.growth_limit.to_string()),
            ("residual_max", table.residual_max().to_string()),
        ],
        &["s", "u", "u_prime", "tail"],
    );
    for i in 0..table.s.len() {
        let _ = writeln!(out, "{},{},{},{}", table.s[i], table.u[i], table.u_prime[i], table.tail[i]);
    }
    let dev = airy_check(table);
    let verdict = if dev < AIRY_CHECK_TOL { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "# airy_check = {dev}");
    let _ = writeln!(out, "# airy_check_status = {verdict} (max |u/(kappa Ai) - 1| on [5, 9], tolerance {AIRY_CHECK_TOL})");
    out
}

pub fn parse_painleve_csv(text: &str) -> LabResult<PainleveTable> {
    let doc = CsvDoc::parse(text)?;
    let f = |k: &str| doc.meta_f64(k);
    let config = PainleveConfig {
        s_max: f("s_max")?,
        s_min: f("s_min")?,
        s_min_hm: f("s_min_hm")?,
        spacing: f("spacing")?,
        rtol: f("rtol")?,
        atol: f("atol")?,
        growth_limit: f("growth_limit")?,
    };
    let clamped = doc.meta("clamped") == Some("true");
    let table = PainleveTable {
        kappa: f("kappa")?,
        clamped,
        config,
        s: doc.column("s")?,
        u: doc.column("u")?,
        u_prime: doc.column("u_prime")?,
        tail: doc.column("tail")?,
    };
    if table.s.len() < 2 || table.s.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LabError::Validation("Painlevé table grid must be increasing".into()));
    }
    Ok(table)
}

/// One row of a prediction batch; `prediction` is `None` for points
/// outside the layer, with the reason in `status`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub x: f64,
    pub t: f64,
    pub prediction: Option<AsymptoticPrediction>,
    pub phase_identity_defect: f64,
    pub status: String,
}

pub const PREDICTION_COLUMNS: [&str; 16] = [
    "x",
    "t",
    "xi",
    "s",
    "tau",
    "alpha_inf",
    "phi0",
    "re_beta",
    "im_beta",
    "re_q_pred",
    "im_q_pred",
    "u",
    "tail",
    "error_exponent",
    "phase_identity_defect",
    "status",
];

pub fn predictions_csv(case: &str, meta: &[(&str, String)], rows: &[PredictionRow]) -> String {
    let mut out = String::new();
    let mut all = vec![("case", case.to_string())];
    all.extend(meta.iter().cloned());
    csv_header(&mut out, "dnls transition-layer predictions q = e^{i alpha}(1 + tau^{-1/3} beta)", &all, &PREDICTION_COLUMNS);
    for r in rows {
        match &r.prediction {
            Some(p) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    p.x,
                    p.t,
                    p.xi,
                    p.s,
                    p.tau,
                    p.alpha,
                    p.phi0,
                    p.beta.re,
                    p.beta.im,
                    p.q_pred.re,
                    p.q_pred.im,
                    p.u,
                    p.tail,
                    p.error_exponent,
                    r.phase_identity_defect,
                    r.status
                );
            }
            None => {
                let _ = writeln!(out, "{},{},,,,,,,,,,,,,{},{}", r.x, r.t, r.phase_identity_defect, r.status.replace(',', ";"));
            }
        }
    }
    out
}

pub fn snapshot_csv(evolver: &Evolver, state: &EvolutionState, meta: &[(&str, String)]) -> String {
    let mut out = String::new();
    let mut all = vec![("t", state.t.to_string())];
    all.extend(meta.iter().cloned());
    csv_header(&mut out, "dnls field snapshot q = tanh(x) + w", &all, &["x", "re_q", "im_q"]);
    for (x, w) in evolver.grid().iter().zip(&state.w) {
        let q = w + x.tanh();
        let _ = writeln!(out, "{x},{},{}", q.re, q.im);
    }
    out
}

pub fn diagnostics_csv(diagnostics: &[Diagnostics], meta: &[(&str, String)]) -> String {
    let mut out = String::new();
    csv_header(&mut out, "dnls evolution diagnostics", meta, &["t", "mass", "energy", "leakage"]);
    for d in diagnostics {
        let _ = writeln!(out, "{},{},{},{}", d.t, d.mass, d.energy, d.leakage);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use dnls_core::painleve::solve_pii;

    #[test]
    fn painleve_table_round_trip() {
        let t = solve_pii(0.5, &PainleveConfig::default()).unwrap();
        let text = painleve_csv(&t, "abc");
        assert!(text.contains("airy_check_status = PASS"));
        let back = parse_painleve_csv(&text).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        assert!(CsvDoc::parse("a,b\n1,2\n3\n").is_err());
        assert!(CsvDoc::parse("# only = comments\n").is_err());
    }

    #[test]
    fn diagnostics_round_trip() {
        let d = [Diagnostics { t: 0.5, mass: -2.0, energy: 8.0 / 3.0, leakage: 1e-17 }];
        let doc = CsvDoc::parse(&diagnostics_csv(&d, &[("config_hash", "x".into())])).unwrap();
        assert_eq!(doc.column("energy").unwrap(), vec![8.0 / 3.0]);
        assert_eq!(doc.meta("config_hash"), Some("x"));
    }
}
