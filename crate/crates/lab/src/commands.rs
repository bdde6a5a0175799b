//! The subcommands of the `dnls` tool. Each one reads a config, computes,
//! writes its artifacts under the output directory and returns a short
//! human-readable summary.

use crate::config::RunConfig;
use crate::error::{LabError, LabResult};
use crate::evolver::Evolver;
use crate::formats::{
    airy_check, diagnostics_csv, painleve_csv, predictions_csv, read_scattering, snapshot_csv, write_scattering, write_text,
    Provenance, AIRY_CHECK_TOL,
};
use crate::harness::{choose_speed, compare, evolver_params, prediction_rows, Hypothesis};
use crate::scatter::build_parallel;
use crate::signature::run_signature;
use dnls_core::asymptotics::TransitionModel;
use dnls_core::painleve::solve_pii;
use dnls_core::scattering::{JostSolver, ScatteringData};
use std::path::{Path, PathBuf};

pub const SCATTERING_FILE: &str = "scattering.json";
pub const COMPARE_REPORT: &str = "compare_report.json";
pub const COMPARE_CELLS: &str = "compare_cells.csv";
pub const SIGNATURE_REPORT: &str = "signature.json";

fn solver_for(cfg: &RunConfig) -> LabResult<JostSolver> {
    Ok(JostSolver::new(cfg.datum.sample()?))
}

fn tolerance_meta(cfg: &RunConfig) -> Vec<(&'static str, String)> {
    let t = &cfg.tolerances;
    vec![
        ("config_hash", cfg.hash()),
        ("version", env!("CARGO_PKG_VERSION").to_string()),
        ("datum", cfg.datum.describe()),
        ("tol_phase_identity", t.phase_identity.to_string()),
        ("tol_unitarity", t.unitarity.to_string()),
        ("tol_error_floor", t.error_floor.to_string()),
    ]
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn scatter(cfg: &RunConfig, out: &Path) -> LabResult<(ScatteringData, PathBuf)> {
    cfg.validate()?;
    let solver = solver_for(cfg)?;
    let data = build_parallel(&solver, cfg.scattering.settings())?;
    let path = out.join(SCATTERING_FILE);
    write_scattering(&path, &data, Provenance::new(&cfg.hash(), &cfg.datum.describe()))?;
    Ok((data, path))
}

pub fn painleve(cfg: &RunConfig, kappa: f64, s_min: Option<f64>, s_max: Option<f64>, out: &Path) -> LabResult<PathBuf> {
    cfg.validate()?;
    let mut pc = cfg.painleve.config();
    if let Some(v) = s_min {
        pc.s_min = v;
        pc.s_min_hm = pc.s_min_hm.max(v);
    }
    if let Some(v) = s_max {
        pc.s_max = v;
    }
    let table = solve_pii(kappa, &pc)?;
    let path = out.join(format!("painleve_kappa_{kappa}.csv"));
    write_text(&path, &painleve_csv(&table, &cfg.hash()))?;
    let dev = airy_check(&table);
    if dev > AIRY_CHECK_TOL {
        return Err(LabError::Numerical(format!(
            "Airy-regime check failed: relative deviation {dev:e} > {AIRY_CHECK_TOL:e} (table written to {})",
            path.display()
        )));
    }
    Ok(path)
}

/// Prediction CSV per case. `points` are extra (x, t) pairs on top of the
/// (s, t) grid of the config.
pub fn predict(cfg: &RunConfig, scattering: &Path, points: &[(f64, f64)], out: &Path) -> LabResult<Vec<PathBuf>> {
    cfg.validate()?;
    let (data, prov) = read_scattering(scattering)?;
    let pc = cfg.painleve.config();
    let mut paths = Vec::new();
    for case in cfg.case_list()? {
        let model = TransitionModel::new(&data, case, &pc)?;
        let rows = prediction_rows(&model, cfg, points)?;
        let c = &model.constants;
        let (u0, _) = model.table.eval(0.0)?;
        let i0 = model.table.tail_integral(0.0)?;
        let mut meta = tolerance_meta(cfg);
        meta.extend([
            ("scattering_config_hash", prov.config_hash.clone()),
            ("region_c", cfg.region_c.to_string()),
            ("alpha_inf", c.alpha.to_string()),
            ("phi0", c.phi0.value.to_string()),
            ("kappa_raw", c.kappa_raw.to_string()),
            ("kappa", c.kappa.to_string()),
            ("kappa_clamped", c.kappa_clamped.to_string()),
            ("u_at_0", u0.to_string()),
            ("tail_at_0", i0.to_string()),
        ]);
        let path = out.join(format!("predictions_{}.csv", case.label()));
        write_text(&path, &predictions_csv(case.label(), &meta, &rows))?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn evolve(cfg: &RunConfig, out: &Path) -> LabResult<Vec<PathBuf>> {
    cfg.validate()?;
    let t_end = *cfg.t_values.last().expect("validated");
    let speed = choose_speed(cfg, &solver_for(cfg)?, t_end)?;
    let params = evolver_params(&cfg.evolver, t_end, speed);
    let mut evolver = Evolver::new(params)?;
    let datum = cfg.datum;
    let states = evolver.run(move |x| datum.eval(x), &cfg.t_values)?;
    let mut meta = tolerance_meta(cfg);
    meta.extend([
        ("half_length", params.half_length.to_string()),
        ("n", params.n.to_string()),
        ("dt", params.dt.to_string()),
        ("leakage_threshold", params.leakage_threshold.to_string()),
    ]);
    let mut paths = Vec::new();
    for st in &states {
        let mut m = meta.clone();
        m.push(("t", st.t.to_string()));
        let path = out.join(format!("snapshot_t{}.csv", st.t));
        write_text(&path, &snapshot_csv(&evolver, st, &m))?;
        paths.push(path);
    }
    let path = out.join("diagnostics.csv");
    write_text(&path, &diagnostics_csv(&states.last().expect("nonempty").diagnostics, &meta))?;
    paths.push(path);
    Ok(paths)
}

pub fn compare_cmd(cfg: &RunConfig, out: &Path) -> LabResult<String> {
    cfg.validate()?;
    let solver = solver_for(cfg)?;
    let data = build_parallel(&solver, cfg.scattering.settings())?;
    let cmp = compare(cfg, &solver, &data)?;
    let report = &cmp.report;
    write_text(&out.join(COMPARE_REPORT), &to_json(report))?;
    write_text(&out.join(COMPARE_CELLS), &report.cells_csv())?;
    let meta = tolerance_meta(cfg);
    write_text(&out.join("compare_diagnostics.csv"), &diagnostics_csv(&cmp.states.last().expect("nonempty").diagnostics, &meta))?;
    let mut lines = vec![format!(
        "box half-length {} with n = {}, radiation speed {}, mass drift {:e}",
        report.evolver.half_length, report.evolver.n, report.radiation_speed, report.mass_drift
    )];
    for f in &report.fits {
        let verdict = if f.hypothesis == Hypothesis::Stated {
            if report.passes(f) {
                "PASS"
            } else {
                "FAIL"
            }
        } else {
            "info"
        };
        lines.push(format!(
            "{} s={} {:<30} errors {:?} exponent {:.3} decreasing {} {}{}",
            f.case,
            f.s,
            f.hypothesis.label(),
            f.errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            f.exponent,
            f.strictly_decreasing,
            verdict,
            if f.inconclusive { " (inconclusive: error floor reached)" } else { "" }
        ));
    }
    for s in &report.skipped {
        lines.push(format!("{} s={} skipped: {}", s.case, s.s, s.reason));
    }
    Ok(lines.join("\n"))
}

pub fn signature(cfg: &RunConfig, seed: u64, out: &Path) -> LabResult<String> {
    let r = run_signature(cfg, seed)?;
    write_text(&out.join(SIGNATURE_REPORT), &to_json(&r))?;
    let far: usize = r.sectors.iter().map(|a| a.far_branch_bound_failures).sum();
    let bound: usize = r.sectors.iter().map(|a| a.bound_failures).sum();
    Ok(format!(
        "stationary points {}\nsector signs {}\nsector bounds {} ({bound} misses, {far} of them on the |z| > 2 outer branch)\nconfinement {} (max |k| {:.4} vs {:.4})\nremainder {} (exponents {:?})\nnegative control {}",
        verdict(r.stationary.pass),
        verdict(r.sign_pass),
        verdict(r.bound_pass),
        verdict(r.confinement.pass),
        r.confinement.max_abs_k,
        r.confinement.bound,
        verdict(r.remainder_pass),
        r.remainder.iter().map(|a| format!("{:.3}", a.exponent)).collect::<Vec<_>>(),
        if r.negative_control_detected { "detected" } else { "MISSED" },
    ))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
