//! Scattering data assembled with the Jost solves spread over a thread pool.

use crate::error::LabResult;
use dnls_core::scattering::data::grid_info;
use dnls_core::scattering::{discrete_spectrum, EdgeData, JostSolver, NuTable, ScatteringData, ScatteringSettings};
use rayon::prelude::*;

/// Same result as `ScatteringData::assemble`, bit for bit: every sample is
/// computed independently and collected in order.
pub fn build_parallel(solver: &JostSolver, settings: ScatteringSettings) -> LabResult<ScatteringData> {
    let discrete = discrete_spectrum(solver, &settings.spectrum)?;
    let table = NuTable::build(settings.nu, |zs| {
        zs.par_iter()
            .map(|&z| {
                let c = solver.coefficients(z)?;
                Ok((c.big_s11, c.big_s21))
            })
            .collect()
    })?;
    let edges = [EdgeData::compute(solver, -1.0, &settings)?, EdgeData::compute(solver, 1.0, &settings)?];
    Ok(ScatteringData::from_parts(settings, grid_info(solver), discrete, table, edges)?)
}

/// Smallest ξ ≥ 2 (on a 0.25 grid, up to 40) beyond which |r| stays below
/// `threshold·√t_end/2`. The radiation at x = 2ξt has amplitude of roughly
/// |r(ξ)|/(2√t), so a box of half-length 2ξt keeps the edge leakage near a
/// quarter of `threshold`.
pub fn radiation_speed(solver: &JostSolver, t_end: f64, threshold: f64) -> LabResult<f64> {
    let target = 0.5 * threshold * t_end.sqrt();
    let grid: Vec<f64> = (0..=152).map(|j| 2.0 + 0.25 * j as f64).collect();
    let r: Vec<f64> = grid.par_iter().map(|&z| solver.coefficients(z).map(|c| c.r.norm())).collect::<Result<_, _>>()?;
    // Last grid point still above target, then one step beyond it.
    match r.iter().rposition(|&v| v > target) {
        None => Ok(grid[0]),
        Some(j) if j + 1 < grid.len() => Ok(grid[j + 1]),
        Some(_) => Ok(grid[grid.len() - 1]),
    }
}
