//! Assembled scattering data and the functions built from it: the trace
//! formula, the T functions of both transition cases, and the modified
//! reflection coefficient R near z = 1.

use super::jost::{JostSolver, ScatteringCoefficients};
use super::nu::{Half, NuSettings, NuTable};
use super::spectrum::{discrete_spectrum, DiscreteEigenvalue, SpectrumSettings};
use crate::error::{domain, numerical};
use crate::linalg::{I, ONE};
use crate::phase::Case;
use crate::{Result, C64};
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSettings {
    pub spectrum: SpectrumSettings,
    pub nu: NuSettings,
    /// |S11(±1)| below this marks the edge as non-generic.
    pub generic_threshold: f64,
    /// Offset used for one-sided limits at a non-generic edge.
    pub edge_delta: f64,
    /// Support radius of the cutoff χ around z = 1.
    pub chi_radius: f64,
}

impl Default for ScatteringSettings {
    fn default() -> Self {
        ScatteringSettings {
            spectrum: SpectrumSettings::default(),
            nu: NuSettings::default(),
            generic_threshold: 1e-6,
            edge_delta: 1e-4,
            chi_radius: 0.1,
        }
    }
}

/// Regular determinants at z = ±1 and the limit of r there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeData {
    pub z: f64,
    pub big_s11: C64,
    pub big_s21: C64,
    /// S11(z) ≠ 0: then r(z) = S21/S11 exactly and |r| = 1.
    pub generic: bool,
    pub r_limit: C64,
}

impl EdgeData {
    pub fn compute(solver: &JostSolver, z: f64, settings: &ScatteringSettings) -> Result<EdgeData> {
        if z.abs() != 1.0 {
            return Err(domain("edge data live at z = ±1"));
        }
        let c = solver.coefficients(z)?;
        let generic = c.big_s11.norm() > settings.generic_threshold;
        let r_limit = if generic {
            c.big_s21 / c.big_s11
        } else {
            let d = settings.edge_delta;
            let a = solver.coefficients(z * (1.0 + d))?.r;
            let b = solver.coefficients(z * (1.0 - d))?.r;
            (a + b) * 0.5
        };
        Ok(EdgeData { z, big_s11: c.big_s11, big_s21: c.big_s21, generic, r_limit })
    }

    /// F = conj(S21)/S11 at the edge.
    pub fn f_value(&self) -> Result<C64> {
        if self.big_s11.norm() == 0.0 {
            return Err(numerical("S11 vanishes at the edge"));
        }
        Ok(self.big_s21.conj() / self.big_s11)
    }
}

/// Grid provenance of the datum the data were computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridInfo {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
    pub x_match: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData {
    pub settings: ScatteringSettings,
    pub grid: GridInfo,
    pub discrete: Vec<DiscreteEigenvalue>,
    pub table: NuTable,
    /// Edge data at z = −1 and z = +1.
    pub edges: [EdgeData; 2],
}

impl ScatteringData {
    /// Sequential assembly from a solver.
    pub fn assemble(solver: &JostSolver, settings: ScatteringSettings) -> Result<ScatteringData> {
        let discrete = discrete_spectrum(solver, &settings.spectrum)?;
        let table = NuTable::from_solver(solver, settings.nu)?;
        let edges = [EdgeData::compute(solver, -1.0, &settings)?, EdgeData::compute(solver, 1.0, &settings)?];
        ScatteringData::from_parts(settings, grid_info(solver), discrete, table, edges)
    }

    /// Assembly from parts computed elsewhere (e.g. in parallel); checks the
    /// structural invariants.
    pub fn from_parts(
        settings: ScatteringSettings,
        grid: GridInfo,
        discrete: Vec<DiscreteEigenvalue>,
        table: NuTable,
        edges: [EdgeData; 2],
    ) -> Result<ScatteringData> {
        for e in &discrete {
            if (e.z.norm() - 1.0).abs() > 1e-8 || e.z.im <= 0.0 {
                return Err(crate::Error::Consistency(alloc::format!(
                    "eigenvalue {} is not on the upper unit semicircle",
                    e.z
                )));
            }
        }
        if edges[0].z != -1.0 || edges[1].z != 1.0 {
            return Err(domain("edge data must be ordered (−1, +1)"));
        }
        if table.panels.is_empty() {
            return Err(domain("empty ν table"));
        }
        Ok(ScatteringData { settings, grid, discrete, table, edges })
    }

    pub fn edge(&self, case: Case) -> &EdgeData {
        match case {
            Case::MinusOne => &self.edges[0],
            Case::PlusOne => &self.edges[1],
        }
    }

    /// ∫₀^∞ ν(ζ)/ζ dζ.
    pub fn nu_moment(&self) -> f64 {
        self.table.moment(Half::Positive)
    }

    /// Π (z − z_j)/(z − z̄_j).
    pub fn blaschke_pairs(&self, z: C64) -> C64 {
        self.discrete.iter().fold(ONE, |acc, e| acc * (z - e.z) / (z - e.z.conj()))
    }

    /// s11 from the trace formula, Im z > 0.
    pub fn trace_s11(&self, z: C64) -> Result<C64> {
        if !(z.im > 0.0) {
            return Err(domain("the trace formula is evaluated in the open upper half-plane"));
        }
        Ok(self.blaschke_pairs(z) * (-I * self.table.cauchy(z, Half::Full)).exp())
    }

    /// Case I: Π (z − z_j)/(z z_j − 1); Case II: 1.
    pub fn t_product(&self, z: C64, case: Case) -> C64 {
        match case {
            Case::MinusOne => self.discrete.iter().fold(ONE, |acc, e| acc * (z - e.z) / (z * e.z - 1.0)),
            Case::PlusOne => ONE,
        }
    }

    fn t_from_cauchy(&self, z: C64, cauchy: C64, case: Case) -> C64 {
        let half_moment = 0.5 * self.nu_moment();
        self.t_product(z, case) * (-I * cauchy + I * half_moment).exp()
    }

    /// T(z) = [Π] exp(−i ∫₀^∞ ν(ζ)(1/(ζ − z) − 1/(2ζ)) dζ), z off [0, ∞).
    pub fn t_function(&self, z: C64, case: Case) -> Result<C64> {
        if !(z.re.is_finite() && z.im.is_finite()) || (z.im == 0.0 && z.re >= 0.0) {
            return Err(domain("T is evaluated off the branch ray [0, ∞)"));
        }
        Ok(self.t_from_cauchy(z, self.table.cauchy(z, Half::Positive), case))
    }

    /// Boundary values T±(x) on x > 0 from above (`upper`) or below.
    pub fn t_boundary(&self, x: f64, upper: bool, case: Case) -> Result<C64> {
        if !(x > 0.0) || x >= self.table.cutoff() {
            return Err(domain("boundary values of T are taken on (0, Λ)"));
        }
        let z = C64::new(x, 0.0);
        Ok(self.t_from_cauchy(z, self.table.cauchy_boundary(x, upper, Half::Positive), case))
    }

    /// T(∞) in closed form: [Π z̄_j] exp((i/2)∫₀^∞ ν/ζ).
    pub fn t_infinity(&self, case: Case) -> C64 {
        let p = match case {
            Case::MinusOne => self.discrete.iter().fold(ONE, |acc, e| acc * e.z.conj()),
            Case::PlusOne => ONE,
        };
        p * (I * 0.5 * self.nu_moment()).exp()
    }

    /// T(∞) as the numerical limit of T(iR), Richardson-extrapolated in 1/R
    /// from R, 2R, 4R.
    pub fn t_infinity_limit(&self, case: Case, r: f64) -> Result<C64> {
        let t1 = self.t_function(C64::new(0.0, r), case)?;
        let t2 = self.t_function(C64::new(0.0, 2.0 * r), case)?;
        let t4 = self.t_function(C64::new(0.0, 4.0 * r), case)?;
        let a1 = t2 * 2.0 - t1;
        let a2 = t4 * 2.0 - t2;
        Ok((a2 * 4.0 - a1) / 3.0)
    }

    /// G(x) = s11(x)/T₊(x) for real x > 0 by its trace representation
    /// Π (x − z_j)/(x − z̄_j) exp(−i ∫_{−∞}^0 ν/(ζ − x)) exp(−(i/2) ∫₀^∞ ν/ζ),
    /// which stays finite at x = 1.
    pub fn g_trace(&self, x: f64) -> Result<C64> {
        if !(x > 0.0) {
            return Err(domain("G is evaluated on x > 0"));
        }
        let z = C64::new(x, 0.0);
        let neg = self.table.cauchy(z, Half::Negative);
        Ok(self.blaschke_pairs(z) * (-I * neg - I * 0.5 * self.nu_moment()).exp())
    }

    /// G(x) = s11(x)/T₊(x) directly from coefficients at x (Case II T).
    pub fn g_direct(&self, c: &ScatteringCoefficients) -> Result<C64> {
        let s11 = c.s11.ok_or_else(|| domain("s11 is singular at z = ±1"))?;
        Ok(s11 / self.t_boundary(c.z, true, Case::PlusOne)?)
    }

    /// Smooth cutoff χ(z) = exp(1 − 1/(1 − (d/δ)²)), d = |z − 1|.
    pub fn chi(&self, z: f64) -> f64 {
        chi(z, self.settings.chi_radius)
    }

    /// conj(r)/(1 − |r|²) T₊⁻², written as conj(s21) s11 / T₊² so that the
    /// cancellation near z = 1 is exact.
    pub fn r_plain(&self, c: &ScatteringCoefficients) -> Result<C64> {
        let s11 = c.s11.ok_or_else(|| domain("plain R is singular at z = ±1"))?;
        let s21 = c.s21.ok_or_else(|| domain("plain R is singular at z = ±1"))?;
        let t = self.t_boundary(c.z, true, Case::PlusOne)?;
        Ok(s21.conj() * s11 / (t * t))
    }

    /// R(z) = (1 − χ) conj(r)/(1 − |r|²) T₊⁻² + χ F G² for real z > 0. At
    /// z = 1 only the second term survives.
    pub fn modified_reflection(&self, c: &ScatteringCoefficients) -> Result<C64> {
        let x = c.z;
        let w = self.chi(x);
        let f = c.big_s21.conj() / c.big_s11;
        let g = self.g_trace(x)?;
        let smooth = f * g * g * w;
        if w == 1.0 {
            return Ok(smooth);
        }
        Ok(self.r_plain(c)? * (1.0 - w) + smooth)
    }

    /// R(1) = F(1) G(1)².
    pub fn r_at_one(&self) -> Result<C64> {
        let g = self.g_trace(1.0)?;
        Ok(self.edges[1].f_value()? * g * g)
    }
}

pub fn chi(z: f64, radius: f64) -> f64 {
    let d = (z - 1.0).abs() / radius;
    if d >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - d * d)).exp()
    }
}

pub fn grid_info(solver: &JostSolver) -> GridInfo {
    let d = solver.datum();
    GridInfo { x0: d.x0, dx: d.dx, n: d.len(), x_match: solver.x_match() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::nu::NuPanel;

    /// Reflectionless data with one eigenvalue and a zero table.
    fn reflectionless(zj: C64) -> ScatteringData {
        let table = NuTable::build(NuSettings::default(), |zs| {
            Ok(zs.iter().map(|&z| (C64::new(1.0 - 1.0 / (z * z), 0.0), C64::new(0.0, 0.0))).collect())
        })
        .unwrap();
        let ev = DiscreteEigenvalue { z: zj, norming: ONE, b: ONE, s11_prime: ONE, residual: 0.0 };
        let edge = |z: f64| EdgeData { z, big_s11: ONE, big_s21: C64::new(0.0, 0.0), generic: true, r_limit: C64::new(0.0, 0.0) };
        let grid = GridInfo { x0: -20.0, dx: 0.01, n: 4001, x_match: 0.0 };
        ScatteringData::from_parts(ScatteringSettings::default(), grid, alloc::vec![ev], table, [edge(-1.0), edge(1.0)])
            .unwrap()
    }

    #[test]
    fn trace_formula_collapses_to_the_product() {
        let d = reflectionless(I);
        let z = C64::new(0.3, 0.8);
        let exact = (z - I) / (z + I);
        assert!((d.trace_s11(z).unwrap() - exact).norm() < 1e-14);
    }

    #[test]
    fn t_infinity_for_a_single_eigenvalue() {
        let d = reflectionless(I);
        assert!((d.t_infinity(Case::MinusOne) - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((d.t_infinity_limit(Case::MinusOne, 1e3).unwrap() - C64::new(0.0, -1.0)).norm() < 1e-9);
        assert!((d.t_infinity(Case::PlusOne) - ONE).norm() < 1e-15);
    }

    #[test]
    fn t_rejects_the_branch_ray() {
        let d = reflectionless(I);
        assert!(d.t_function(C64::new(2.0, 0.0), Case::PlusOne).is_err());
        assert!(d.t_function(C64::new(-2.0, 0.0), Case::PlusOne).is_ok());
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(chi(1.0, 0.1), 1.0);
        assert_eq!(chi(1.1, 0.1), 0.0);
        assert!(chi(1.05, 0.1) > 0.0 && chi(1.05, 0.1) < 1.0);
    }

    #[test]
    fn off_circle_eigenvalue_rejected() {
        let d = reflectionless(I);
        let mut bad = d.discrete.clone();
        bad[0].z = C64::new(0.0, 1.1);
        let empty: Vec<NuPanel> = Vec::new();
        assert!(ScatteringData::from_parts(d.settings, d.grid, bad, d.table.clone(), d.edges).is_err());
        let t = NuTable { panels: empty, ..d.table.clone() };
        assert!(ScatteringData::from_parts(d.settings, d.grid, d.discrete.clone(), t, d.edges).is_err());
    }
}
