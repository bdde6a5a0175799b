use dnls_core::asymptotics::{phi0, LayerConstants};
use dnls_core::phase::Case;
use dnls_core::scattering::*;
use dnls_core::C64;
use std::sync::OnceLock;

struct Fixture {
    solver: JostSolver,
    data: ScatteringData,
}

fn headline() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let solver = JostSolver::new(InitialDatum::sample(tanh_plus_gaussian(0.3), 20.0, 0.005).unwrap());
        let data = ScatteringData::assemble(&solver, ScatteringSettings::default()).unwrap();
        Fixture { solver, data }
    })
}

/// Weyl sequence in [0, 1).
fn weyl(k: usize, a: f64) -> f64 {
    (k as f64 * a).fract()
}

/// 200 real samples in [−6, 6] avoiding 0.05-neighbourhoods of 0 and ±1.
fn real_samples() -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 1;
    while out.len() < 200 {
        let z = -6.0 + 12.0 * weyl(k, 0.618_033_988_749_895);
        k += 1;
        if [0.0, 1.0, -1.0].iter().all(|p: &f64| (z - p).abs() > 0.05) {
            out.push(z);
        }
    }
    out
}

#[test]
fn unitarity_on_real_samples() {
    let f = headline();
    let worst = real_samples()
        .into_iter()
        .map(|z| f.solver.coefficients(z).unwrap().unitarity_defect().unwrap())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "unitarity defect {worst:e}");
}

#[test]
fn black_soliton_has_no_reflection() {
    let solver = JostSolver::new(InitialDatum::sample(|x| C64::new(x.tanh(), 0.0), 20.0, 0.005).unwrap());
    let worst = real_samples().into_iter().map(|z| solver.coefficients(z).unwrap().r.norm()).fold(0.0, f64::max);
    assert!(worst < 1e-5, "sup |r| = {worst:e}");
}

#[test]
fn inversion_and_reflection_symmetries() {
    let f = headline();
    for z in [0.3, 0.7, -0.4, 2.5] {
        let a = f.solver.coefficients(z).unwrap();
        let b = f.solver.coefficients(1.0 / z).unwrap();
        let c = f.solver.coefficients(-z).unwrap();
        assert!((b.s11.unwrap() + a.s11.unwrap().conj()).norm() < 1e-8);
        assert!((b.r - a.r.conj()).norm() < 1e-8);
        // Real datum: s11(−z) = conj s11(z).
        assert!((c.s11.unwrap() - a.s11.unwrap().conj()).norm() < 1e-8);
    }
}

#[test]
fn reflection_decays_at_least_like_z_minus_two() {
    let f = headline();
    let scaled: Vec<f64> = [5.0, 10.0, 20.0].iter().map(|&z| f.solver.coefficients(z).unwrap().r.norm() * z * z).collect();
    assert!(scaled[1] < scaled[0] && scaled[2] < scaled[1], "{scaled:?}");
}

#[test]
fn trace_formula_closure() {
    let f = headline();
    let mut worst = 0.0f64;
    for k in 0..20 {
        let z = C64::new(-2.5 + 5.0 * weyl(k + 1, 0.754_877_666), 0.1 + 1.9 * weyl(k + 1, 0.569_840_291));
        let d = f.solver.s11(z).unwrap();
        worst = worst.max((d - f.data.trace_s11(z).unwrap()).norm());
    }
    assert!(worst < 1e-4, "trace closure {worst:e}");
}

fn jump_samples() -> impl Iterator<Item = f64> {
    (0..20).map(|k| 0.1 + 3.9 * weyl(k + 1, 0.618_033_988_749_895)).filter(|x| (x - 1.0).abs() >= 0.05)
}

fn paired_jump_defect(f: &Fixture, x: f64, eps: f64, case: Case) -> f64 {
    let r2 = f.solver.coefficients(x).unwrap().r.norm_sqr();
    let up = f.data.t_function(C64::new(x, eps), case).unwrap();
    let down = f.data.t_function(C64::new(x, -eps), case).unwrap();
    (down - up * (1.0 - r2)).norm()
}

#[test]
fn t_function_jump_across_the_ray() {
    let f = headline();
    for case in [Case::MinusOne, Case::PlusOne] {
        for x in jump_samples() {
            let r2 = f.solver.coefficients(x).unwrap().r.norm_sqr();
            let bp = f.data.t_boundary(x, true, case).unwrap();
            let bm = f.data.t_boundary(x, false, case).unwrap();
            assert!((bm - bp * (1.0 - r2)).norm() < 1e-10, "x = {x}");
            // Off the ray the defect is the first-order Taylor term: linear in ε.
            let a = paired_jump_defect(f, x, 1e-6, case);
            let b = paired_jump_defect(f, x, 1e-7, case);
            assert!(b < 1e-6 && (a / b - 10.0).abs() < 0.1, "x = {x}: {a:e} {b:e}");
        }
    }
}

#[test]
#[ignore = "defect at ε = 1e-6 is ≈ 4ε by the O(ε) Taylor term, above the 1e-6 pair tolerance"]
fn t_function_jump_at_paired_offsets() {
    let f = headline();
    for case in [Case::MinusOne, Case::PlusOne] {
        for x in jump_samples() {
            let d = paired_jump_defect(f, x, 1e-6, case);
            assert!(d < 1e-6, "x = {x} {case:?}: {d:e}");
        }
    }
}

#[test]
fn t_function_symmetries() {
    let f = headline();
    for case in [Case::MinusOne, Case::PlusOne] {
        for k in 0..50 {
            let rad = 0.3 + 2.5 * weyl(k + 1, 0.754_877_666);
            let ang = 0.05 + 6.18 * weyl(k + 1, 0.569_840_291);
            let z = C64::from_polar(rad, ang);
            let t = f.data.t_function(z, case).unwrap();
            let tc = f.data.t_function(z.conj(), case).unwrap().conj();
            let ti = f.data.t_function(z.inv(), case).unwrap();
            assert!((tc * t - 1.0).norm() < 1e-8, "conj symmetry at {z}");
            assert!((ti * t - 1.0).norm() < 1e-8, "inversion symmetry at {z}");
        }
    }
}

#[test]
fn t_at_infinity_and_phase_identity() {
    let f = headline();
    for case in [Case::MinusOne, Case::PlusOne] {
        let closed = f.data.t_infinity(case);
        assert!((closed.norm() - 1.0).abs() < 1e-14);
        let lim = f.data.t_infinity_limit(case, 1e3).unwrap();
        assert!((closed - lim).norm() < 1e-8);
        let c = LayerConstants::new(&f.data, case).unwrap();
        assert!(c.phase_identity_defect() < 1e-8);
        assert!((C64::from_polar(1.0, c.alpha) - lim * lim).norm() < 1e-8);
    }
}

#[test]
fn discrete_spectrum_and_norming_constant() {
    let f = headline();
    assert_eq!(f.data.discrete.len(), 1);
    let e = f.data.discrete[0];
    assert!((e.z - C64::new(0.0, 1.0)).norm() < 1e-9);
    assert!(f.solver.s11(e.z).unwrap().norm() < 1e-10);
    // c_j/(i z_j) is real and positive.
    let w = e.norming / (C64::new(0.0, 1.0) * e.z);
    assert!(w.re > 0.0 && w.im.abs() < 1e-6 * w.re);
    // Refinement stability.
    let fine = JostSolver::new(InitialDatum::sample(tanh_plus_gaussian(0.3), 20.0, 0.0025).unwrap());
    let ev = spectrum::polish(&fine, e.z, &SpectrumSettings::default()).unwrap();
    assert!((ev.z - e.z).norm() < 1e-6);
    assert!((ev.norming.norm() / e.norming.norm() - 1.0).abs() < 1e-5);
}

#[test]
fn jost_columns_are_step_converged() {
    let q = |x: f64| C64::new(x.tanh() + 0.3 / x.cosh().powi(2), 0.0);
    let a = JostSolver::new(InitialDatum::sample(q, 20.0, 0.01).unwrap());
    let b = JostSolver::new(InitialDatum::sample(q, 20.0, 0.005).unwrap());
    let z = C64::new(0.7, 0.0);
    let ca = a.columns(z, true).unwrap();
    let cb = b.columns(z, true).unwrap();
    assert_eq!(ca.x_match, cb.x_match);
    for (u, v) in ca.m1_minus.iter().chain(ca.m2_plus.iter()).zip(cb.m1_minus.iter().chain(cb.m2_plus.iter())) {
        assert!((u - v).norm() < 1e-7);
    }
}

#[test]
fn g_routes_agree_and_have_unit_modulus() {
    let f = headline();
    for x in [0.3, 0.7, 1.5, 3.0] {
        let c = f.solver.coefficients(x).unwrap();
        let gd = f.data.g_direct(&c).unwrap();
        let gt = f.data.g_trace(x).unwrap();
        assert!((gd - gt).norm() < 1e-8, "x = {x}");
        assert!((gt.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn modified_reflection_near_one() {
    let f = headline();
    let r1 = f.data.r_at_one().unwrap();
    // The two branches of R coincide where both are defined.
    for x in [0.95, 1.02, 1.07] {
        let c = f.solver.coefficients(x).unwrap();
        let smooth = c.big_s21.conj() / c.big_s11 * f.data.g_trace(x).unwrap().powi(2);
        assert!((f.data.r_plain(&c).unwrap() - smooth).norm() < 1e-7, "x = {x}");
        assert!((f.data.modified_reflection(&c).unwrap() - smooth).norm() < 1e-7);
    }
    // R(1 ± δ) approaches R(1) linearly in δ; the symmetric mean cancels the slope.
    let mut prev = f64::INFINITY;
    for d in [1e-2, 1e-3, 1e-4] {
        let (dev, mean) = r_near_one(f, d, r1);
        assert!(dev < prev / 5.0);
        prev = dev;
        if d < 1e-2 {
            assert!(mean < 1e-3, "δ = {d}: {mean:e}");
        }
    }
}

/// Largest one-sided deviation |R(1 ± δ) − R(1)| and the deviation of the mean.
fn r_near_one(f: &Fixture, d: f64, r1: C64) -> (f64, f64) {
    let v: Vec<C64> =
        [1.0 - d, 1.0 + d].iter().map(|&x| f.data.r_plain(&f.solver.coefficients(x).unwrap()).unwrap()).collect();
    let dev = v.iter().map(|r| (r - r1).norm()).fold(0.0, f64::max);
    (dev, ((v[0] + v[1]) * 0.5 - r1).norm())
}

#[test]
#[ignore = "R'(1) ≈ 16i on this datum, so |R(1 ± 1e-4) − R(1)| ≈ 1.7e-3"]
fn modified_reflection_one_sided_within_tolerance() {
    let f = headline();
    let r1 = f.data.r_at_one().unwrap();
    for d in [1e-2, 1e-3, 1e-4] {
        let (dev, _) = r_near_one(f, d, r1);
        assert!(dev < 1e-3, "δ = {d}: {dev:e}");
    }
}

#[test]
fn phi0_routes_for_the_plus_one_layer() {
    let f = headline();
    let p = phi0(&f.data, Case::PlusOne).unwrap();
    // Second route: symmetric limit of the plain formula at 1 ± δ.
    let d = 1e-4;
    let a = f.data.r_plain(&f.solver.coefficients(1.0 - d).unwrap()).unwrap();
    let b = f.data.r_plain(&f.solver.coefficients(1.0 + d).unwrap()).unwrap();
    let limit = ((a + b) * 0.5).arg();
    assert!((p.value - limit).abs() < 1e-4);
    assert!(p.single_g.is_some());
    let q = phi0(&f.data, Case::MinusOne).unwrap();
    assert!(!q.fallback);
    assert!(q.value.abs() < 1e-8, "generic edge gives r(−1) = 1");
}

#[test]
fn nu_moment_is_refinement_stable() {
    let f = headline();
    let coarse = NuTable::from_solver(&f.solver, NuSettings { abs_tol: 1e-8, core_width: 0.5, ..NuSettings::default() }).unwrap();
    let a = coarse.moment(Half::Positive);
    let b = f.data.nu_moment();
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    // ν ≥ 0 at every node.
    assert!(f.data.table.samples().all(|s| s.nu() > -1e-12));
}

#[test]
fn background_violation_is_rejected() {
    assert!(InitialDatum::sample(|x| C64::new(x.tanh() + 0.3, 0.0), 20.0, 0.01).is_err());
}
