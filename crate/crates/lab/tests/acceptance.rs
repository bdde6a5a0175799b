//! Acceptance run: one PASS/FAIL line per primary criterion, each at its
//! stated tolerance. Runs without the libtest harness so the lines always
//! reach stdout.
//!
//! The process exits nonzero when a criterion fails that is not listed in
//! `KNOWN_FAILURES`. Those entries are measured outcomes, printed with the
//! reason, and still reported as FAIL.

use dnls_core::airy::airy;
use dnls_core::asymptotics::LayerConstants;
use dnls_core::painleve::{residue_matrices, solve_pii, PainleveConfig};
use dnls_core::phase::Case;
use dnls_core::scattering::{tanh_plus_gaussian, InitialDatum, JostSolver, ScatteringSettings};
use dnls_core::C64;
use dnls_lab::config::RunConfig;
use dnls_lab::evolver::{EvolutionState, Evolver, EvolverParams};
use dnls_lab::harness::{compare, Hypothesis};
use dnls_lab::scatter::build_parallel;
use dnls_lab::signature::run_signature;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const KNOWN_FAILURES: &[(&str, &str)] = &[
    (
        "phase-geometry",
        "the |z| > 2 outer-sector bound Re(2iθ) ≤ −2√2|Im z| does not hold for 2 < |Re z| < 1 + √2; every sign condition and every other bound holds",
    ),
    (
        "headline",
        "with e^{iα} as stated the error decays only like t^-0.1 on t ∈ {40, 80, 160}, outside [−0.9, −0.25], and e(160) ≈ 0.13; the e^{−iα} reading meets every band (supplementary lines)",
    ),
];

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

fn weyl(k: usize, a: f64) -> f64 {
    (k as f64 * a).fract()
}

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

/// Evaluate one criterion; `setup` is time already spent on shared inputs.
fn timed(name: &'static str, setup: f64, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    let o = Outcome { name, pass, detail, seconds: setup + start.elapsed().as_secs_f64() };
    println!("{} {:<16} {} [{:.1} s]", if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail, o.seconds);
    o
}

fn sup_w(st: &EvolutionState) -> f64 {
    st.w.iter().map(|w| w.norm()).fold(0.0, f64::max)
}

fn run_to(p: EvolverParams, t: f64) -> EvolutionState {
    let mut ev = Evolver::new(p).unwrap();
    ev.run(tanh_plus_gaussian(0.3), &[t]).unwrap().pop().unwrap()
}

fn max_diff(a: &EvolutionState, b: &EvolutionState) -> f64 {
    a.w.iter().zip(&b.w).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn main() {
    let cfg = RunConfig::default();
    let solver = JostSolver::new(InitialDatum::sample(tanh_plus_gaussian(0.3), 20.0, 0.005).unwrap());
    let samples = real_samples();
    let mut out = Vec::new();

    out.push(timed("unitarity", 0.0, || {
        let worst = samples.iter().map(|&z| solver.coefficients(z).unwrap().unitarity_defect().unwrap()).fold(0.0, f64::max);
        (worst < 1e-6, format!("max ||s11|² − |s21|² − 1| = {worst:.2e} over 200 real samples (< 1e-6)"))
    }));

    let start = Instant::now();
    let data = build_parallel(&solver, ScatteringSettings::default()).unwrap();
    let data_seconds = start.elapsed().as_secs_f64();

    out.push(timed("trace-closure", data_seconds, || {
        let mut worst = 0.0f64;
        for k in 0..20 {
            let z = C64::new(-2.5 + 5.0 * weyl(k + 1, 0.754_877_666), 0.1 + 1.9 * weyl(k + 1, 0.569_840_291));
            worst = worst.max((solver.s11(z).unwrap() - data.trace_s11(z).unwrap()).norm());
        }
        (worst < 1e-4, format!("max |s11 trace − s11 direct| = {worst:.2e} at 20 points, Im z ≥ 0.1 (< 1e-4)"))
    }));

    out.push(timed("black-soliton", 0.0, || {
        let tanh = JostSolver::new(InitialDatum::sample(|x| C64::new(x.tanh(), 0.0), 20.0, 0.005).unwrap());
        let worst = samples.iter().map(|&z| tanh.coefficients(z).unwrap().r.norm()).fold(0.0, f64::max);
        (worst < 1e-5, format!("sup |r| = {worst:.2e} for q0 = tanh (< 1e-5)"))
    }));

    out.push(timed("painleve", 0.0, || {
        let base = PainleveConfig::default();
        let mut residual = 0.0f64;
        for k in [0.1, 0.5, 0.9, 1.0] {
            residual = residual.max(solve_pii(k, &base).unwrap().residual_max());
        }
        let mut airy_dev = 0.0f64;
        for k in [0.1, 0.5, 0.9] {
            let t = solve_pii(k, &base).unwrap();
            let mut s = 5.0;
            while s <= 9.0 {
                let a = k * airy(s).ai;
                airy_dev = airy_dev.max((t.eval(s).unwrap().0 / a - 1.0).abs());
                s += 0.125;
            }
        }
        let mut matching = 0.0f64;
        for k in [0.5, 1.0] {
            let a = solve_pii(k, &base).unwrap();
            let b = solve_pii(k, &PainleveConfig { s_max: 14.0, ..base }).unwrap();
            for s in [-10.0, -5.0, -1.0, 0.0, 2.0, 6.0] {
                matching = matching.max((a.eval(s).unwrap().0 - b.eval(s).unwrap().0).abs());
            }
        }
        let mut odd = true;
        for k in [0.7, 1.0] {
            let p = solve_pii(k, &base).unwrap();
            let m = solve_pii(-k, &base).unwrap();
            odd &= p.u.iter().zip(&m.u).all(|(x, y)| *x == -*y) && p.tail == m.tail;
        }
        let pass = residual < 1e-8 && airy_dev < 1e-3 && matching < 1e-7 && odd;
        (
            pass,
            format!(
                "residual {residual:.2e} (< 1e-8), Airy deviation {airy_dev:.2e} (< 1e-3), matching {matching:.2e} (< 1e-7), odd {odd}"
            ),
        )
    }));

    out.push(timed("residue-matrices", 0.0, || {
        let table = solve_pii(1.0, &PainleveConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut worst_trace = 0.0f64;
        let mut worst_off = 0.0f64;
        for _ in 0..100 {
            let s = rng.gen_range(-8.0..8.0);
            let phi0 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let (u, _) = table.eval(s).unwrap();
            let m = residue_matrices(u, table.tail_integral(s).unwrap(), phi0);
            worst_trace = worst_trace.max(m.m1p.trace().norm()).max(m.m1_inf.trace().norm());
            for v in [m.m1p.0[0][1], m.m1p.0[1][0], m.m1_inf.0[0][1], m.m1_inf.0[1][0]] {
                worst_off = worst_off.max((v.norm() - 0.5 * u.abs()).abs() / (0.5 * u.abs()));
            }
        }
        let pass = worst_trace == 0.0 && worst_off <= 4.0 * f64::EPSILON;
        (pass, format!("max |trace| = {worst_trace:e}, max relative off-diagonal defect {worst_off:.2e} (≤ 4 ulp)"))
    }));

    out.push(timed("stationarity", 0.0, || {
        let mut ev = Evolver::new(EvolverParams::default()).unwrap();
        let states = ev.run(|x| C64::new(x.tanh(), 0.0), &[2.5, 5.0, 7.5, 10.0]).unwrap();
        let sup = states.iter().map(sup_w).fold(0.0, f64::max);
        let p = |dt| EvolverParams { half_length: 40.0, n: 1024, dt, ..EvolverParams::default() };
        let reference = run_to(p(0.2 / 512.0), 1.0);
        let e1 = max_diff(&run_to(p(0.0125), 1.0), &reference);
        let e2 = max_diff(&run_to(p(0.00625), 1.0), &reference);
        let ratio = e1 / e2;
        let pass = sup < 1e-6 && (12.0..=20.0).contains(&ratio);
        (pass, format!("sup |q − tanh| = {sup:.2e} for t ≤ 10 (< 1e-6), dt ratio {ratio:.2} at dt = 0.0125 (in [12, 20])"))
    }));

    let start = Instant::now();
    let sig = run_signature(&cfg, 0).unwrap();
    let sig_seconds = start.elapsed().as_secs_f64();

    out.push(timed("phase-geometry", sig_seconds, || {
        let far: usize = sig.sectors.iter().map(|a| a.far_branch_bound_failures).sum();
        let bound: usize = sig.sectors.iter().map(|a| a.bound_failures).sum();
        let sampled: usize = sig.sectors.iter().map(|a| a.samples).sum();
        let pass = sig.stationary.pass && sig.sign_pass && sig.bound_pass && sig.confinement.pass;
        (
            pass,
            format!(
                "Vieta {:.1e}, θ′ {:.1e} (scaled), signs ok {}, bounds missed at {bound}/{sampled} points ({far} on the |z| > 2 outer branch), confinement {:.3} ≤ {:.3}",
                sig.stationary.max_product_defect,
                sig.stationary.max_theta_prime_scaled,
                sig.sign_pass,
                sig.confinement.max_abs_k,
                sig.confinement.bound
            ),
        )
    }));

    out.push(timed("remainder", 0.0, || {
        let worst = sig.remainder.iter().map(|r| r.exponent).fold(f64::NEG_INFINITY, f64::max);
        (sig.remainder_pass, format!("largest fitted exponent {worst:.3} over both layers, s ∈ {{−1, 0, 1}} (≤ −0.30)"))
    }));

    out.push(timed("phase-identity", 0.0, || {
        let d: Vec<f64> =
            [Case::MinusOne, Case::PlusOne].iter().map(|&c| LayerConstants::new(&data, c).unwrap().phase_identity_defect()).collect();
        (d.iter().all(|&v| v < 1e-8), format!("|e^{{iα}} − T(∞)²| = {:.2e} (minus1), {:.2e} (plus1) (< 1e-8)", d[0], d[1]))
    }));

    let start = Instant::now();
    let cmp = compare(&cfg, &solver, &data).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let report = cmp.report;
    let line = |h: Hypothesis| -> (bool, String) {
        let mut pass = true;
        let mut parts = Vec::new();
        for case in [Case::MinusOne, Case::PlusOne] {
            let f = report.fit(case, 0.0, h).expect("fit present");
            pass &= report.passes(f);
            parts.push(format!(
                "{}: e = {:.4}/{:.4}/{:.4}, exponent {:.3}, decreasing {}",
                case.label(),
                f.errors[0],
                f.errors[1],
                f.errors[2],
                f.exponent,
                f.strictly_decreasing
            ));
        }
        (pass, parts.join("; "))
    };
    out.push(timed("headline", elapsed, || line(Hypothesis::Stated)));
    println!(
        "     (box L = {}, n = {}, dt = {}, mass drift {:.1e}; bands: exponent in [−0.9, −0.25], e(160) < 0.05)",
        report.evolver.half_length, report.evolver.n, report.evolver.dt, report.mass_drift
    );
    for h in [Hypothesis::AlphaConjugate, Hypothesis::KappaFlipped, Hypothesis::AlphaConjugateKappaFlipped] {
        let (pass, detail) = line(h);
        println!("     supplementary {:<30} {} {}", h.label(), if pass { "within bands" } else { "outside bands" }, detail);
    }

    let failed: Vec<&Outcome> = out.iter().filter(|o| !o.pass).collect();
    let unexpected: Vec<&&Outcome> = failed.iter().filter(|o| !KNOWN_FAILURES.iter().any(|(n, _)| *n == o.name)).collect();
    println!("\n{} of {} primary criteria pass", out.len() - failed.len(), out.len());
    for o in &failed {
        if let Some((_, why)) = KNOWN_FAILURES.iter().find(|(n, _)| *n == o.name) {
            println!("known failure {}: {why}", o.name);
        }
    }
    for (name, _) in KNOWN_FAILURES {
        if out.iter().any(|o| o.name == *name && o.pass) {
            println!("note: {name} is listed as a known failure but passed");
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {:?}", unexpected.iter().map(|o| o.name).collect::<Vec<_>>());
        std::process::exit(1);
    }
}
