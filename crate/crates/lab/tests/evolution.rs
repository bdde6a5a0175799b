use dnls_core::C64;
use dnls_lab::evolver::{conserved_quantities, EvolutionState, Evolver, EvolverParams};

fn bump(a: f64) -> impl Fn(f64) -> C64 + Copy {
    move |x: f64| C64::new(x.tanh() + a * (-x * x).exp(), 0.0)
}

fn params(half_length: f64, n: usize, dt: f64) -> EvolverParams {
    EvolverParams { half_length, n, dt, ..EvolverParams::default() }
}

fn max_diff(a: &EvolutionState, b: &EvolutionState) -> f64 {
    a.w.iter().zip(&b.w).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn run_to(p: EvolverParams, q0: impl Fn(f64) -> C64, t: f64) -> EvolutionState {
    let mut ev = Evolver::new(p).unwrap();
    ev.run(q0, &[t]).unwrap().pop().unwrap()
}

#[test]
fn black_soliton_is_stationary() {
    let mut ev = Evolver::new(EvolverParams::default()).unwrap();
    let states = ev.run(|x| C64::new(x.tanh(), 0.0), &[2.5, 5.0, 7.5, 10.0]).unwrap();
    for st in &states {
        let sup = st.w.iter().map(|w| w.norm()).fold(0.0, f64::max);
        assert!(sup < 1e-6, "t = {}: sup |q − tanh| = {sup:e}", st.t);
    }
}

#[test]
fn step_halving_agrees() {
    let a = run_to(params(40.0, 1024, 2e-3), bump(0.1), 1.0);
    let b = run_to(params(40.0, 1024, 1e-3), bump(0.1), 1.0);
    let d = max_diff(&a, &b);
    assert!(d < 1e-7, "dt vs dt/2: {d:e}");
}

#[test]
fn fourth_order_in_time() {
    let reference = run_to(params(40.0, 1024, 0.2 / 512.0), bump(0.3), 1.0);
    let e1 = max_diff(&run_to(params(40.0, 1024, 0.0125), bump(0.3), 1.0), &reference);
    let e2 = max_diff(&run_to(params(40.0, 1024, 0.00625), bump(0.3), 1.0), &reference);
    let ratio = e1 / e2;
    assert!((12.0..=20.0).contains(&ratio), "error ratio {ratio} ({e1:e} / {e2:e})");
}

#[test]
fn renormalized_mass_is_conserved() {
    let p = params(80.0, 2048, 4e-3);
    let mut ev = Evolver::new(p).unwrap();
    let st0 = ev.initial_state(bump(0.3)).unwrap();
    let (m0, e0) = conserved_quantities(&ev, &st0);
    let st = ev.run(bump(0.3), &[3.0]).unwrap().pop().unwrap();
    let (m1, e1) = conserved_quantities(&ev, &st);
    let scale = m0.abs().max(1.0);
    assert!((m1 - m0).abs() / scale < 1e-8, "mass {m0} → {m1}");
    assert!((e1 - e0).abs() / e0.abs().max(1.0) < 1e-6, "energy {e0} → {e1}");
}

#[test]
fn leakage_guard_names_the_fix() {
    let mut ev = Evolver::new(params(20.0, 512, 4e-3)).unwrap();
    let err = ev.run(bump(0.3), &[10.0]).unwrap_err();
    let msg = format!("{err}");
    assert!(msg.contains("leakage") && msg.contains("half-length"), "{msg}");
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn sampling_matches_a_refined_run() {
    let coarse = params(40.0, 1024, 2e-3);
    let fine = params(40.0, 2048, 2e-3);
    let mut ea = Evolver::new(coarse).unwrap();
    let mut eb = Evolver::new(fine).unwrap();
    let a = ea.run(bump(0.3), &[1.0]).unwrap().pop().unwrap();
    let b = eb.run(bump(0.3), &[1.0]).unwrap().pop().unwrap();
    // x = (k + 1/2)·dx sits between the coarse nodes.
    let dx = coarse.dx();
    for k in [-301, -11, 3, 57] {
        let x = 0.5 * dx * (2 * k + 1) as f64;
        let d = (ea.sample_field(&a, x).unwrap() - eb.sample_field(&b, x).unwrap()).norm();
        assert!(d < 1e-7, "x = {x}: {d:e}");
    }
    // Near the edge w ≈ 0.
    let x = 34.0;
    assert!((ea.sample_field(&a, x).unwrap() - x.tanh()).norm() < 1e-8);
}
