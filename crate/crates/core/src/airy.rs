//! Airy function Ai and its derivative on the real line.
//!
//! |s| ≤ 4.5: Maclaurin series. s > 4.5: exponentially scaled K_{1/3} and
//! K_{2/3} from Steed's continued fraction, Ai(s) = √(s/3) K_{1/3}(ζ)/π with
//! ζ = (2/3)s^{3/2}. s < −4.5: re-centred Taylor steps of the Airy equation
//! starting from the series values at −4.5.
//!
//! Absolute accuracy is about 1e-13 on [−30, 30]. Outside that window the
//! result is still computed but flagged as best-effort.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Ai(0).
pub const AI0: f64 = 0.355_028_053_887_817_239_260_063_186_004_183_176_397_979_174_199_177;
/// −Ai'(0).
pub const AIP0: f64 = 0.258_819_403_792_806_798_405_183_560_189_203_963_479_091_138_354_934;

const SERIES_LIMIT: f64 = 4.5;
const TAYLOR_STEP: f64 = 0.5;

/// Ai(s), Ai'(s), and whether s lies in the validated window [−30, 30].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: f64,
    pub ai_prime: f64,
    pub in_window: bool,
}

pub fn airy(s: f64) -> AiryValue {
    let (ai, ai_prime) = if s.is_nan() {
        (f64::NAN, f64::NAN)
    } else if s.abs() <= SERIES_LIMIT {
        maclaurin(s)
    } else if s > 0.0 {
        positive_tail(s)
    } else {
        negative_tail(s)
    };
    AiryValue { ai, ai_prime, in_window: s.abs() <= 30.0 }
}

pub fn ai(s: f64) -> f64 {
    airy(s).ai
}

pub(crate) fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = Σ t_k, g = Σ u_k and their derivatives Σ d_k, Σ e_k.
    let (mut t, mut u) = (1.0, x);
    let (mut d, mut e) = (0.5 * x * x, 1.0);
    let (mut f, mut g, mut fp, mut gp) = (t, u, d, e);
    for k in 0..200 {
        let kf = k as f64;
        t *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        u *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        e *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f += t;
        g += u;
        gp += e;
        if k > 0 {
            d *= x3 / (3.0 * kf * (3.0 * kf + 2.0));
            fp += d;
        }
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if t.abs() + u.abs() + d.abs() + e.abs() <= 1e-17 * scale {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

/// e^x K_μ(x) and e^x K_{μ+1}(x) for |μ| ≤ 1/2 and x ≥ 2 (Steed / Temme).
pub(crate) fn bessel_k_scaled(mu: f64, x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let a1 = 0.25 - mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let kmu = (PI / (2.0 * x)).sqrt() / s;
    let k1 = kmu * (mu + x + 0.5 - h) * xi;
    (kmu, k1)
}

fn positive_tail(s: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * s * s.sqrt();
    let (k13, k23) = bessel_k_scaled(-1.0 / 3.0, zeta);
    let damp = (-zeta).exp();
    let ai = (s / 3.0).sqrt() * k13 / PI * damp;
    let aip = -s / (PI * 3.0f64.sqrt()) * k23 * damp;
    (ai, aip)
}

fn negative_tail(s: f64) -> (f64, f64) {
    let (mut y, mut yp) = maclaurin(-SERIES_LIMIT);
    let mut s0 = -SERIES_LIMIT;
    let n = ((s0 - s) / TAYLOR_STEP).ceil() as usize;
    let h = (s - s0) / n as f64;
    for _ in 0..n {
        let (y1, yp1) = taylor_step(s0, y, yp, h);
        y = y1;
        yp = yp1;
        s0 += h;
    }
    (y, yp)
}

/// Advance y'' = s y from s0 to s0 + h by its Taylor series.
fn taylor_step(s0: f64, y: f64, yp: f64, h: f64) -> (f64, f64) {
    // Coefficients a_n of y(s0 + h) = Σ a_n h^n with
    // (n+2)(n+1) a_{n+2} = s0 a_n + a_{n-1}.
    let mut a_nm1 = 0.0;
    let mut a_n = y;
    let mut a_np1 = yp;
    let mut hn = 1.0;
    let mut val = 0.0;
    let mut der = 0.0;
    for n in 0..400 {
        let nf = n as f64;
        val += a_n * hn;
        // d/dh of a_{n+1} h^{n+1}
        der += (nf + 1.0) * a_np1 * hn;
        let a_np2 = (s0 * a_n + a_nm1) / ((nf + 2.0) * (nf + 1.0));
        a_nm1 = a_n;
        a_n = a_np1;
        a_np1 = a_np2;
        hn *= h;
        let tail = a_n.abs() * hn.abs() + a_np1.abs() * hn.abs() * (nf + 2.0);
        if n > 4 && tail < 1e-18 * (val.abs() + der.abs() + 1e-300) {
            break;
        }
    }
    (val, der)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 30-digit arithmetic.
    const TABLE: [(f64, f64, f64); 16] = [
        (-30.0, -0.087968188456842162833, 1.2286206026374851347),
        (-20.0, -0.17640612707798468959, 0.8928628567364712384),
        (-10.0, 0.040241238486443190689, 0.9962650441327900559),
        (-5.0, 0.35076100902411431979, 0.32719281855444313679),
        (-4.5, 0.29215278105595946688, -0.52336253231574770071),
        (-1.0, 0.5355608832923521188, -0.010160567116645209395),
        (0.0, 0.35502805388781723926, -0.25881940379280679841),
        (1.0, 0.13529241631288141552, -0.15914744129679321279),
        (2.5, 0.015725923380470489995, -0.026250881035903230365),
        (4.5, 0.00033025032351430898366, -0.00071786656755750888869),
        (5.0, 0.00010834442813607441735, -0.000247413890868462476),
        (8.0, 4.6922076160992316256e-8, -1.3414392979067865743e-7),
        (10.0, 1.1047532552898685934e-10, -3.5206336767389236366e-10),
        (14.0, 9.9202054911923772663e-17, -3.7293101100179006797e-16),
        (20.0, 1.6916728686705403136e-27, -7.5863916257483549605e-27),
        (30.0, 3.2082175915504955711e-49, -1.7598765814327259821e-48),
    ];

    #[test]
    fn matches_reference_table() {
        for &(s, a, ap) in &TABLE {
            let v = airy(s);
            assert!((v.ai - a).abs() < 1e-13, "Ai({s}) = {} vs {a}", v.ai);
            assert!((v.ai_prime - ap).abs() < 2e-13, "Ai'({s}) = {} vs {ap}", v.ai_prime);
        }
    }

    #[test]
    fn relative_accuracy_on_the_decaying_side() {
        for &(s, a, ap) in TABLE.iter().filter(|r| r.0 > 4.6) {
            let v = airy(s);
            assert!((v.ai / a - 1.0).abs() < 1e-12, "s = {s}");
            assert!((v.ai_prime / ap - 1.0).abs() < 1e-12, "s = {s}");
        }
    }

    #[test]
    fn continued_fraction_agrees_with_series_on_overlap() {
        for s in [2.0, 3.0, 3.7, 4.5] {
            let (a, ap) = maclaurin(s);
            let (b, bp) = positive_tail(s);
            assert!((a - b).abs() < 5e-14, "s = {s}");
            assert!((ap - bp).abs() < 5e-14, "s = {s}");
        }
    }

    #[test]
    fn taylor_steps_agree_with_series_on_overlap() {
        let (mut y, mut yp) = maclaurin(-1.0);
        let mut s = -1.0;
        for _ in 0..7 {
            (y, yp) = taylor_step(s, y, yp, -0.5);
            s -= 0.5;
        }
        let (a, ap) = maclaurin(-4.5);
        assert!((y - a).abs() < 1e-13 && (yp - ap).abs() < 1e-13);
    }

    #[test]
    fn window_flag() {
        assert!(airy(30.0).in_window);
        assert!(!airy(-31.0).in_window);
        assert!(airy(-31.0).ai.is_finite());
    }
}
