#![allow(dead_code)]

use blowup::*;

pub fn unit_ball(n: usize) -> GreenProvider64 {
    make_provider(&DomainSpec::unit_ball(n).unwrap()).unwrap()
}

/// Unit balls centered at `4 i e_1`.
pub fn separated_balls(n: usize, count: usize) -> GreenProvider64 {
    let balls = (0..count)
        .map(|i| {
            let mut c = vec![0.0; n];
            c[0] = 4.0 * i as f64;
            BallSpec { center: c, radius: 1.0 }
        })
        .collect();
    make_provider(&DomainSpec::disjoint_balls(n, balls).unwrap()).unwrap()
}

pub fn e1(n: usize, t: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[0] = t;
    v
}

/// `|S^{N−1}|` by the recursion `ω_{N+2} = 2π ω_N / N`.
pub fn sphere_area_recursive(n: usize) -> f64 {
    let mut w = if n % 2 == 0 { 2.0 * std::f64::consts::PI } else { 2.0 };
    let mut d = if n % 2 == 0 { 2 } else { 1 };
    while d < n {
        w *= 2.0 * std::f64::consts::PI / d as f64;
        d += 2;
    }
    w
}

pub fn singular_constant_oracle(n: usize) -> f64 {
    1.0 / ((n as f64 - 2.0) * sphere_area_recursive(n))
}

/// Image-charge Green function of the ball `B_ρ(0)`, written out independently.
pub fn ball_green_oracle(x: &[f64], y: &[f64], rho: f64) -> f64 {
    let n = x.len();
    let c = singular_constant_oracle(n);
    let d: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let x2: f64 = x.iter().map(|a| a * a).sum();
    let h = if x2 == 0.0 {
        rho.powi(2 - n as i32)
    } else {
        let xs: Vec<f64> = x.iter().map(|a| rho * rho * a / x2).collect();
        let e: f64 = y.iter().zip(&xs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        (x2.sqrt() * e / rho).powi(2 - n as i32)
    };
    c * (d.powi(2 - n as i32) - h)
}

pub fn ball_robin_oracle(x: &[f64], rho: f64) -> f64 {
    let n = x.len();
    let x2: f64 = x.iter().map(|a| a * a).sum();
    singular_constant_oracle(n) * (rho / (rho * rho - x2)).powi(n as i32 - 2)
}

/// Adaptive Simpson on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫_0^∞ r^{q} (1 + r²)^{−m} dr` by adaptive Simpson on `[0, 1e4]` plus the two leading
/// terms of the tail expansion.
pub fn radial_integral(q: f64, m: f64) -> f64 {
    let f = |r: f64| r.powf(q) * (1.0 + r * r).powf(-m);
    let cut = 1e4;
    let mut body = 0.0;
    let mut a = 0.0;
    for b in [1.0, 10.0, 100.0, 1000.0, cut] {
        body += simpson(&f, a, b, 1e-15 * (1.0 + b));
        a = b;
    }
    // r^{q−2m}(1 − m r^{−2})
    let e1 = q - 2.0 * m + 1.0;
    let e2 = e1 - 2.0;
    let tail = -cut.powf(e1) / e1 + m * cut.powf(e2) / e2;
    body + tail
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
