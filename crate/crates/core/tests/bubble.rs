mod common;

use blowup::bubble::*;
use blowup::*;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn quadrature_a(n: usize) -> f64 {
    let nf = n as f64;
    let c = bubble_normalization::<f64>(Dimension::new(n).unwrap());
    sphere_area_recursive(n) * c.powf((nf + 2.0) / (nf - 2.0)) * radial_integral(nf - 1.0, (nf + 2.0) / 2.0)
}

fn quadrature_b(n: usize) -> f64 {
    let nf = n as f64;
    let c = bubble_normalization::<f64>(Dimension::new(n).unwrap());
    sphere_area_recursive(n) * c * c * radial_integral(nf - 1.0, nf - 2.0)
}

#[test]
fn sphere_areas_match_recursion_and_monte_carlo() {
    assert!(rel(sphere_area::<f64>(2).unwrap(), 2.0 * PI) < 1e-15);
    assert!(rel(sphere_area::<f64>(6).unwrap(), PI.powi(3)) < 1e-14);
    assert!(rel(sphere_area::<f64>(5).unwrap(), 8.0 * PI * PI / 3.0) < 1e-14);
    for n in 2..=9 {
        assert!(rel(sphere_area::<f64>(n).unwrap(), sphere_area_recursive(n)) < 1e-13, "n={n}");
    }
    // |B_1| = ω_N / N from the fraction of the cube [-1,1]^6 inside the unit ball
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let samples = 400_000;
    let inside = (0..samples)
        .filter(|_| (0..6).map(|_| rng.random_range(-1.0f64..1.0).powi(2)).sum::<f64>() < 1.0)
        .count();
    let estimate = 6.0 * 64.0 * inside as f64 / samples as f64;
    assert!(rel(estimate, PI.powi(3)) < 0.05, "{estimate}");
}

#[test]
fn normalization_and_peak_values() {
    let d6 = Dimension::new(6).unwrap();
    assert!(rel(bubble_normalization::<f64>(d6), 24.0) < 1e-15);
    let p = BubbleParams::new(vec![0.0; 6], 1.0).unwrap();
    assert!(rel(bubble_value(&p, &[0.0; 6], d6), 24.0) < 1e-15);
    assert!(rel(bubble_value(&p, &e1(6, 1.0), d6), 6.0) < 1e-15);
}

#[test]
fn constants_against_radial_quadrature() {
    for n in 5..=8 {
        let a = constant_a::<f64>(n).unwrap();
        let b = constant_b::<f64>(n).unwrap();
        assert!(rel(a, quadrature_a(n)) < 1e-8, "A n={n}: {a} vs {}", quadrature_a(n));
        assert!(rel(b, quadrature_b(n)) < 1e-8, "B n={n}: {b} vs {}", quadrature_b(n));
    }
    let six = 96.0 * PI.powi(3);
    assert!(rel(constant_a::<f64>(6).unwrap(), six) < 1e-14);
    assert!(rel(constant_b::<f64>(6).unwrap(), six) < 1e-14);
    let c5 = 15f64.powf(0.75);
    assert!(rel(constant_a::<f64>(5).unwrap(), 3.0 * sphere_area_recursive(5) * c5) < 1e-14);
}

#[test]
fn dimension_four_is_rejected() {
    assert!(matches!(constant_b::<f64>(4), Err(Error::InvalidDimension { n: 4, .. })));
    assert!(Dimension::new(4).is_err());
}

#[test]
fn bubble_solves_critical_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [5usize, 6, 7] {
        let d = Dimension::new(n).unwrap();
        let p = BubbleParams::new(vec![0.1; n], 1.7).unwrap();
        let expo = (n as f64 + 2.0) / (n as f64 - 2.0);
        for _ in 0..10 {
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let h = 1e-3;
            let u0 = bubble_value(&p, &y, d);
            let mut lap = 0.0;
            for i in 0..n {
                let mut yp = y.clone();
                let mut ym = y.clone();
                yp[i] += h;
                ym[i] -= h;
                lap += (bubble_value(&p, &yp, d) - 2.0 * u0 + bubble_value(&p, &ym, d)) / (h * h);
            }
            let rhs = u0.powf(expo);
            assert!(rel(-lap, rhs) < 1e-4, "n={n}: {} vs {rhs}", -lap);
        }
    }
}

#[test]
fn projected_bubble_at_ball_center() {
    let g = unit_ball(6);
    let consts = UniversalConstants64::new(6).unwrap();
    let lam = 30.0;
    let p = BubbleParams::new(vec![0.0; 6], lam).unwrap();
    let c6 = singular_constant_oracle(6);
    for y in [vec![0.0; 6], e1(6, 0.5), e1(6, 0.9)] {
        let expected = bubble_value(&p, &y, Dimension::new(6).unwrap()) - consts.a_const / (lam * lam) * c6;
        assert!(rel(projected_bubble(&p, &y, &g, &consts).unwrap(), expected) < 1e-12);
    }
    // approximate boundary vanishing: |PU| on ∂Ω shrinks like λ^{−(N+2)/2}
    let on_boundary = |lam: f64| {
        let p = BubbleParams::new(vec![0.0; 6], lam).unwrap();
        projected_bubble(&p, &e1(6, 1.0 - 1e-12), &g, &consts).unwrap().abs()
    };
    let ratio = on_boundary(20.0) / on_boundary(40.0);
    assert!(ratio > 2f64.powi(4) * 0.9, "{ratio}");
}

proptest! {
    #[test]
    fn rescaling_identity(lam in 0.05f64..20.0, y in prop::collection::vec(-2.0f64..2.0, 6)) {
        let d = Dimension::new(6).unwrap();
        let x = vec![0.3, -0.1, 0.0, 0.2, 0.0, 0.5];
        let p = BubbleParams::new(x.clone(), lam).unwrap();
        let unit = BubbleParams::new(vec![0.0; 6], 1.0).unwrap();
        let shifted: Vec<f64> = y.iter().zip(&x).map(|(a, b)| lam * (a - b)).collect();
        let expected = lam.powi(2) * bubble_value(&unit, &shifted, d);
        prop_assert!(rel(bubble_value(&p, &y, d), expected) < 1e-12);
    }

    #[test]
    fn projected_bubble_decays_with_scale(lam in 5.0f64..50.0) {
        let g = unit_ball(6);
        let consts = UniversalConstants64::new(6).unwrap();
        let y = e1(6, 0.6);
        let p = |l: f64| projected_bubble(&BubbleParams::new(e1(6, -0.2), l).unwrap(), &y, &g, &consts).unwrap();
        prop_assert!(p(lam).abs() * lam.powi(2) < 10.0 * p(5.0).abs() * 25.0);
    }
}
