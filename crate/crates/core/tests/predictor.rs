mod common;

use blowup::critical::{find_critical, CriticalPoint, SearchConfig};
use blowup::predictor::*;
use blowup::*;
use common::*;
use proptest::prelude::*;

fn point(points: Vec<Vec<f64>>, scales: Vec<f64>) -> CriticalPoint<f64> {
    CriticalPoint {
        config: PeakConfig::new(points, scales).unwrap(),
        psi_value: 0.0,
        grad_norm: 0.0,
        hessian_eigenvalues: vec![],
        morse_index: 0,
        nondegenerate: true,
        m_matrix_positive: true,
    }
}

fn ball_point() -> CriticalPoint<f64> {
    let g = unit_ball(6);
    let consts = UniversalConstants64::new(6).unwrap();
    find_critical(&g, 1, &SearchConfig::for_domain(&g), &consts).unwrap().remove(0)
}

#[test]
fn ball_rates_at_small_epsilon() {
    let cp = ball_point();
    let lstar = (1.0f64 / 48.0).sqrt();
    let p = predict(&cp, 1e-4, 6).unwrap();
    assert!(rel(p.per_peak[0].lambda_eps, 100.0 / lstar) < 1e-6);
    assert!(rel(p.per_peak[0].height, p.per_peak[0].lambda_eps.powi(2)) < 1e-14);
    assert_eq!(p.validity_note, ValidityNote::Ok);
    assert!(p.neglected_error_order().contains("log"));
}

#[test]
fn dimension_four_and_five() {
    let cp = ball_point();
    assert_eq!(predict(&cp, 1e-3, 4).unwrap_err(), Error::ExponentSingularity { n: 4 });
    assert!(matches!(predict(&cp, 1e-3, 3), Err(Error::InvalidDimension { .. })));
    assert!(predict(&cp, 1e-3, 5).is_err());
    assert!(predict(&cp, 0.0, 6).is_err());

    let five = point(vec![vec![0.0; 5]], vec![0.7]);
    let p = predict(&five, 1e-3, 5).unwrap();
    assert_eq!(p.validity_note, ValidityNote::NEquals5Warning);
    assert!(rel(p.per_peak[0].lambda_eps, 1e3 / 0.7) < 1e-12);
    assert!(rel(p.per_peak[0].height, p.per_peak[0].lambda_eps.powf(1.5)) < 1e-14);
}

#[test]
fn far_field_is_a_multiple_of_green() {
    let g = unit_ball(6);
    let consts = UniversalConstants64::new(6).unwrap();
    let p = predict(&ball_point(), 1e-4, 6).unwrap();
    let x = vec![0.1, 0.4, -0.2, 0.0, 0.3, 0.0];
    let expected = consts.a_const * ball_green_oracle(&[0.0; 6], &x, 1.0) / p.per_peak[0].height;
    assert!(rel(far_field(&g, &p, &x, &consts).unwrap(), expected) < 1e-10);
    assert!(matches!(far_field(&g, &p, &e1(6, 0.05), &consts), Err(Error::NearPeak { .. })));
    assert!(rel(p.default_radius(&g), 0.1) < 1e-6);
}

#[test]
fn far_field_adds_over_peaks() {
    let g = separated_balls(6, 2);
    let consts = UniversalConstants64::new(6).unwrap();
    let both = predict(&point(vec![vec![0.0; 6], e1(6, 4.0)], vec![0.2, 0.3]), 1e-4, 6).unwrap();
    let x = vec![0.1, 0.4, -0.2, 0.0, 0.3, 0.0];
    let first = BlowupPrediction { per_peak: vec![both.per_peak[0].clone()], ..both.clone() };
    assert!(rel(far_field(&g, &both, &x, &consts).unwrap(), far_field(&g, &first, &x, &consts).unwrap()) < 1e-14);
}

#[test]
fn approximate_field_peaks_at_the_height() {
    let g = unit_ball(6);
    let consts = UniversalConstants64::new(6).unwrap();
    let p = predict(&ball_point(), 1e-4, 6).unwrap();
    let s = approximate_field(&g, &p, &[vec![0.0; 6]], &consts).unwrap();
    // C_6 = (6 · 4)^{4/4}
    let peak = 24.0 * p.per_peak[0].height;
    assert!(rel(s.values[0], peak) < 1e-6);
}

#[test]
fn approximate_field_matches_far_field_for_sharp_peaks() {
    let g = unit_ball(6);
    let consts = UniversalConstants64::new(6).unwrap();
    let p = predict(&ball_point(), 1e-4, 6).unwrap();
    assert!(p.per_peak[0].lambda_eps > 50.0);
    let grid: Vec<Vec<f64>> = (1..8).map(|i| e1(6, 0.1 * i as f64 + 0.05)).collect();
    let s = approximate_field(&g, &p, &grid, &consts).unwrap();
    for (y, v) in grid.iter().zip(&s.values) {
        assert!(rel(*v, far_field(&g, &p, y, &consts).unwrap()) < 0.05, "{y:?}");
    }
}

#[test]
fn disjoint_components_do_not_interact() {
    let g = separated_balls(6, 2);
    let consts = UniversalConstants64::new(6).unwrap();
    let both = predict(&point(vec![vec![0.0; 6], e1(6, 4.0)], vec![0.2, 0.3]), 1e-4, 6).unwrap();
    let first = BlowupPrediction { per_peak: vec![both.per_peak[0].clone()], ..both.clone() };
    let grid = vec![e1(6, 0.3), vec![0.0, 0.2, 0.1, 0.0, 0.0, 0.0]];
    let a = approximate_field(&g, &both, &grid, &consts).unwrap();
    let b = approximate_field(&g, &first, &grid, &consts).unwrap();
    assert_eq!(a.values, b.values);
    assert!(approximate_field(&g, &both, &[e1(6, 2.0)], &consts).is_err());
}

#[test]
fn samples_export_csv_and_sidecar() {
    let g = unit_ball(6);
    let consts = UniversalConstants64::new(6).unwrap();
    let p = predict(&ball_point(), 1e-3, 6).unwrap();
    let grid = vec![e1(6, 0.5), e1(6, -0.5)];
    let s = approximate_field(&g, &p, &grid, &consts).unwrap();
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,x3,x4,x5,x6,value");
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row.len(), 7);
    assert_eq!(row[0], 0.5);
    assert!(rel(row[6], s.values[0]) < 1e-15);
    assert_eq!(lines.count(), 1);

    let side: serde_json::Value = serde_json::from_str(&s.sidecar_json()).unwrap();
    assert_eq!(side["prediction"]["dimension"], 6);
    assert_eq!(side["prediction"]["validity_note"], "ok");
    assert!(side["neglected_error_order"].as_str().unwrap().starts_with("O("));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn halving_rule_doubles_concentration(
        exp in -8.0f64..-1.0,
        n in 5usize..9,
        lam in 0.05f64..3.0,
    ) {
        let eps = 10f64.powf(exp);
        let cp = point(vec![vec![0.0; n]], vec![lam]);
        let a = predict(&cp, eps, n).unwrap();
        let b = predict(&cp, eps / 2f64.powi(n as i32 - 4), n).unwrap();
        prop_assert!(rel(b.per_peak[0].lambda_eps, 2.0 * a.per_peak[0].lambda_eps) < 1e-12);
        let half = (n as f64 - 2.0) / 2.0;
        prop_assert!(rel(b.per_peak[0].height, 2f64.powf(half) * a.per_peak[0].height) < 1e-12);
    }
}
