mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use thirdorder::quadrature::GaussLegendre;
use thirdorder::{Coefficients64, Error, Field};

#[test]
fn cosine_from_both_modes() {
    let k = Coefficients64::from_fourier(&[(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))], &[]).unwrap();
    assert_eq!(k, cos_p());
    assert!((k.eval(Field::P, 0.0) - 2.0).abs() < 1e-15);
    assert!(k.eval(Field::P, 0.25).abs() < 1e-15);
    assert_eq!(k.eval(Field::Q, 0.3), 0.0);
}

#[test]
fn constant_p() {
    let k = const_p(0.7);
    assert_eq!(k.p0(), 0.7);
    for t in [0.0, 0.3, 0.9] {
        assert!((k.eval(Field::P, t) - 0.7).abs() < 1e-15);
    }
}

#[test]
fn rejects_bad_input() {
    assert!(matches!(Coefficients64::from_fourier(&[], &[(0, c(0.5, 0.0))]), Err(Error::NonzeroQMean(_))));
    assert!(matches!(Coefficients64::from_fourier(&[(2, c(1.0, 0.0)), (2, c(1.0, 0.0))], &[]), Err(Error::DuplicateMode(2))));
    assert!(matches!(Coefficients64::from_fourier(&[(1, c(1.0, 0.0)), (-1, c(2.0, 0.0))], &[]), Err(Error::NonRealCoefficient(1))));
    assert!(matches!(Coefficients64::from_fourier(&[(0, c(1.0, 0.5))], &[]), Err(Error::NonRealCoefficient(0))));
    assert!(matches!(Coefficients64::from_fourier(&[(3, c(f64::NAN, 0.0))], &[]), Err(Error::NonFiniteCoefficient(3))));
}

#[test]
fn autocorrelation_examples() {
    let k = cos_p();
    assert!((k.autocorrelation_eta(0.0) - 2.0).abs() < 1e-14);
    assert!((k.autocorrelation_eta(0.5) + 2.0).abs() < 1e-14);
    assert_eq!(Coefficients64::zero().autocorrelation_eta(0.3), 0.0);
}

#[test]
fn invariant_examples() {
    assert!((cos_p().invariant_h().unwrap() - 1.0 / (6.0 * PI * PI)).abs() < 1e-16);
    assert!((cos_p().invariant_h().unwrap() - 0.0168869).abs() < 1e-7);
    assert!((cos_q().invariant_h().unwrap() + 1.0 / (8.0 * PI.powi(4))).abs() < 1e-18);
    assert_eq!(Coefficients64::zero().invariant_h().unwrap(), 0.0);
    assert!(matches!(const_p(1.0).invariant_h(), Err(Error::NonzeroPMean(_))));
}

#[test]
fn kappa_of_cosines() {
    // ∫|2cos| = 4/π.
    let k = cos_p_cos_q().kappa(512).value;
    assert!((k - 8.0 / PI).abs() < 1e-12);
    assert!((const_p(-1.5).kappa(512).value - 1.5).abs() < 1e-14);
}

fn arb_modes(max_deg: i64) -> impl Strategy<Value = Vec<(i64, f64, f64)>> {
    prop::collection::vec((1..=max_deg, -1.0..1.0f64, -1.0..1.0f64), 0..4)
}

fn build(p: &[(i64, f64, f64)], q: &[(i64, f64, f64)]) -> Coefficients64 {
    let mut seen = std::collections::BTreeSet::new();
    let p: Vec<_> = p.iter().filter(|m| seen.insert(m.0)).map(|&(n, a, b)| (n, c(a, b))).collect();
    let mut seen = std::collections::BTreeSet::new();
    let q: Vec<_> = q.iter().filter(|m| seen.insert(m.0)).map(|&(n, a, b)| (n, c(a, b))).collect();
    Coefficients64::from_fourier(&p, &q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eta_matches_quadrature(p in arb_modes(6), u in 0.0..1.0f64) {
        let k = build(&p, &[]);
        let gl = GaussLegendre::<f64>::new(64);
        let (xs, ws) = gl.composite(0.0, 1.0, 32);
        let direct: f64 = xs.iter().zip(&ws).map(|(&t, &w)| w * k.eval(Field::P, t) * k.eval(Field::P, t - u)).sum();
        prop_assert!((k.autocorrelation_eta(u) - direct).abs() < 1e-8);
    }

    #[test]
    fn eta_is_symmetric(p in arb_modes(8)) {
        let k = build(&p, &[]);
        for j in 0..=100 {
            let u = j as f64 / 100.0;
            prop_assert!((k.autocorrelation_eta(u) - k.autocorrelation_eta(1.0 - u)).abs() < 1e-12);
        }
    }

    #[test]
    fn h_ignores_phases(p in arb_modes(5), q in arb_modes(5), th in prop::collection::vec(0.0..6.3f64, 10)) {
        let k = build(&p, &q);
        let rotate = |m: &[(i64, f64, f64)], off: usize| -> Vec<(i64, f64, f64)> {
            m.iter().enumerate().map(|(j, &(n, a, b))| {
                let r = c(a, b) * c(0.0, th[(j + off) % th.len()]).exp();
                (n, r.re, r.im)
            }).collect()
        };
        let k2 = build(&rotate(&p, 0), &rotate(&q, 5));
        let (h1, h2) = (k.invariant_h().unwrap(), k2.invariant_h().unwrap());
        prop_assert!((h1 - h2).abs() <= 1e-14 * h1.abs().max(1e-3));
    }

    #[test]
    fn kappa_converges(p in arb_modes(8), q in arb_modes(8)) {
        let k = build(&p, &q);
        prop_assert!((k.kappa(512).value - k.kappa(2048).value).abs() < 1e-8);
    }
}
