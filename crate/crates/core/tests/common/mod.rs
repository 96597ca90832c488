//! Independent closed-form oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use thirdorder::{Coefficients64, Mat3};

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn cos_p() -> Coefficients64 {
    Coefficients64::from_fourier(&[(1, c(1.0, 0.0))], &[]).unwrap()
}

pub fn cos_q() -> Coefficients64 {
    Coefficients64::from_fourier(&[], &[(1, c(1.0, 0.0))]).unwrap()
}

pub fn const_p(p: f64) -> Coefficients64 {
    Coefficients64::from_fourier(&[(0, c(p, 0.0))], &[]).unwrap()
}

pub fn cos_p_cos_q() -> Coefficients64 {
    Coefficients64::from_fourier(&[(1, c(1.0, 0.0))], &[(1, c(1.0, 0.0))]).unwrap()
}

pub fn mixed() -> Coefficients64 {
    Coefficients64::from_fourier(&[(1, c(0.6, 0.3)), (2, c(-0.2, 0.1))], &[(1, c(0.4, -0.5)), (3, c(0.1, 0.2))]).unwrap()
}

/// Roots of k³ − 2pk − λ = 0 by Durand–Kerner iteration.
pub fn k_roots(p: f64, lambda: C) -> [C; 3] {
    let f = |k: C| k * k * k - k * (2.0 * p) - lambda;
    let scale = lambda.norm().cbrt().max(1.0);
    let mut r = [c(0.4, 0.9) * scale, c(0.4, 0.9).powi(2) * scale, c(0.4, 0.9).powi(3) * scale];
    for _ in 0..500 {
        let old = r;
        for i in 0..3 {
            let mut den = c(1.0, 0.0);
            for j in 0..3 {
                if j != i {
                    den *= r[i] - r[j];
                }
            }
            r[i] -= f(r[i]) / den;
        }
        if (0..3).all(|i| (r[i] - old[i]).norm() <= 1e-16 * scale) {
            break;
        }
    }
    // Newton polish.
    for x in r.iter_mut() {
        for _ in 0..3 {
            let d = *x * *x * 3.0 - 2.0 * p;
            *x -= f(*x) / d;
        }
    }
    r
}

/// exp(P + Q) for constant p, q = 0 via Sylvester's formula on the
/// eigenvalues ik_j.
pub fn const_p_monodromy(p: f64, lambda: C) -> Mat3<f64> {
    let i = c(0.0, 1.0);
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let a = Mat3([[o, one, o], [c(-p, 0.0), o, one], [-i * lambda, c(-p, 0.0), o]]);
    let mu = k_roots(p, lambda).map(|k| i * k);
    let mut out = Mat3::zero();
    for j in 0..3 {
        let mut term = Mat3::identity();
        let mut den = one;
        for l in 0..3 {
            if l != j {
                term = term * (a - Mat3::identity().scale(mu[l]));
                den *= mu[j] - mu[l];
            }
        }
        out += term.scale(mu[j].exp() / den);
    }
    out
}

/// Σ e^{ik_j}, the trace for constant p.
pub fn const_p_trace(p: f64, lambda: C) -> C {
    k_roots(p, lambda).iter().map(|k| (c(0.0, 1.0) * k).exp()).sum()
}

/// λ^{1/3} with arg λ taken in (−π/2, 3π/2].
pub fn cube_root(lambda: C) -> C {
    if lambda.norm() == 0.0 {
        return c(0.0, 0.0);
    }
    let mut arg = lambda.arg();
    if arg <= -std::f64::consts::FRAC_PI_2 {
        arg += 2.0 * std::f64::consts::PI;
    }
    C::from_polar(lambda.norm().cbrt(), arg / 3.0)
}

pub fn omega_k(k: i32) -> C {
    C::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0)
}

/// e^{iz} + e^{iωz} + e^{iω²z}.
pub fn t0(lambda: C) -> C {
    let z = cube_root(lambda);
    (0..3).map(|k| (c(0.0, 1.0) * z * omega_k(k)).exp()).sum()
}

/// (y + √3x)/2 for z = x + iy.
pub fn z0(lambda: C) -> f64 {
    let z = cube_root(lambda);
    0.5 * (z.im + 3f64.sqrt() * z.re)
}

/// 64 Π sinh²(√3ωᵏz/2).
pub fn rho0(lambda: C) -> C {
    let z = cube_root(lambda);
    let s: C = (0..3).map(|k| (z * omega_k(k) * (3f64.sqrt() / 2.0)).sinh().powi(2)).product();
    s * 64.0
}

/// −8i Π sin(ωᵏz/2) and 8 Π cos(ωᵏz/2).
pub fn d0(lambda: C) -> (C, C) {
    let z = cube_root(lambda);
    let s: C = (0..3).map(|k| (z * omega_k(k) * 0.5).sin()).product();
    let co: C = (0..3).map(|k| (z * omega_k(k) * 0.5).cos()).product();
    (s * c(0.0, -8.0), co * 8.0)
}
