//! Adaptive Dormand–Prince 5(4) integration of linear 3×3 matrix systems
//! Y' = A(t)Y with a separated exponential scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::scalar::Real;

/// Controls for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions<T> {
    /// Local relative error tolerance per step.
    pub tolerance: T,
    /// Budget of attempted steps (accepted plus rejected).
    pub max_steps: usize,
    /// Entry magnitude above which the state is renormalised.
    pub scaling_threshold: T,
}

impl<T: Real> Default for IntegratorOptions<T> {
    fn default() -> Self {
        IntegratorOptions { tolerance: T::lit(1e-10), max_steps: 2_000_000, scaling_threshold: T::lit(1e2) }
    }
}

impl<T: Real> IntegratorOptions<T> {
    pub fn with_tolerance(tolerance: T) -> Self {
        IntegratorOptions { tolerance, ..Default::default() }
    }
}

/// Result of a propagation: the true solution is `e^{log_scale} · matrix`.
#[derive(Debug, Clone, Copy)]
pub struct Propagated<T> {
    pub matrix: Mat3<T>,
    pub log_scale: T,
    pub accepted: usize,
    pub rejected: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo<T: Real>(y: &Mat3<T>, h: T, terms: &[(f64, &Mat3<T>)]) -> Mat3<T> {
    let mut out = *y;
    for &(w, k) in terms {
        if w == 0.0 {
            continue;
        }
        let s = h * T::lit(w);
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = out.0[i][j] + k.0[i][j] * s;
            }
        }
    }
    out
}

/// Integrates Y' = rhs(t, Y) from Y(0) = I to `t_end`, where `rhs` is linear
/// in Y. `freq` is a characteristic frequency used for the first step.
pub fn integrate<T, F>(rhs: F, t_end: T, freq: T, opts: &IntegratorOptions<T>) -> Result<Propagated<T>>
where
    T: Real,
    F: Fn(T, &Mat3<T>) -> Mat3<T>,
{
    if !(opts.tolerance > T::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let tol = opts.tolerance;
    let mut y = Mat3::<T>::identity();
    let mut log_scale = T::zero();
    let mut t = T::zero();
    let mut h = (T::lit(0.05) / freq.max(T::one())).min(t_end);
    let mut k1 = rhs(t, &y);
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let fifth = T::lit(0.2);
    let tiny = T::min_positive_value().sqrt();
    while t < t_end {
        if accepted + rejected >= opts.max_steps || h <= t_end * T::epsilon() * T::lit(16.0) {
            return Err(Error::ToleranceNotMet { t: t.as_f64(), steps: accepted + rejected });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = rhs(t + h * T::lit(C2), &combo(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + h * T::lit(C3), &combo(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + h * T::lit(C4), &combo(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(t + h * T::lit(C5), &combo(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = rhs(t + h, &combo(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = combo(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let t_new = if last { t_end } else { t + h };
        let k7 = rhs(t_new, &y_new);
        let zero = Mat3::zero();
        let err_m = combo(&zero, h, &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
        let global = y_new.max_abs().max(y.max_abs());
        let mut err = T::zero();
        for i in 0..3 {
            let sc = y.row_max(i).max(y_new.row_max(i)).max(global * tiny);
            for j in 0..3 {
                err = err.max(err_m.0[i][j].norm() / (tol * sc));
            }
        }
        if !err.is_finite() {
            rejected += 1;
            h *= fifth;
            continue;
        }
        let fac = if err == T::zero() { T::lit(5.0) } else { T::lit(0.9) * err.powf(-fifth) };
        if err <= T::one() {
            accepted += 1;
            t = t_new;
            y = y_new;
            k1 = k7;
            let m = y.max_abs();
            if m > opts.scaling_threshold {
                let inv = m.recip();
                y = y.scale_real(inv);
                k1 = k1.scale_real(inv);
                log_scale += m.ln();
            }
            h *= fac.min(T::lit(5.0)).max(fifth);
        } else {
            rejected += 1;
            h *= fac.min(T::lit(0.9)).max(fifth);
        }
    }
    Ok(Propagated { matrix: y, log_scale, accepted, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn diagonal_exponential() {
        let d = [c(0.0, 3.0), c(1.5, -2.0), c(-4.0, 0.5)];
        let a = Mat3::diag(d);
        let out = integrate(|_, y: &Mat3<f64>| a * *y, 1.0, 4.0, &IntegratorOptions::with_tolerance(1e-12)).unwrap();
        let s = out.log_scale.exp();
        for (i, di) in d.iter().enumerate() {
            let got = out.matrix.0[i][i] * s;
            assert!((got - di.exp()).norm() < 1e-10 * di.exp().norm().max(1.0));
        }
    }

    #[test]
    fn scaling_keeps_entries_bounded() {
        let a = Mat3::diag([c(60.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let out = integrate(|_, y: &Mat3<f64>| a * *y, 1.0, 60.0, &IntegratorOptions::default()).unwrap();
        assert!(out.matrix.max_abs() <= 1e2 && out.matrix.max_abs() >= 1e-2);
        assert!((out.log_scale + out.matrix.0[0][0].re.ln() - 60.0).abs() < 1e-8);
    }
}
