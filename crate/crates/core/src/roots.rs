//! Scalar root finding and minimisation on real intervals.

use crate::scalar::Real;

/// Brent's method on a bracket with `fa`, `fb` of opposite sign (or zero).
/// Stops when the bracket is narrower than `xtol`.
pub fn brent<T: Real, F: FnMut(T) -> T>(mut f: F, mut a: T, mut b: T, mut fa: T, mut fb: T, xtol: T, max_iter: usize) -> (T, T) {
    if fa == T::zero() {
        return (a, fa);
    }
    if fb == T::zero() {
        return (b, fb);
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = two * T::epsilon() * b.abs() + half * xtol;
        let m = half * (c - b);
        if m.abs() <= tol || fb == T::zero() {
            break;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if two * p < (T::lit(3.0) * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b = b + if d.abs() > tol { d } else if m > T::zero() { tol } else { -tol };
        fb = f(b);
    }
    (b, fb)
}

/// Golden-section minimisation of `f` on [a, b].
pub fn golden_min<T: Real, F: FnMut(T) -> T>(mut f: F, mut a: T, mut b: T, xtol: T, max_iter: usize) -> (T, T) {
    let g = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (b - a).abs() <= xtol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 { (x1, f1) } else { (x2, f2) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_sqrt2() {
        let f = |x: f64| x * x - 2.0;
        let (x, _) = brent(f, 0.0, 2.0, f(0.0), f(2.0), 1e-15, 100);
        assert!((x - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn golden_finds_minimum() {
        let (x, _) = golden_min(|x: f64| (x - 0.3).powi(2), -1.0, 2.0, 1e-10, 200);
        assert!((x - 0.3).abs() < 1e-9);
    }
}
