//! Roots of complex monic cubics: Cardano with deflation and Newton polish,
//! and a shifted-QR companion fallback near multiple roots.

use crate::scalar::{cr, omega, Real, C};

fn horner<T: Real>(coef: [C<T>; 3], x: C<T>) -> (C<T>, C<T>) {
    // x³ + c2 x² + c1 x + c0 and its derivative.
    let [c2, c1, c0] = coef;
    let f = ((x + c2) * x + c1) * x + c0;
    let df = (x * T::lit(3.0) + c2 * T::lit(2.0)) * x + c1;
    (f, df)
}

fn cardano<T: Real>(c2: C<T>, c1: C<T>, c0: C<T>) -> [C<T>; 3] {
    let third = T::one() / T::lit(3.0);
    let shift = c2 * third;
    let p = c1 - c2 * c2 * third;
    let q = c2 * c2 * c2 * T::lit(2.0 / 27.0) - c2 * c1 * third + c0;
    let half_q = q * T::lit(0.5);
    let disc = (half_q * half_q + p * p * p * T::lit(1.0 / 27.0)).sqrt();
    let w1 = -half_q + disc;
    let w2 = -half_q - disc;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    let mut out = [cr(T::zero()); 3];
    if w.norm() == T::zero() {
        // p = q = 0: triple root.
        return [-shift; 3];
    }
    let u = w.cbrt();
    let om = omega::<T>();
    let mut uk = u;
    for r in out.iter_mut() {
        let vk = -p / (uk * T::lit(3.0));
        *r = uk + vk - shift;
        uk = uk * om;
    }
    out
}

fn eig2<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> (C<T>, C<T>) {
    let half = T::lit(0.5);
    let m = (a + d) * half;
    let s = ((a - d) * (a - d) * T::lit(0.25) + b * c).sqrt();
    (m + s, m - s)
}

/// Eigenvalues of the companion matrix by shifted QR with Givens rotations.
pub fn companion_roots<T: Real>(c2: C<T>, c1: C<T>, c0: C<T>) -> [C<T>; 3] {
    let zero = cr(T::zero());
    let one = cr(T::one());
    let mut h = [[-c2, -c1, -c0], [one, zero, zero], [zero, one, zero]];
    let eps = T::epsilon();
    for iter in 0..200 {
        let sub = h[2][1].norm();
        if sub <= eps * (h[2][2].norm() + h[1][1].norm()) {
            let (a, b) = eig2(h[0][0], h[0][1], h[1][0], h[1][1]);
            return [a, b, h[2][2]];
        }
        if h[1][0].norm() <= eps * (h[0][0].norm() + h[1][1].norm()) {
            let (a, b) = eig2(h[1][1], h[1][2], h[2][1], h[2][2]);
            return [h[0][0], a, b];
        }
        let (e1, e2) = eig2(h[1][1], h[1][2], h[2][1], h[2][2]);
        let mut mu = if (e1 - h[2][2]).norm() < (e2 - h[2][2]).norm() { e1 } else { e2 };
        if iter % 11 == 10 {
            // Exceptional shift against cycling.
            mu = mu + cr(sub);
        }
        for (i, row) in h.iter_mut().enumerate() {
            row[i] = row[i] - mu;
        }
        let mut rots = [(cr(T::zero()), cr(T::zero())); 2];
        for k in 0..2 {
            let (x, y) = (h[k][k], h[k + 1][k]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == T::zero() { (one, zero) } else { (x / r, y / r) };
            rots[k] = (cs, sn);
            for j in 0..3 {
                let (a, b) = (h[k][j], h[k + 1][j]);
                h[k][j] = cs.conj() * a + sn.conj() * b;
                h[k + 1][j] = -sn * a + cs * b;
            }
        }
        for (k, &(cs, sn)) in rots.iter().enumerate() {
            for row in h.iter_mut() {
                let (a, b) = (row[k], row[k + 1]);
                row[k] = a * cs + b * sn;
                row[k + 1] = -a * sn.conj() + b * cs.conj();
            }
        }
        for (i, row) in h.iter_mut().enumerate() {
            row[i] = row[i] + mu;
        }
    }
    [h[0][0], h[1][1], h[2][2]]
}

fn polish<T: Real>(coef: [C<T>; 3], x: C<T>, guard: T) -> C<T> {
    // Newton in the orientation that keeps the root of moderate size:
    // for |x| < 1 iterate on the reversed polynomial in 1/x.
    let [c2, c1, c0] = coef;
    let small = x.norm() < T::one() && c0.norm() > T::zero();
    let (work, mut y) = if small {
        let r = [c1 / c0, c2 / c0, c0.inv()];
        (r, x.inv())
    } else {
        (coef, x)
    };
    let y0 = y;
    let (mut fy, _) = horner(work, y);
    for _ in 0..6 {
        let (_, d) = horner(work, y);
        if d.norm() == T::zero() {
            break;
        }
        let cand = y - fy / d;
        let (fc, _) = horner(work, cand);
        if !(fc.norm() < fy.norm()) || (cand - y0).norm() > guard * y0.norm().max(T::min_positive_value()) {
            break;
        }
        y = cand;
        fy = fc;
    }
    if small { y.inv() } else { y }
}

/// Whether the roots are close to a multiple root relative to their size.
pub fn near_multiple<T: Real>(r: &[C<T>; 3]) -> bool {
    let scale = r.iter().fold(T::zero(), |a, x| a.max(x.norm()));
    if scale == T::zero() {
        return true;
    }
    let d = (r[0] - r[1]) * (r[0] - r[2]) * (r[1] - r[2]);
    let disc = d.norm_sqr();
    disc < T::lit(1e-12) * scale.powi(6)
}

/// Roots of x³ + c2 x² + c1 x + c0, sorted by decreasing modulus.
pub fn monic_cubic_roots<T: Real>(c2: C<T>, c1: C<T>, c0: C<T>) -> [C<T>; 3] {
    let coef = [c2, c1, c0];
    let mut r = cardano(c2, c1, c0);
    if near_multiple(&r) {
        r = companion_roots(c2, c1, c0);
    }
    r.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(std::cmp::Ordering::Equal));
    let big = polish(coef, r[0], T::lit(0.1));
    if big.norm() == T::zero() {
        return [big; 3];
    }
    // Deflate using Vieta relations anchored on the largest root.
    let prod = -c0 / big;
    let sum = (c1 - prod) / big;
    let disc = (sum * sum - prod * T::lit(4.0)).sqrt();
    let qa = sum + disc;
    let qb = sum - disc;
    let q = if qa.norm() >= qb.norm() { qa } else { qb } * T::lit(0.5);
    let (x1, x2) = if q.norm() == T::zero() { (q, q) } else { (q, prod / q) };
    let mut out = [big, x1, x2];
    let sep = (x1 - x2).norm();
    if sep > T::lit(1e-6) * x1.norm().max(x2.norm()) {
        out[1] = polish(coef, x1, T::lit(0.1));
        out[2] = polish(coef, x2, T::lit(0.1));
    }
    out.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(std::cmp::Ordering::Equal));
    out
}
