//! Finite Fourier model of the periodic coefficients p and q.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::roots::brent;
use crate::scalar::{c, cr, Real, C};

/// Selects one of the two coefficient functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    P,
    Q,
}

/// Real 1-periodic p and q stored by their Fourier coefficients for n ≥ 0;
/// negative modes follow from conjugate symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients<T> {
    p_hat: Vec<C<T>>,
    q_hat: Vec<C<T>>,
}

/// κ = ‖p‖_{L¹} + ‖q‖_{L¹}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kappa<T> {
    pub value: T,
}

fn mirror<T: Real>(entries: &[(i64, C<T>)]) -> Result<Vec<C<T>>> {
    let mut map: BTreeMap<i64, C<T>> = BTreeMap::new();
    for &(n, v) in entries {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFiniteCoefficient(n));
        }
        if map.insert(n, v).is_some() {
            return Err(Error::DuplicateMode(n));
        }
    }
    let tol = |v: C<T>| T::lit(1e-12) * v.norm().max(T::one());
    let degree = map.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0) as usize;
    let mut out = vec![cr(T::zero()); degree + 1];
    for n in 0..=degree as i64 {
        let pos = map.get(&n).copied();
        let neg = if n == 0 { None } else { map.get(&-n).copied() };
        out[n as usize] = match (pos, neg) {
            (Some(a), Some(b)) => {
                if (a - b.conj()).norm() > tol(a) {
                    return Err(Error::NonRealCoefficient(n));
                }
                a
            }
            (Some(a), None) => a,
            (None, Some(b)) => b.conj(),
            (None, None) => cr(T::zero()),
        };
    }
    let z = out[0];
    if z.im.abs() > tol(z) {
        return Err(Error::NonRealCoefficient(0));
    }
    out[0] = cr(z.re);
    while out.len() > 1 && out.last().is_some_and(|v| v.norm() == T::zero()) {
        out.pop();
    }
    Ok(out)
}

fn eval_series<T: Real>(hat: &[C<T>], t: T) -> T {
    let (s, co) = (T::TAU() * t.fract()).sin_cos();
    let e = c(co, s);
    let mut pw = e;
    let mut acc = T::zero();
    for v in &hat[1..] {
        acc += v.re * pw.re - v.im * pw.im;
        pw = pw * e;
    }
    hat[0].re + acc + acc
}

impl<T: Real> Coefficients<T> {
    /// Builds coefficients from (n, ĉₙ) lists. Supplying only n ≥ 0 mirrors
    /// the negative modes by conjugation.
    pub fn from_fourier(p_entries: &[(i64, C<T>)], q_entries: &[(i64, C<T>)]) -> Result<Self> {
        let p_hat = mirror(p_entries)?;
        let q_hat = mirror(q_entries)?;
        if q_hat[0].re != T::zero() {
            return Err(Error::NonzeroQMean(q_hat[0].re.as_f64()));
        }
        Ok(Coefficients { p_hat, q_hat })
    }

    /// p = q = 0.
    pub fn zero() -> Self {
        Coefficients { p_hat: vec![cr(T::zero())], q_hat: vec![cr(T::zero())] }
    }

    fn hat(&self, which: Field) -> &[C<T>] {
        match which {
            Field::P => &self.p_hat,
            Field::Q => &self.q_hat,
        }
    }

    /// Fourier coefficient ĉₙ for any integer n.
    pub fn coefficient(&self, which: Field, n: i64) -> C<T> {
        let h = self.hat(which);
        match h.get(n.unsigned_abs() as usize) {
            Some(&v) if n >= 0 => v,
            Some(&v) => v.conj(),
            None => cr(T::zero()),
        }
    }

    pub fn p_hat(&self, n: i64) -> C<T> {
        self.coefficient(Field::P, n)
    }

    pub fn q_hat(&self, n: i64) -> C<T> {
        self.coefficient(Field::Q, n)
    }

    /// Mean of p.
    pub fn p0(&self) -> T {
        self.p_hat[0].re
    }

    /// Largest |n| with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        let d = |h: &[C<T>]| h.iter().rposition(|v| v.norm() != T::zero()).unwrap_or(0);
        d(&self.p_hat).max(d(&self.q_hat))
    }

    pub fn is_zero(&self) -> bool {
        self.p_hat.iter().chain(&self.q_hat).all(|v| v.norm() == T::zero())
    }

    /// Stored modes n ≥ 0 of one field.
    pub fn modes(&self, which: Field) -> &[C<T>] {
        self.hat(which)
    }

    /// Real value of p or q at t (reduced mod 1).
    pub fn eval(&self, which: Field, t: T) -> T {
        eval_series(self.hat(which), t)
    }

    /// Full two-sided sum Σₙ ĉₙ e^{i2πnt} without assuming reality; its
    /// imaginary part is the reality residual.
    pub fn eval_complex(&self, which: Field, t: T) -> C<T> {
        let d = self.hat(which).len() as i64 - 1;
        (-d..=d).fold(cr(T::zero()), |acc, n| {
            let ph = T::TAU() * T::from_int(n) * t;
            acc + self.coefficient(which, n) * c(ph.cos(), ph.sin())
        })
    }

    /// (p(t), q(t)) in one pass.
    pub fn eval_pq(&self, t: T) -> (T, T) {
        (eval_series(&self.p_hat, t), eval_series(&self.q_hat, t))
    }

    /// Coefficients of (εp, εq).
    pub fn scaled(&self, eps: T) -> Self {
        Coefficients {
            p_hat: self.p_hat.iter().map(|v| *v * eps).collect(),
            q_hat: self.q_hat.iter().map(|v| *v * eps).collect(),
        }
    }

    /// η(u) = ∫₀¹ p(t)p(t−u)dt = Σₙ |p̂ₙ|² e^{i2πnu}.
    pub fn autocorrelation_eta(&self, u: T) -> T {
        let mut acc = T::zero();
        for (n, v) in self.p_hat.iter().enumerate().skip(1) {
            acc += v.norm_sqr() * (T::TAU() * T::from_usize(n).unwrap() * u).cos();
        }
        self.p_hat[0].norm_sqr() + acc + acc
    }

    /// h = (2/3) Σ_{n≥1} (|p̂ₙ|²/(2πn)² − 3|q̂ₙ|²/(2πn)⁴). Requires p̂₀ = 0.
    pub fn invariant_h(&self) -> Result<T> {
        if self.p0() != T::zero() {
            return Err(Error::NonzeroPMean(self.p0().as_f64()));
        }
        let d = self.p_hat.len().max(self.q_hat.len());
        let mut acc = T::zero();
        for n in 1..d as i64 {
            let k2 = (T::TAU() * T::from_int(n)).powi(2);
            acc += self.p_hat(n).norm_sqr() / k2 - T::lit(3.0) * self.q_hat(n).norm_sqr() / (k2 * k2);
        }
        Ok(acc * T::lit(2.0) / T::lit(3.0))
    }

    /// ∫₀¹ |f| by composite Gauss–Legendre split at the sign changes of f,
    /// using about `order` nodes in total.
    pub fn l1_norm(&self, which: Field, order: usize) -> T {
        let hat = self.hat(which);
        if hat.iter().all(|v| v.norm() == T::zero()) {
            return T::zero();
        }
        let f = |t: T| eval_series(hat, t);
        let m = (64 * hat.len()).max(256);
        let step = T::one() / T::from_usize(m).unwrap();
        let mut breaks = vec![T::zero()];
        let mut prev = f(T::zero());
        for k in 1..=m {
            let t = step * T::from_usize(k).unwrap();
            let cur = f(t);
            if (prev < T::zero()) != (cur < T::zero()) && prev != T::zero() && k < m {
                let (r, _) = brent(f, t - step, t, prev, cur, T::epsilon(), 200);
                breaks.push(r);
            }
            prev = cur;
        }
        breaks.push(T::one());
        let pieces = breaks.len() - 1;
        let per = (order / pieces).max(16);
        let gl = GaussLegendre::<T>::new(per);
        breaks.windows(2).map(|w| gl.integrate(w[0], w[1], f).abs()).fold(T::zero(), |a, b| a + b)
    }

    pub fn kappa(&self, order: usize) -> Kappa<T> {
        Kappa { value: self.l1_norm(Field::P, order) + self.l1_norm(Field::Q, order) }
    }

    /// Σ|p̂ₙ|² + Σ|q̂ₙ|² over all n, a cheap size measure.
    pub fn l2_sq(&self) -> T {
        let s = |h: &[C<T>]| h.iter().enumerate().fold(T::zero(), |a, (n, v)| a + v.norm_sqr() * if n == 0 { T::one() } else { T::lit(2.0) });
        s(&self.p_hat) + s(&self.q_hat)
    }
}
