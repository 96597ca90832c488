use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::{cr, Real, C};

/// Dense 3×3 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3<T>(pub [[C<T>; 3]; 3]);

impl<T: Real> Mat3<T> {
    pub fn zero() -> Self {
        Mat3([[cr(T::zero()); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag([cr(T::one()); 3])
    }

    pub fn diag(d: [C<T>; 3]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn from_rows(rows: [[C<T>; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x = *x * s);
        m
    }

    pub fn scale_real(&self, s: T) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x = *x * s);
        m
    }

    pub fn trace(&self) -> C<T> {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> C<T> {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Inverse by adjugate; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == T::zero() {
            return None;
        }
        let a = &self.0;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        Some(Mat3(adj).scale(d.inv()))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = self.transpose();
        m.0.iter_mut().flatten().for_each(|x| *x = x.conj());
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x = x.conj());
        m
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |acc, x| acc.max(x.norm()))
    }

    pub fn frobenius(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
    }

    pub fn row_max(&self, i: usize) -> T {
        self.0[i].iter().fold(T::zero(), |acc, x| acc.max(x.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: [C<T>; 3]) -> [C<T>; 3] {
        let a = &self.0;
        [
            a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
            a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
            a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
        ]
    }

    /// Entrywise maximum relative deviation from `other`, normalised by the
    /// largest entry of `other`.
    pub fn rel_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs() / other.max_abs().max(T::min_positive_value())
    }
}

impl<T: Real> Index<(usize, usize)> for Mat3<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.0[i][j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Mat3<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.0[i][j]
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<T: Real> AddAssign for Mat3<T> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] = self.0[i][j] - rhs.0[i][j];
            }
        }
        self
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn sample() -> Mat3<f64> {
        Mat3([
            [c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0)],
            [c(0.3, 0.0), c(-1.0, 2.0), c(1.0, 1.0)],
            [c(0.0, 0.2), c(4.0, 0.0), c(2.0, -0.5)],
        ])
    }

    #[test]
    fn inverse_roundtrip() {
        let a = sample();
        let prod = a * a.inverse().unwrap();
        assert!((prod - Mat3::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn det_of_product() {
        let a = sample();
        let b = a.adjoint();
        let lhs = (a * b).det();
        let rhs = a.det() * b.det();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }
}
