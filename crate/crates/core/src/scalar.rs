use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable constant")
    }

    /// Converts to `f64`, mapping failures to NaN.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a count or index.
    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("representable integer")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn i_unit<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

/// Primitive cube root of unity e^{2πi/3}.
#[inline]
pub fn omega<T: Real>() -> C<T> {
    Complex::new(-T::lit(0.5), T::lit(0.75).sqrt())
}

/// ω^k for any integer k.
#[inline]
pub fn omega_pow<T: Real>(k: i64) -> C<T> {
    match k.rem_euclid(3) {
        0 => cr(T::one()),
        1 => omega(),
        _ => omega::<T>().conj(),
    }
}
