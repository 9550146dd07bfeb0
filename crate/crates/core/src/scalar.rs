//! Scalar abstraction shared by every numeric module.
//!
//! All state, field and dynamics types are generic over a real type `T`
//! (`f32` or `f64`); amplitudes are `Complex<T>`. Tolerances scale with
//! machine epsilon so the same code checks invariants at either precision.

use std::fmt::{Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar usable for amplitudes, FFTs and expectation values.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Default
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// [`Real`] that nalgebra can decompose (SVD, Hermitian eigenproblems).
pub trait LinalgReal: Real + nalgebra::RealField {}

impl LinalgReal for f32 {}
impl LinalgReal for f64 {}

/// Lossless-enough conversion from an `f64` literal.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("usize representable in scalar type")
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Tolerance used for normalization checks: `1e4 * epsilon`
/// (about 2.2e-12 for `f64`).
#[inline]
pub fn norm_tolerance<T: Real>() -> T {
    T::epsilon() * real(1e4)
}

/// Absolute value without the `Float`/`Signed` method ambiguity.
#[inline]
pub fn abs<T: Real>(x: T) -> T {
    Float::abs(x)
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
