//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar the simulator is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, panicking only if the type cannot hold finite values.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Default
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// `e^{iφ}`.
#[inline]
pub(crate) fn cis<T: Real>(phi: T) -> C<T> {
    Complex::new(phi.cos(), phi.sin())
}
