//! Scalar abstraction shared by every numerical module.

use nalgebra as na;
use num_complex::Complex;
use num_traits as nt;

/// Floating point type the simulation is generic over (`f32` or `f64`).
///
/// Method calls on values resolve through [`na::RealField`]; `num_traits::Float`
/// is deliberately not a supertrait so that `x.sqrt()` and friends stay
/// unambiguous.
pub trait Real:
    na::RealField + Copy + nt::FloatConst + nt::FromPrimitive + nt::ToPrimitive + Default
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self;

    /// Lossy conversion back to `f64`, used for reporting.
    fn to_f64_lossy(self) -> f64;

    /// Machine epsilon.
    fn eps() -> Self;

    fn is_finite_value(self) -> bool;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }
            #[inline]
            fn eps() -> Self {
                <$t>::EPSILON
            }
            #[inline]
            fn is_finite_value(self) -> bool {
                <$t>::is_finite(self)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Complex number over a [`Real`].
pub type C<T> = Complex<T>;

#[cfg(test)]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// Modulus of a complex number without requiring `num_traits::Float`.
#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}
