//! Floating-point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar type usable for probabilities and information values.
///
/// The tolerance constants are expressed in `f64` and scale with the
/// precision of the implementing type: the `f64` values are the ones the
/// library is calibrated against, the `f32` values are loosened to what
/// single precision can resolve.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Allowed deviation of a probability table's total mass from one.
    const NORM_TOL: f64;
    /// Negative mutual informations down to this size are rounding noise.
    const INFO_CLAMP: f64;
    /// Negative PID atoms and subatoms down to this size are solver noise.
    const ATOM_CLAMP: f64;
    /// Residual allowed in identities that hold by construction.
    const IDENTITY_TOL: f64;

    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn ln2() -> Self {
        Self::lit(std::f64::consts::LN_2)
    }
}

impl Real for f64 {
    const NORM_TOL: f64 = 1e-9;
    const INFO_CLAMP: f64 = 1e-12;
    const ATOM_CLAMP: f64 = 1e-9;
    const IDENTITY_TOL: f64 = 1e-8;
}

impl Real for f32 {
    const NORM_TOL: f64 = 1e-5;
    const INFO_CLAMP: f64 = 1e-5;
    const ATOM_CLAMP: f64 = 1e-4;
    const IDENTITY_TOL: f64 = 1e-4;
}

/// `x · log2 x` with the continuous extension `0 · log 0 = 0`.
#[inline]
pub(crate) fn xlog2x<T: Real>(x: T) -> T {
    if x > T::zero() {
        x * x.log2()
    } else {
        T::zero()
    }
}
