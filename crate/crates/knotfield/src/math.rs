//! Scalar abstraction: every closed form in this crate evaluates on plain
//! `f64` and on jet types through the same code path.

use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic plus the elementary functions the closed forms use.
///
/// Implementors carrying derivatives must obey exact product/chain-rule
/// semantics; [`Scalar::primal`] strips all derivative content.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// Point value with all derivative content stripped.
    fn primal(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    /// Four-quadrant arctangent; `self` is the y-argument.
    fn atan2(self, x: Self) -> Self;
    /// Absolute value; derivative content follows the sign of the primal.
    fn abs(self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn primal(self) -> f64 {
        self
    }
    #[inline]
    fn sin(self) -> Self {
        fsin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        fcos(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        fsqrt(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        fatan2(self, x)
    }
    #[inline]
    fn abs(self) -> Self {
        fabs(self)
    }
}

// f64 math kernel: std intrinsics when available, libm otherwise.

#[cfg(feature = "std")]
#[inline]
pub(crate) fn fsin(x: f64) -> f64 {
    x.sin()
}
#[cfg(feature = "std")]
#[inline]
pub(crate) fn fcos(x: f64) -> f64 {
    x.cos()
}
#[cfg(feature = "std")]
#[inline]
pub(crate) fn fsqrt(x: f64) -> f64 {
    x.sqrt()
}
#[cfg(feature = "std")]
#[inline]
pub(crate) fn fatan2(y: f64, x: f64) -> f64 {
    y.atan2(x)
}
#[cfg(feature = "std")]
#[inline]
pub(crate) fn fabs(x: f64) -> f64 {
    x.abs()
}

#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn fsin(x: f64) -> f64 {
    libm::sin(x)
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn fcos(x: f64) -> f64 {
    libm::cos(x)
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn fsqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn fatan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn fabs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Euclidean norm of a 3-vector.
#[inline]
pub fn norm3(v: [f64; 3]) -> f64 {
    fsqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}
