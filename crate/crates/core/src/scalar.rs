//! Scalar abstraction for the numeric kernels.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FromPrimitive
    + core::ops::AddAssign
    + core::ops::SubAssign
    + core::ops::MulAssign
    + core::ops::DivAssign
    + core::iter::Sum
    + core::fmt::Debug
    + core::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Conversion from `f64`, used for literals and tolerances.
    fn of(v: f64) -> Self;
    /// Conversion to `f64`, used when emitting reports.
    fn lossy(self) -> f64;
}

impl Real for f32 {
    fn of(v: f64) -> Self {
        v as f32
    }
    fn lossy(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn of(v: f64) -> Self {
        v
    }
    fn lossy(self) -> f64 {
        self
    }
}

/// `l^q` norm of a slice for `q` in `[1, inf]`; `q = inf` is the maximum.
pub fn lq_norm<R: Real>(terms: &[R], q: R) -> R {
    if terms.is_empty() {
        return R::zero();
    }
    if q.is_infinite() {
        return terms.iter().fold(R::zero(), |m, &v| m.max(v.abs()));
    }
    if q == R::one() {
        return terms.iter().map(|v| v.abs()).sum();
    }
    // Scale out the maximum to avoid overflow for large q.
    let peak = terms.iter().fold(R::zero(), |m, &v| m.max(v.abs()));
    if peak == R::zero() {
        return R::zero();
    }
    let sum: R = terms.iter().map(|&v| (v.abs() / peak).powf(q)).sum();
    peak * sum.powf(q.recip())
}

/// Validates an exponent: finite `p >= 1` or `+inf`.
pub fn valid_exponent<R: Real>(p: R) -> bool {
    (p.is_finite() && p >= R::one()) || (p.is_infinite() && p > R::zero())
}
