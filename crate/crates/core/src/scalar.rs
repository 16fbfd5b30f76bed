//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type for coefficients: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into the scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Absolute tolerance used by structural checks (commutativity, ranks, ...).
    ///
    /// `1e-9` for `f64`; widened to a few thousand ulps for `f32`.
    #[inline]
    fn check_tol() -> Self {
        (Self::epsilon() * Self::lit(1e4)).max(Self::lit(1e-9))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `max_i |v_i|`, zero for an empty slice.
pub fn max_abs<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Relative error `‖a − b‖_∞ / max(1, ‖a‖_∞, ‖b‖_∞)` on coefficient vectors.
pub fn rel_err<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "rel_err: length mismatch");
    let diff = a
        .iter()
        .zip(b)
        .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()));
    let scale = T::one().max(max_abs(a)).max(max_abs(b));
    diff / scale
}

/// Absolute error `‖a − b‖_∞`.
pub fn abs_err<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "abs_err: length mismatch");
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
}

/// Generalized binomial coefficient `C(alpha, j)` for real `alpha`.
pub fn binomial<T: Scalar>(alpha: T, j: usize) -> T {
    let mut c = T::one();
    for i in 0..j {
        c = c * (alpha - T::from_count(i)) / T::from_count(i + 1);
    }
    c
}

/// `1 / j!`.
pub fn inv_factorial<T: Scalar>(j: usize) -> T {
    let mut c = T::one();
    for i in 1..=j {
        c = c / T::from_count(i);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5.0f64, 2), 10.0);
        assert_eq!(binomial(3.0f64, 4), 0.0);
        assert!((binomial(0.5f64, 2) + 0.125).abs() < 1e-15);
        assert_eq!(binomial(-1.0f64, 3), -1.0);
    }

    #[test]
    fn rel_err_is_exact_zero_friendly() {
        assert_eq!(rel_err(&[0.0f64, 0.0], &[0.0, 0.0]), 0.0);
        assert!((rel_err(&[1e6f64], &[1e6 + 1.0]) - 1e-6).abs() < 1e-12);
        assert!((rel_err(&[1e-3f64], &[0.0]) - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn tolerance_tracks_precision() {
        assert_eq!(f64::check_tol(), 1e-9);
        assert!(f32::check_tol() > 1e-4);
    }
}
