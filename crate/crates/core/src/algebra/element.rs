use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{AlgebraError, WeilAlgebra};
use crate::scalar::Scalar;

/// Element `λ·1 + n` of a Weil algebra, stored as coefficients in the
/// algebra's basis.
///
/// The `std::ops` impls panic when the operands belong to different
/// algebras; the `try_*` methods report the mismatch instead.
#[derive(Clone, Debug)]
pub struct AlgebraElement<T> {
    algebra: Arc<WeilAlgebra<T>>,
    coeffs: Vec<T>,
}

impl<T: Scalar> PartialEq for AlgebraElement<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other) && self.coeffs == other.coeffs
    }
}

impl<T: Scalar> AlgebraElement<T> {
    pub fn new(algebra: Arc<WeilAlgebra<T>>, coeffs: Vec<T>) -> Result<Self, AlgebraError> {
        if coeffs.len() != algebra.dim() {
            return Err(AlgebraError::DimensionMismatch { expected: algebra.dim(), found: coeffs.len() });
        }
        Ok(AlgebraElement { algebra, coeffs })
    }

    pub(crate) fn from_parts(algebra: &Arc<WeilAlgebra<T>>, coeffs: Vec<T>) -> Self {
        debug_assert_eq!(coeffs.len(), algebra.dim());
        AlgebraElement { algebra: Arc::clone(algebra), coeffs }
    }

    pub fn zero(algebra: &Arc<WeilAlgebra<T>>) -> Self {
        Self::from_parts(algebra, vec![T::zero(); algebra.dim()])
    }

    pub fn one(algebra: &Arc<WeilAlgebra<T>>) -> Self {
        Self::from_parts(algebra, algebra.unit().to_vec())
    }

    /// `λ · 1`.
    pub fn constant(algebra: &Arc<WeilAlgebra<T>>, value: T) -> Self {
        Self::from_parts(algebra, algebra.unit().iter().map(|u| *u * value).collect())
    }

    /// The `i`-th basis vector.
    pub fn basis(algebra: &Arc<WeilAlgebra<T>>, i: usize) -> Self {
        Self::from_parts(algebra, algebra.table().basis_vector(i))
    }

    pub fn algebra(&self) -> &Arc<WeilAlgebra<T>> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn same_algebra(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || *self.algebra == *other.algebra
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(AlgebraError::Mismatch {
                left: self.algebra.name().to_string(),
                right: other.algebra.name().to_string(),
            })
        }
    }

    /// Scalar part `λ = π_A(a)`.
    pub fn augmentation(&self) -> T {
        self.algebra.augment(&self.coeffs)
    }

    /// Nilpotent part `n = a − π_A(a)·1`.
    pub fn nilpotent_part(&self) -> Self {
        let lambda = self.augmentation();
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.algebra.unit())
            .map(|(c, u)| *c - lambda * *u)
            .collect();
        Self::from_parts(&self.algebra, coeffs)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.add_unchecked(&other.scale(-T::one())))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a + *b).collect();
        Self::from_parts(&self.algebra, coeffs)
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        Self::from_parts(&self.algebra, self.algebra.mul_coeffs(&self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_parts(&self.algebra, self.coeffs.iter().map(|c| *c * s).collect())
    }

    /// `self + s · 1`.
    pub fn add_scalar(&self, s: T) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.algebra.unit())
            .map(|(c, u)| *c + s * *u)
            .collect();
        Self::from_parts(&self.algebra, coeffs)
    }

    /// Non-negative integer power by repeated squaring.
    pub fn powi(&self, mut k: u32) -> Self {
        let mut result = Self::one(&self.algebra);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Inverse through the terminating geometric series
    /// `λ⁻¹ Σ_{j=0..h} (−n/λ)^j` for `a = λ·1 + n`.
    pub fn try_invert(&self) -> Result<Self, AlgebraError> {
        let lambda = self.augmentation();
        if lambda == T::zero() {
            return Err(AlgebraError::NotInvertible);
        }
        let ratio = self.nilpotent_part().scale(-T::one() / lambda);
        // Horner: 1 + r(1 + r(1 + ...))
        let mut acc = Self::one(&self.algebra);
        for _ in 0..self.algebra.height() {
            acc = ratio.mul_unchecked(&acc).add_scalar(T::one());
        }
        Ok(acc.scale(T::one() / lambda))
    }

    /// `‖coeffs‖_∞`.
    pub fn max_abs(&self) -> T {
        crate::scalar::max_abs(&self.coeffs)
    }
}

impl<T: Scalar> Add for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;
    fn add(self, rhs: Self) -> AlgebraElement<T> {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Scalar> Sub for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;
    fn sub(self, rhs: Self) -> AlgebraElement<T> {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Scalar> Mul for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;
    fn mul(self, rhs: Self) -> AlgebraElement<T> {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Scalar> Mul<T> for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;
    fn mul(self, rhs: T) -> AlgebraElement<T> {
        self.scale(rhs)
    }
}

impl<T: Scalar> Neg for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;
    fn neg(self) -> AlgebraElement<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> fmt::Display for AlgebraElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == T::zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}·{}", self.algebra.label(i))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
