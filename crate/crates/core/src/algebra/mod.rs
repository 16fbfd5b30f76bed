//! Weil algebras stored as structure constants over an explicit basis.
//!
//! An [`AlgebraTable`] is any finite-dimensional commutative unital algebra
//! given by its multiplication table; it need not be local. A [`WeilAlgebra`]
//! is a table that passed [`validate`]: it carries an augmentation onto `R`
//! whose kernel is nilpotent, together with the nilpotency height.

mod decompose;
mod element;
mod format;
mod hom;
mod monomial;
mod presets;
mod tensor;

use std::fmt;

use thiserror::Error;

pub use decompose::{direct_sum, minimal_idempotents, Decomposition, Idempotent};
pub use element::AlgebraElement;
pub use format::{parse_table, write_table};
pub use hom::{AlgebraHom, HomKind};
pub use monomial::make_monomial_quotient;
pub use presets::{dual_numbers, jet, multivariate_jet, parse_algebra_spec, reals};
pub use tensor::{exchange_iso, pair_index, tensor_product};

use crate::linalg::{self, Matrix};
use crate::scalar::{max_abs, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("the zero algebra is not a Weil algebra")]
    ZeroAlgebra,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid Weil algebra `{name}`: {summary}")]
    Invalid { name: String, summary: String },
    #[error("operands live in different algebras: `{left}` and `{right}`")]
    Mismatch { left: String, right: String },
    #[error("not invertible: augmentation is zero")]
    NotInvertible,
    #[error("monomial ideal is not cofinite: no pure power of variable {var} is excluded")]
    NotCofinite { var: usize },
    #[error("exclusions given for an algebra with no variables")]
    NoVariables,
    #[error("exponent vector {index} has {found} entries, expected {expected}")]
    ExponentLength { index: usize, expected: usize, found: usize },
    #[error("not an algebra homomorphism: {0}")]
    NotHom(String),
    #[error("not formally real: operator of basis element {basis} has eigenvalue {re} ± {im}i")]
    NotFormallyReal { basis: usize, re: f64, im: f64 },
    #[error("idempotent lifting did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown algebra spec `{0}`")]
    UnknownSpec(String),
}

/// Multiplication table of a finite-dimensional commutative unital algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraTable<T> {
    pub name: String,
    pub dim: usize,
    pub unit: Vec<T>,
    /// Augmentation row vector; absent for algebras that are not local.
    pub aug: Option<Vec<T>>,
    /// `sc[(i * dim + j) * dim + k]` is the coefficient of `b_k` in `b_i b_j`.
    pub sc: Vec<T>,
    pub labels: Option<Vec<String>>,
    /// Exponent vectors when the basis consists of monomials.
    pub monomials: Option<Vec<Vec<u32>>>,
}

impl<T: Scalar> AlgebraTable<T> {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        unit: Vec<T>,
        aug: Option<Vec<T>>,
        sc: Vec<T>,
    ) -> Result<Self, AlgebraError> {
        if dim == 0 {
            return Err(AlgebraError::ZeroAlgebra);
        }
        if unit.len() != dim {
            return Err(AlgebraError::DimensionMismatch { expected: dim, found: unit.len() });
        }
        if let Some(a) = &aug {
            if a.len() != dim {
                return Err(AlgebraError::DimensionMismatch { expected: dim, found: a.len() });
            }
        }
        if sc.len() != dim * dim * dim {
            return Err(AlgebraError::DimensionMismatch { expected: dim * dim * dim, found: sc.len() });
        }
        Ok(AlgebraTable { name: name.into(), dim, unit, aug, sc, labels: None, monomials: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim, "one label per basis element");
        self.labels = Some(labels);
        self
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> T {
        self.sc[(i * self.dim + j) * self.dim + k]
    }

    /// Coefficients of `b_i b_j`.
    #[inline]
    pub fn basis_product(&self, i: usize, j: usize) -> &[T] {
        let d = self.dim;
        &self.sc[(i * d + j) * d..(i * d + j + 1) * d]
    }

    /// Product of two coefficient vectors through the dense table.
    pub fn mul(&self, a: &[T], b: &[T]) -> Vec<T> {
        let d = self.dim;
        let mut out = vec![T::zero(); d];
        for (i, ai) in a.iter().enumerate() {
            if *ai == T::zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let w = *ai * *bj;
                if w == T::zero() {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(self.basis_product(i, j)) {
                    *o = *o + w * *c;
                }
            }
        }
        out
    }

    /// Matrix of `y ↦ x y` in the stored basis.
    pub fn mult_operator(&self, x: &[T]) -> Matrix<T> {
        let d = self.dim;
        let mut m = Matrix::zeros(d, d);
        for (i, xi) in x.iter().enumerate() {
            if *xi == T::zero() {
                continue;
            }
            for j in 0..d {
                for k in 0..d {
                    m[(k, j)] = m[(k, j)] + *xi * self.c(i, j, k);
                }
            }
        }
        m
    }

    pub fn basis_vector(&self, i: usize) -> Vec<T> {
        (0..self.dim).map(|k| if k == i { T::one() } else { T::zero() }).collect()
    }

    /// Magnitude used to scale absolute tolerances.
    pub fn scale(&self) -> T {
        T::one().max(max_abs(&self.sc)).max(max_abs(&self.unit))
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("b{i}"),
        }
    }

    /// Re-expresses the algebra in the basis whose `a`-th element is column `a`
    /// of `p` (coordinates in the current basis).
    pub fn change_basis(&self, p: &Matrix<T>) -> Result<Self, AlgebraError> {
        let d = self.dim;
        if p.rows() != d || p.cols() != d {
            return Err(AlgebraError::DimensionMismatch { expected: d, found: p.rows() });
        }
        let pinv = linalg::inverse(p)
            .ok_or_else(|| AlgebraError::Decomposition("change of basis is singular".into()))?;
        let cols: Vec<Vec<T>> = (0..d).map(|a| p.col(a)).collect();
        let mut sc = vec![T::zero(); d * d * d];
        for a in 0..d {
            for b in 0..d {
                let prod = pinv.mul_vec(&self.mul(&cols[a], &cols[b]));
                sc[(a * d + b) * d..(a * d + b + 1) * d].copy_from_slice(&prod);
            }
        }
        let unit = pinv.mul_vec(&self.unit);
        let aug = self.aug.as_ref().map(|aug| p.transpose().mul_vec(aug));
        let mut t = AlgebraTable::new(format!("{}'", self.name), d, unit, aug, sc)?;
        t.labels = None;
        Ok(t)
    }
}

/// One violated identity found by [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonCommutative { i: usize, j: usize, residual: f64 },
    NonAssociative { i: usize, j: usize, k: usize, residual: f64 },
    UnitLaw { i: usize, residual: f64 },
    MissingAugmentation,
    ZeroAugmentation,
    AugmentationOfUnit { value: f64 },
    AugmentationNotMultiplicative { i: usize, j: usize, residual: f64 },
    NotNilpotent { stable_dim: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonCommutative { i, j, residual } => {
                write!(f, "commutativity fails for (b{i}, b{j}), residual {residual:.3e}")
            }
            Violation::NonAssociative { i, j, k, residual } => {
                write!(f, "associativity fails for (b{i}, b{j}, b{k}), residual {residual:.3e}")
            }
            Violation::UnitLaw { i, residual } => {
                write!(f, "unit law fails for b{i}, residual {residual:.3e}")
            }
            Violation::MissingAugmentation => write!(f, "no augmentation given"),
            Violation::ZeroAugmentation => write!(f, "augmentation is zero"),
            Violation::AugmentationOfUnit { value } => {
                write!(f, "augmentation of the unit is {value}, expected 1")
            }
            Violation::AugmentationNotMultiplicative { i, j, residual } => write!(
                f,
                "augmentation not multiplicative on (b{i}, b{j}), residual {residual:.3e}"
            ),
            Violation::NotNilpotent { stable_dim } => write!(
                f,
                "nilpotency fails: powers of the augmentation ideal stabilize at dimension {stable_dim}"
            ),
        }
    }
}

/// Result of [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub dim: usize,
    pub height: Option<usize>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            format!("pass (dim {}, height {})", self.dim, self.height.unwrap_or(0))
        } else {
            let first: Vec<String> = self.violations.iter().take(3).map(|v| v.to_string()).collect();
            let more = self.violations.len().saturating_sub(3);
            let mut s = first.join("; ");
            if more > 0 {
                s.push_str(&format!("; and {more} more"));
            }
            s
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            writeln!(f, "pass")?;
            writeln!(f, "dim {}", self.dim)?;
            writeln!(f, "height {}", self.height.unwrap_or(0))
        } else {
            writeln!(f, "fail ({} violations)", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}

fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Commutativity, associativity and unit-law violations of a table.
pub(crate) fn ring_violations<T: Scalar>(t: &AlgebraTable<T>) -> Vec<Violation> {
    let d = t.dim;
    let tol = T::check_tol() * t.scale() * t.scale();
    let mut out = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let r = crate::scalar::abs_err(t.basis_product(i, j), t.basis_product(j, i));
            if r > tol {
                out.push(Violation::NonCommutative { i, j, residual: to_f64(r) });
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            let ij = t.basis_product(i, j).to_vec();
            for k in 0..d {
                let left = t.mul(&ij, &t.basis_vector(k));
                let right = t.mul(&t.basis_vector(i), t.basis_product(j, k));
                let r = crate::scalar::abs_err(&left, &right);
                if r > tol {
                    out.push(Violation::NonAssociative { i, j, k, residual: to_f64(r) });
                }
            }
        }
    }
    for i in 0..d {
        let bi = t.basis_vector(i);
        let r = crate::scalar::abs_err(&t.mul(&t.unit, &bi), &bi);
        if r > tol {
            out.push(Violation::UnitLaw { i, residual: to_f64(r) });
        }
    }
    out
}

/// Height of the algebra: the smallest `h ≥ 0` with `N^{h+1} = 0` for
/// `N = ker(aug)`, computed from iterated products of a basis of `N`.
/// `Err(dim)` reports the dimension at which the powers stop shrinking.
pub(crate) fn nilpotency_height<T: Scalar>(t: &AlgebraTable<T>, aug: &[T]) -> Result<usize, usize> {
    let d = t.dim;
    let tol = T::epsilon().sqrt() * t.scale();
    let aug_norm = linalg::norm(aug);
    let row: Vec<T> = aug.iter().map(|a| *a / aug_norm).collect();
    let ideal = linalg::orthogonal_complement(&[row], d);
    let mut power = ideal.clone();
    let mut h = 0;
    while !power.is_empty() {
        let mut products = Vec::with_capacity(ideal.len() * power.len());
        for n in &ideal {
            for p in &power {
                products.push(t.mul(n, p));
            }
        }
        let next = linalg::orthonormal_basis(&products, tol);
        if next.len() >= power.len() {
            return Err(power.len());
        }
        power = next;
        h += 1;
    }
    Ok(h)
}

/// Checks every Weil-algebra axiom on a table and reports all violations.
pub fn validate<T: Scalar>(t: &AlgebraTable<T>) -> ValidationReport {
    let mut violations = ring_violations(t);
    let mut height = None;
    let tol = T::check_tol() * t.scale() * t.scale();
    match &t.aug {
        None => violations.push(Violation::MissingAugmentation),
        Some(aug) if max_abs(aug) == T::zero() => violations.push(Violation::ZeroAugmentation),
        Some(aug) => {
            let au = linalg::dot(aug, &t.unit);
            if (au - T::one()).abs() > tol {
                violations.push(Violation::AugmentationOfUnit { value: to_f64(au) });
            }
            for i in 0..t.dim {
                for j in i..t.dim {
                    let lhs = linalg::dot(aug, t.basis_product(i, j));
                    let r = (lhs - aug[i] * aug[j]).abs();
                    if r > tol {
                        violations.push(Violation::AugmentationNotMultiplicative {
                            i,
                            j,
                            residual: to_f64(r),
                        });
                    }
                }
            }
            match nilpotency_height(t, aug) {
                Ok(h) => height = Some(h),
                Err(stable_dim) => violations.push(Violation::NotNilpotent { stable_dim }),
            }
        }
    }
    ValidationReport { dim: t.dim, height, violations }
}

/// A validated Weil algebra `A = R·1 ⊕ N`.
///
/// Immutable once built; share it through `Arc`.
#[derive(Clone, Debug)]
pub struct WeilAlgebra<T> {
    table: AlgebraTable<T>,
    aug: Vec<T>,
    height: usize,
    /// Nonzero structure constants per ordered basis pair.
    sparse: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> PartialEq for WeilAlgebra<T> {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl<T: Scalar> WeilAlgebra<T> {
    /// Validates a table and wraps it.
    pub fn from_table(table: AlgebraTable<T>) -> Result<Self, AlgebraError> {
        let report = validate(&table);
        if !report.passed() {
            return Err(AlgebraError::Invalid { name: table.name.clone(), summary: report.summary() });
        }
        let d = table.dim;
        let mut sparse = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                sparse.push(
                    table
                        .basis_product(i, j)
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != T::zero())
                        .map(|(k, v)| (k, *v))
                        .collect(),
                );
            }
        }
        let aug = table.aug.clone().expect("validated table has an augmentation");
        Ok(WeilAlgebra { height: report.height.unwrap_or(0), aug, table, sparse })
    }

    pub fn table(&self) -> &AlgebraTable<T> {
        &self.table
    }

    pub fn name(&self) -> &str {
        &self.table.name
    }

    pub fn dim(&self) -> usize {
        self.table.dim
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn unit(&self) -> &[T] {
        &self.table.unit
    }

    pub fn aug(&self) -> &[T] {
        &self.aug
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.table.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        self.table.label(i)
    }

    pub fn monomials(&self) -> Option<&[Vec<u32>]> {
        self.table.monomials.as_deref()
    }

    /// Re-runs the axiom checks.
    pub fn validate(&self) -> ValidationReport {
        validate(&self.table)
    }

    /// Augmentation `π_A(a)` of a coefficient vector.
    #[inline]
    pub fn augment(&self, a: &[T]) -> T {
        linalg::dot(&self.aug, a)
    }

    /// Product of two coefficient vectors using the sparse table.
    pub fn mul_coeffs(&self, a: &[T], b: &[T]) -> Vec<T> {
        let d = self.dim();
        let mut out = vec![T::zero(); d];
        for (i, ai) in a.iter().enumerate() {
            if *ai == T::zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let w = *ai * *bj;
                if w == T::zero() {
                    continue;
                }
                for (k, c) in &self.sparse[i * d + j] {
                    out[*k] = out[*k] + w * *c;
                }
            }
        }
        out
    }

    /// Orthonormal basis of the augmentation ideal `N = ker(aug)`.
    pub fn nilpotent_basis(&self) -> Vec<Vec<T>> {
        let n = linalg::norm(&self.aug);
        let row: Vec<T> = self.aug.iter().map(|a| *a / n).collect();
        linalg::orthogonal_complement(&[row], self.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dual_table() -> AlgebraTable<f64> {
        // basis {1, x}, x^2 = 0
        let sc = vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0];
        AlgebraTable::new("dual", 2, vec![1.0, 0.0], Some(vec![1.0, 0.0]), sc).unwrap()
    }

    #[test]
    fn dual_numbers_pass_with_height_one() {
        let r = validate(&dual_table());
        assert!(r.passed(), "{r}");
        assert_eq!(r.height, Some(1));
    }

    #[test]
    fn square_of_generator_minus_one_fails() {
        // x^2 = -1: the complex numbers with a bogus augmentation
        let mut t = dual_table();
        t.sc[(2 + 1) * 2] = -1.0;
        let r = validate(&t);
        assert!(!r.passed());
        assert!(r.violations.iter().any(|v| matches!(v, Violation::NotNilpotent { .. })));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::AugmentationNotMultiplicative { i: 1, j: 1, .. })));
    }

    #[test]
    fn product_of_reals_fails_nilpotency() {
        // R x R with basis (1,0), (0,1); aug = first projection
        let sc = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let t = AlgebraTable::new("RxR", 2, vec![1.0, 1.0], Some(vec![1.0, 0.0]), sc).unwrap();
        let r = validate(&t);
        assert_eq!(r.violations, vec![Violation::NotNilpotent { stable_dim: 1 }]);
    }

    #[test]
    fn zero_algebra_rejected() {
        let r = AlgebraTable::<f64>::new("zero", 0, vec![], None, vec![]);
        assert_eq!(r.unwrap_err(), AlgebraError::ZeroAlgebra);
    }

    #[test]
    fn noncommutative_table_reported_with_indices() {
        let mut t = dual_table();
        t.sc[2 + 1] = 2.0; // 1 * x = 2x but x * 1 = x
        let r = validate(&t);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::NonCommutative { i: 0, j: 1, .. })));
        assert!(WeilAlgebra::from_table(t).is_err());
    }

    #[test]
    fn zero_augmentation_rejected() {
        let mut t = dual_table();
        t.aug = Some(vec![0.0, 0.0]);
        assert!(validate(&t).violations.contains(&Violation::ZeroAugmentation));
    }
}
