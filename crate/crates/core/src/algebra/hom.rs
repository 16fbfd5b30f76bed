use std::sync::Arc;

use super::{reals, AlgebraElement, AlgebraError, WeilAlgebra};
use crate::linalg::Matrix;
use crate::scalar::{abs_err, Scalar};

/// Injectivity and surjectivity of a hom, read off its rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomKind {
    pub injective: bool,
    pub surjective: bool,
}

/// Algebra homomorphism `φ: A → B`, stored as a `dim B × dim A` matrix.
#[derive(Clone, Debug)]
pub struct AlgebraHom<T> {
    matrix: Matrix<T>,
    source: Arc<WeilAlgebra<T>>,
    target: Arc<WeilAlgebra<T>>,
    kind: HomKind,
}

impl<T: Scalar> AlgebraHom<T> {
    /// Verifies `φ(1) = 1`, `φ(b_i b_j) = φ(b_i) φ(b_j)` and `π_B ∘ φ = π_A`,
    /// then classifies the hom by rank.
    pub fn new(
        matrix: Matrix<T>,
        source: Arc<WeilAlgebra<T>>,
        target: Arc<WeilAlgebra<T>>,
    ) -> Result<Self, AlgebraError> {
        let (da, db) = (source.dim(), target.dim());
        if matrix.cols() != da {
            return Err(AlgebraError::DimensionMismatch { expected: da, found: matrix.cols() });
        }
        if matrix.rows() != db {
            return Err(AlgebraError::DimensionMismatch { expected: db, found: matrix.rows() });
        }
        let scale = matrix.max_abs().max(T::one());
        let tol = T::check_tol() * scale * scale * source.table().scale() * target.table().scale();

        let image_unit = matrix.mul_vec(source.unit());
        let r = abs_err(&image_unit, target.unit());
        if r > tol {
            return Err(AlgebraError::NotHom(format!("unit not preserved, residual {r:e}")));
        }
        let images: Vec<Vec<T>> = (0..da).map(|i| matrix.col(i)).collect();
        for i in 0..da {
            for j in i..da {
                let lhs = matrix.mul_vec(source.table().basis_product(i, j));
                let rhs = target.mul_coeffs(&images[i], &images[j]);
                let r = abs_err(&lhs, &rhs);
                if r > tol {
                    return Err(AlgebraError::NotHom(format!(
                        "multiplicativity fails on basis pair ({i}, {j}), residual {r:e}"
                    )));
                }
            }
        }
        for i in 0..da {
            let r = (target.augment(&images[i]) - source.aug()[i]).abs();
            if r > tol {
                return Err(AlgebraError::NotHom(format!(
                    "augmentation not preserved on basis element {i}, residual {r:e}"
                )));
            }
        }
        let rank = matrix.rank(T::check_tol() * scale);
        let kind = HomKind { injective: rank == da, surjective: rank == db };
        Ok(AlgebraHom { matrix, source, target, kind })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn source(&self) -> &Arc<WeilAlgebra<T>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<WeilAlgebra<T>> {
        &self.target
    }

    pub fn kind(&self) -> HomKind {
        self.kind
    }

    /// The augmentation `π_A: A → R`.
    pub fn augmentation(source: &Arc<WeilAlgebra<T>>) -> Self {
        let m = Matrix::from_row_major(1, source.dim(), source.aug().to_vec());
        Self::new(m, Arc::clone(source), Arc::new(reals())).expect("augmentation is a hom")
    }

    /// The unit inclusion `R → A`, `t ↦ t·1`.
    pub fn unit_inclusion(target: &Arc<WeilAlgebra<T>>) -> Self {
        let m = Matrix::from_row_major(target.dim(), 1, target.unit().to_vec());
        Self::new(m, Arc::new(reals()), Arc::clone(target)).expect("unit inclusion is a hom")
    }

    pub fn identity(a: &Arc<WeilAlgebra<T>>) -> Self {
        Self::new(Matrix::identity(a.dim()), Arc::clone(a), Arc::clone(a)).expect("identity is a hom")
    }

    /// `x_v ↦ s_v x_v` on a monomial algebra.
    pub fn generator_scaling(a: &Arc<WeilAlgebra<T>>, scales: &[T]) -> Result<Self, AlgebraError> {
        let mons = a
            .monomials()
            .ok_or_else(|| AlgebraError::NotHom(format!("`{}` has no monomial basis", a.name())))?;
        let nvars = mons.first().map_or(0, |m| m.len());
        if scales.len() != nvars {
            return Err(AlgebraError::DimensionMismatch { expected: nvars, found: scales.len() });
        }
        let mut m = Matrix::zeros(a.dim(), a.dim());
        for (i, mon) in mons.iter().enumerate() {
            m[(i, i)] = mon
                .iter()
                .zip(scales)
                .fold(T::one(), |acc, (e, s)| acc * s.powi(*e as i32));
        }
        Self::new(m, Arc::clone(a), Arc::clone(a))
    }

    /// Sends each monomial of the source to the same monomial of the target,
    /// or to zero when the target quotients it away (e.g. `jet:3 → jet:2`).
    pub fn monomial_projection(
        source: &Arc<WeilAlgebra<T>>,
        target: &Arc<WeilAlgebra<T>>,
    ) -> Result<Self, AlgebraError> {
        let no_basis = |a: &WeilAlgebra<T>| AlgebraError::NotHom(format!("`{}` has no monomial basis", a.name()));
        let ms = source.monomials().ok_or_else(|| no_basis(source))?;
        let mt = target.monomials().ok_or_else(|| no_basis(target))?;
        let mut m = Matrix::zeros(target.dim(), source.dim());
        for (i, mon) in ms.iter().enumerate() {
            if let Some(k) = mt.iter().position(|t| t == mon) {
                m[(k, i)] = T::one();
            }
        }
        Self::new(m, Arc::clone(source), Arc::clone(target))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Self) -> Result<Self, AlgebraError> {
        if *self.target != *other.source {
            return Err(AlgebraError::Mismatch {
                left: self.target.name().to_string(),
                right: other.source.name().to_string(),
            });
        }
        Self::new(
            other.matrix.matmul(&self.matrix),
            Arc::clone(&self.source),
            Arc::clone(&other.target),
        )
    }

    pub fn apply_coeffs(&self, coeffs: &[T]) -> Vec<T> {
        self.matrix.mul_vec(coeffs)
    }

    pub fn apply(&self, a: &AlgebraElement<T>) -> Result<AlgebraElement<T>, AlgebraError> {
        if *a.algebra().as_ref() != *self.source {
            return Err(AlgebraError::Mismatch {
                left: a.algebra().name().to_string(),
                right: self.source.name().to_string(),
            });
        }
        Ok(AlgebraElement::from_parts(&self.target, self.apply_coeffs(a.coeffs())))
    }
}
