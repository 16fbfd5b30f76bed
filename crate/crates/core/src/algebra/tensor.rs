use std::sync::Arc;

use super::{AlgebraError, AlgebraHom, AlgebraTable, WeilAlgebra};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Index of the basis pair `(i, j)` of `A ⊗ B`; the `A` index runs fastest.
#[inline]
pub fn pair_index(dim_a: usize, i: usize, j: usize) -> usize {
    i + dim_a * j
}

/// `A ⊗ B` with basis `b_i ⊗ b'_j` and `(b_i ⊗ b'_j)(b_k ⊗ b'_l) = b_i b_k ⊗ b'_j b'_l`.
pub fn tensor_product<T: Scalar>(
    a: &WeilAlgebra<T>,
    b: &WeilAlgebra<T>,
) -> Result<WeilAlgebra<T>, AlgebraError> {
    let (da, db) = (a.dim(), b.dim());
    let d = da * db;
    let (ta, tb) = (a.table(), b.table());
    let mut sc = vec![T::zero(); d * d * d];
    for j in 0..db {
        for i in 0..da {
            let p = pair_index(da, i, j);
            for l in 0..db {
                for k in 0..da {
                    let q = pair_index(da, k, l);
                    let pa = ta.basis_product(i, k);
                    let pb = tb.basis_product(j, l);
                    for (s, vb) in pb.iter().enumerate() {
                        if *vb == T::zero() {
                            continue;
                        }
                        for (r, va) in pa.iter().enumerate() {
                            if *va != T::zero() {
                                sc[(p * d + q) * d + pair_index(da, r, s)] = *va * *vb;
                            }
                        }
                    }
                }
            }
        }
    }
    let outer = |x: &[T], y: &[T]| -> Vec<T> {
        let mut v = vec![T::zero(); d];
        for j in 0..db {
            for i in 0..da {
                v[pair_index(da, i, j)] = x[i] * y[j];
            }
        }
        v
    };
    let unit = outer(a.unit(), b.unit());
    let aug = outer(a.aug(), b.aug());
    let mut labels = vec![String::new(); d];
    for j in 0..db {
        for i in 0..da {
            labels[pair_index(da, i, j)] = format!("{}⊗{}", a.label(i), b.label(j));
        }
    }
    let mut t = AlgebraTable::new(format!("{}*{}", a.name(), b.name()), d, unit, Some(aug), sc)?
        .with_labels(labels);
    if let (Some(ma), Some(mb)) = (a.monomials(), b.monomials()) {
        let mut mons = vec![Vec::new(); d];
        for j in 0..db {
            for i in 0..da {
                mons[pair_index(da, i, j)] = ma[i].iter().chain(&mb[j]).copied().collect();
            }
        }
        t.monomials = Some(mons);
    }
    WeilAlgebra::from_table(t)
}

/// The factor swap `A ⊗ B → B ⊗ A`, `a ⊗ b ↦ b ⊗ a`.
///
/// Returns the hom together with its freshly built target `B ⊗ A`.
pub fn exchange_iso<T: Scalar>(
    a: &WeilAlgebra<T>,
    b: &WeilAlgebra<T>,
) -> Result<AlgebraHom<T>, AlgebraError> {
    let ab = Arc::new(tensor_product(a, b)?);
    let ba = Arc::new(tensor_product(b, a)?);
    exchange_between(a.dim(), b.dim(), ab, ba)
}

/// Exchange hom between already-built `A ⊗ B` and `B ⊗ A`.
pub(crate) fn exchange_between<T: Scalar>(
    dim_a: usize,
    dim_b: usize,
    ab: Arc<WeilAlgebra<T>>,
    ba: Arc<WeilAlgebra<T>>,
) -> Result<AlgebraHom<T>, AlgebraError> {
    let d = dim_a * dim_b;
    let mut m = Matrix::zeros(d, d);
    for j in 0..dim_b {
        for i in 0..dim_a {
            m[(pair_index(dim_b, j, i), pair_index(dim_a, i, j))] = T::one();
        }
    }
    AlgebraHom::new(m, ab, ba)
}
