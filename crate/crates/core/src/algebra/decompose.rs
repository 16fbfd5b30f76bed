//! Splitting a formally real algebra into Weil algebras along its minimal
//! idempotents.
//!
//! The radical is the kernel of the trace form `(x, y) ↦ tr(L_{xy})`. On the
//! semisimple quotient every multiplication operator must have a real
//! spectrum (a finite stand-in for formal reality); a generic element then has
//! distinct real eigenvalues `λ_i`, and the Lagrange polynomials
//! `Π_{j≠i} (z − λ_j)/(λ_i − λ_j)` are idempotent modulo the radical. Those
//! are lifted to true idempotents by iterating `e ← 3e² − 2e³`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ring_violations, AlgebraError, AlgebraTable, WeilAlgebra};
use crate::linalg::{self, Matrix};
use crate::scalar::{max_abs, Scalar};

const NEWTON_TOL: f64 = 1e-10;
const NEWTON_BUDGET: usize = 100;
const IMAG_TOL: f64 = 1e-8;
const GENERIC_ATTEMPTS: usize = 16;

/// A nonzero `e` with `e² = e`, as coefficients in the input basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Idempotent<T> {
    pub coeffs: Vec<T>,
    /// `‖e² − e‖_∞` after lifting.
    pub residual: T,
}

#[derive(Clone, Debug)]
pub struct Decomposition<T> {
    pub idempotents: Vec<Idempotent<T>>,
    /// `e_i A`, each presented in an orthonormal basis of the ideal.
    pub summands: Vec<WeilAlgebra<T>>,
    pub radical_dim: usize,
}

/// Block-diagonal direct sum `A₁ ⊕ ⋯ ⊕ A_k` (no augmentation unless `k = 1`).
pub fn direct_sum<T: Scalar>(parts: &[&AlgebraTable<T>]) -> AlgebraTable<T> {
    let d: usize = parts.iter().map(|p| p.dim).sum();
    let mut sc = vec![T::zero(); d * d * d];
    let mut unit = vec![T::zero(); d];
    let mut offset = 0;
    for p in parts {
        let pd = p.dim;
        for i in 0..pd {
            unit[offset + i] = p.unit[i];
            for j in 0..pd {
                for k in 0..pd {
                    sc[((offset + i) * d + offset + j) * d + offset + k] = p.c(i, j, k);
                }
            }
        }
        offset += pd;
    }
    let aug = if parts.len() == 1 { parts[0].aug.clone() } else { None };
    let name = parts.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join("+");
    AlgebraTable::new(name, d.max(1), unit, aug, sc).expect("direct sum of valid tables")
}

fn real_spectrum<T: Scalar>(m: &Matrix<T>, basis: usize) -> Result<Vec<T>, AlgebraError> {
    let ev = linalg::eigenvalues(m)
        .ok_or_else(|| AlgebraError::Decomposition("eigenvalue iteration did not converge".into()))?;
    let tol = T::lit(IMAG_TOL) * T::one().max(m.max_abs());
    let mut out = Vec::with_capacity(ev.len());
    for (re, im) in ev {
        if im.abs() > tol {
            return Err(AlgebraError::NotFormallyReal {
                basis,
                re: re.to_f64().unwrap_or(f64::NAN),
                im: im.abs().to_f64().unwrap_or(f64::NAN),
            });
        }
        out.push(re);
    }
    Ok(out)
}

/// Minimal idempotents `e₁ + ⋯ + e_k = 1` of a commutative unital algebra and
/// the Weil algebras `e_i A`.
pub fn minimal_idempotents<T: Scalar>(t: &AlgebraTable<T>) -> Result<Decomposition<T>, AlgebraError> {
    let violations = ring_violations(t);
    if !violations.is_empty() {
        let summary: Vec<String> = violations.iter().take(3).map(|v| v.to_string()).collect();
        return Err(AlgebraError::Invalid { name: t.name.clone(), summary: summary.join("; ") });
    }
    let d = t.dim;

    // trace form
    let traces: Vec<T> = (0..d).map(|k| (0..d).fold(T::zero(), |s, j| s + t.c(k, j, j))).collect();
    let gram = Matrix::from_fn(d, d, |i, j| linalg::dot(t.basis_product(i, j), &traces));
    let (vals, vecs) = linalg::symmetric_eigen(&gram);
    let gmax = vals.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let cut = T::epsilon().sqrt() * gmax;
    let complement: Vec<Vec<T>> = (0..d).filter(|&i| vals[i].abs() > cut).map(|i| vecs.col(i)).collect();
    let s = complement.len();
    let radical_dim = d - s;
    let q = Matrix::from_columns(d, &complement);
    let qt = q.transpose();
    let project = |x: &[T]| qt.matmul(&t.mult_operator(x)).matmul(&q);

    for i in 0..d {
        real_spectrum(&project(&t.basis_vector(i)), i)?;
    }

    // generic element with simple spectrum on the quotient
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1de3);
    let mut chosen = None;
    for _ in 0..GENERIC_ATTEMPTS {
        let c: Vec<T> = (0..s).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
        let z = q.mul_vec(&c);
        let mut lam = real_spectrum(&project(&z), d)?;
        lam.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        let spread = T::one().max(max_abs(&lam));
        let gap = lam.windows(2).fold(T::infinity(), |g, w| g.min(w[1] - w[0]));
        if s <= 1 || gap > T::lit(1e-6) * spread {
            chosen = Some((z, lam));
            break;
        }
    }
    let (z, lam) = chosen.ok_or_else(|| {
        AlgebraError::Decomposition("no element with a simple spectrum on the semisimple quotient".into())
    })?;

    let shifted: Vec<Vec<T>> = lam
        .iter()
        .map(|l| z.iter().zip(&t.unit).map(|(zi, ui)| *zi - *l * *ui).collect())
        .collect();
    let mut idempotents = Vec::with_capacity(s);
    for i in 0..s {
        let mut e = t.unit.clone();
        for j in (0..s).filter(|&j| j != i) {
            let inv = T::one() / (lam[i] - lam[j]);
            e = t.mul(&e, &shifted[j]).into_iter().map(|x| x * inv).collect();
        }
        let mut residual = T::infinity();
        let mut converged = false;
        for _ in 0..NEWTON_BUDGET {
            let e2 = t.mul(&e, &e);
            residual = crate::scalar::abs_err(&e2, &e);
            if residual < T::lit(NEWTON_TOL) {
                converged = true;
                break;
            }
            let e3 = t.mul(&e2, &e);
            e = e2.iter().zip(&e3).map(|(a, b)| T::lit(3.0) * *a - T::lit(2.0) * *b).collect();
        }
        if !converged {
            return Err(AlgebraError::NoConvergence {
                residual: residual.to_f64().unwrap_or(f64::NAN),
                iterations: NEWTON_BUDGET,
            });
        }
        idempotents.push(Idempotent { coeffs: e, residual });
    }

    let summands = idempotents
        .iter()
        .enumerate()
        .map(|(i, e)| summand(t, &e.coeffs, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Decomposition { idempotents, summands, radical_dim })
}

/// Presents the ideal `eA` as a Weil algebra in an orthonormal basis.
fn summand<T: Scalar>(t: &AlgebraTable<T>, e: &[T], index: usize) -> Result<WeilAlgebra<T>, AlgebraError> {
    let d = t.dim;
    let images: Vec<Vec<T>> = (0..d).map(|j| t.mul(e, &t.basis_vector(j))).collect();
    let tol = T::epsilon().sqrt() * t.scale();
    let u = linalg::orthonormal_basis(&images, tol);
    let m = u.len();
    let coords = |x: &[T]| -> Vec<T> { u.iter().map(|ua| linalg::dot(ua, x)).collect() };
    let mut sc = vec![T::zero(); m * m * m];
    for a in 0..m {
        for b in 0..m {
            let prod = coords(&t.mul(&u[a], &u[b]));
            sc[(a * m + b) * m..(a * m + b + 1) * m].copy_from_slice(&prod);
        }
    }
    let unit = coords(e);
    let mut table = AlgebraTable::new(format!("{}[{index}]", t.name), m, unit, None, sc)?;
    // On a local algebra every multiplication operator has the single
    // eigenvalue aug(x), so aug(x) = tr(L_x) / dim.
    let aug = (0..m)
        .map(|a| table.mult_operator(&table.basis_vector(a)).trace() / T::from_count(m))
        .collect();
    table.aug = Some(aug);
    WeilAlgebra::from_table(table)
}
