use std::cmp::Ordering;

use super::{AlgebraError, AlgebraTable, WeilAlgebra};
use crate::scalar::Scalar;

fn variable_name(num_vars: usize, v: usize) -> String {
    if num_vars == 1 {
        "x".to_string()
    } else {
        format!("x{}", v + 1)
    }
}

pub(crate) fn monomial_label(exps: &[u32]) -> String {
    let n = exps.len();
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(v, e)| {
            if *e == 1 {
                variable_name(n, v)
            } else {
                format!("{}^{e}", variable_name(n, v))
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Graded order, ties broken by comparing the last variable first.
fn graded_colex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

fn divides(m: &[u32], n: &[u32]) -> bool {
    m.iter().zip(n).all(|(a, b)| a <= b)
}

/// Multiplication table of `R[x₁..x_w] / I` for the monomial ideal `I`
/// generated by `excluded`.
pub(crate) fn monomial_quotient_table<T: Scalar>(
    name: impl Into<String>,
    num_vars: usize,
    excluded: &[Vec<u32>],
) -> Result<AlgebraTable<T>, AlgebraError> {
    if num_vars == 0 && !excluded.is_empty() {
        return Err(AlgebraError::NoVariables);
    }
    for (index, e) in excluded.iter().enumerate() {
        if e.len() != num_vars {
            return Err(AlgebraError::ExponentLength { index, expected: num_vars, found: e.len() });
        }
    }
    // Smallest excluded pure power of each variable bounds the surviving exponents.
    let mut bounds = Vec::with_capacity(num_vars);
    for v in 0..num_vars {
        let bound = excluded
            .iter()
            .filter(|e| e.iter().enumerate().all(|(w, k)| w == v || *k == 0))
            .map(|e| e[v])
            .min()
            .ok_or(AlgebraError::NotCofinite { var: v })?;
        if bound == 0 {
            // the ideal contains 1
            return Err(AlgebraError::ZeroAlgebra);
        }
        bounds.push(bound);
    }

    let mut basis: Vec<Vec<u32>> = vec![vec![0; num_vars]];
    for v in 0..num_vars {
        let mut next = Vec::new();
        for m in &basis {
            for e in 0..bounds[v] {
                let mut m2 = m.clone();
                m2[v] = e;
                next.push(m2);
            }
        }
        basis = next;
    }
    basis.retain(|m| !excluded.iter().any(|e| divides(e, m)));
    basis.sort_by(|a, b| graded_colex(a, b));

    let d = basis.len();
    let mut sc = vec![T::zero(); d * d * d];
    for i in 0..d {
        for j in 0..d {
            let prod: Vec<u32> = basis[i].iter().zip(&basis[j]).map(|(a, b)| a + b).collect();
            if let Some(k) = basis.iter().position(|m| *m == prod) {
                sc[(i * d + j) * d + k] = T::one();
            }
        }
    }
    let mut unit = vec![T::zero(); d];
    unit[0] = T::one();
    let aug = unit.clone();
    let labels = basis.iter().map(|m| monomial_label(m)).collect();
    let mut t = AlgebraTable::new(name, d, unit, Some(aug), sc)?.with_labels(labels);
    t.monomials = Some(basis);
    Ok(t)
}

/// `R[x₁..x_w] / I` where `I` is generated by the excluded monomials.
///
/// The basis is the set of surviving monomials in graded order (ties broken
/// by the last variable), starting with the constant monomial.
pub fn make_monomial_quotient<T: Scalar>(
    num_vars: usize,
    excluded: &[Vec<u32>],
) -> Result<WeilAlgebra<T>, AlgebraError> {
    let gens: Vec<String> = excluded.iter().map(|e| monomial_label(e)).collect();
    let name = format!("R[{num_vars}]/({})", gens.join(","));
    WeilAlgebra::from_table(monomial_quotient_table(name, num_vars, excluded)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: every exponent vector in a box not divisible by an exclusion.
    fn brute_force_basis(num_vars: usize, excluded: &[Vec<u32>], max: u32) -> Vec<Vec<u32>> {
        let mut all = vec![vec![]];
        for _ in 0..num_vars {
            all = all
                .into_iter()
                .flat_map(|m: Vec<u32>| {
                    (0..=max).map(move |e| {
                        let mut m2 = m.clone();
                        m2.push(e);
                        m2
                    })
                })
                .collect();
        }
        all.retain(|m| !excluded.iter().any(|e| e.iter().zip(m).all(|(a, b)| a <= b)));
        all
    }

    #[test]
    fn dual_numbers() {
        let d = make_monomial_quotient::<f64>(1, &[vec![2]]).unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.height(), 1);
        assert_eq!(d.labels().unwrap(), &["1".to_string(), "x".to_string()]);
        assert_eq!(d.table().basis_product(1, 1), &[0.0, 0.0]);
    }

    #[test]
    fn r_jets() {
        for r in 1..6u32 {
            let j = make_monomial_quotient::<f64>(1, &[vec![r + 1]]).unwrap();
            assert_eq!(j.dim(), r as usize + 1);
            assert_eq!(j.height(), r as usize);
        }
    }

    #[test]
    fn two_variables_square_free() {
        let ex = vec![vec![2, 0], vec![0, 2]];
        let a = make_monomial_quotient::<f64>(2, &ex).unwrap();
        let brute = brute_force_basis(2, &ex, 4);
        assert_eq!(brute.len(), 4);
        assert_eq!(a.dim(), 4);
        assert_eq!(a.height(), 2);
        assert_eq!(a.monomials().unwrap(), &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        // redundant generator xy·xy changes nothing
        let b = make_monomial_quotient::<f64>(2, &[vec![2, 0], vec![0, 2], vec![2, 2]]).unwrap();
        assert_eq!(a.table().sc, b.table().sc);
    }

    #[test]
    fn mixed_ideal_matches_brute_force() {
        let ex = vec![vec![3, 0, 0], vec![0, 2, 0], vec![0, 0, 2], vec![1, 1, 0], vec![0, 1, 1]];
        let a = make_monomial_quotient::<f64>(3, &ex).unwrap();
        let mut brute = brute_force_basis(3, &ex, 5);
        brute.sort_by(|x, y| graded_colex(x, y));
        assert_eq!(a.monomials().unwrap(), brute.as_slice());
        let max_deg = brute.iter().map(|m| m.iter().sum::<u32>()).max().unwrap();
        assert_eq!(a.height(), max_deg as usize);
    }

    #[test]
    fn rejects_non_cofinite_ideal() {
        let err = make_monomial_quotient::<f64>(2, &[vec![2, 0], vec![1, 1]]).unwrap_err();
        assert_eq!(err, AlgebraError::NotCofinite { var: 1 });
    }

    #[test]
    fn rejects_exclusions_without_variables() {
        assert_eq!(make_monomial_quotient::<f64>(0, &[vec![]]).unwrap_err(), AlgebraError::NoVariables);
        let r = make_monomial_quotient::<f64>(0, &[]).unwrap();
        assert_eq!((r.dim(), r.height()), (1, 0));
    }
}
