//! `T_A g` written out as a real expression graph on coefficients.
//!
//! Lifting the result again over `B` gives `T_B(T_A g)`, which is compared
//! against `T_{A⊗B} g` through [`nest_coeffs`] / [`unnest_coeffs`].

use std::sync::Arc;

use super::{LiftError, LiftedVector, TaylorTable};
use crate::algebra::{pair_index, WeilAlgebra};
use crate::expr::{Binary, ExprGraph, GraphBuilder, Node, Unary};
use crate::scalar::Scalar;

// A coefficient node, `None` when it is identically zero.
type Coef = Option<usize>;

struct Lifter<'a, T> {
    b: GraphBuilder<T>,
    alg: &'a WeilAlgebra<T>,
}

impl<T: Scalar> Lifter<'_, T> {
    fn add(&mut self, x: Coef, y: Coef) -> Coef {
        match (x, y) {
            (Some(x), Some(y)) => Some(self.b.add(x, y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    fn scale(&mut self, x: Coef, s: T) -> Coef {
        match x {
            _ if s == T::zero() => None,
            Some(x) if s == T::one() => Some(x),
            Some(x) if s == -T::one() => Some(self.b.neg(x)),
            Some(x) => Some(self.b.scale(x, s)),
            None => None,
        }
    }

    fn constant(&mut self, c: T) -> Vec<Coef> {
        let unit = self.alg.unit().to_vec();
        unit.iter()
            .map(|u| {
                let v = *u * c;
                (v != T::zero()).then(|| self.b.constant(v))
            })
            .collect()
    }

    // `node · 1`
    fn embed(&mut self, node: usize) -> Vec<Coef> {
        let unit = self.alg.unit().to_vec();
        unit.iter().map(|u| self.scale(Some(node), *u)).collect()
    }

    fn mul(&mut self, x: &[Coef], y: &[Coef]) -> Vec<Coef> {
        let d = self.alg.dim();
        let mut out = vec![None; d];
        for (i, xi) in x.iter().enumerate() {
            let Some(xi) = *xi else { continue };
            for (j, yj) in y.iter().enumerate() {
                let Some(yj) = *yj else { continue };
                let entries: Vec<(usize, T)> = self
                    .alg
                    .table()
                    .basis_product(i, j)
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != T::zero())
                    .map(|(k, c)| (k, *c))
                    .collect();
                if entries.is_empty() {
                    continue;
                }
                let p = self.b.mul(xi, yj);
                for (k, c) in entries {
                    let t = self.scale(Some(p), c);
                    out[k] = self.add(out[k], t);
                }
            }
        }
        out
    }

    fn augment(&mut self, x: &[Coef]) -> Coef {
        let aug = self.alg.aug().to_vec();
        let mut acc = None;
        for (xi, a) in x.iter().zip(&aug) {
            let t = self.scale(*xi, *a);
            acc = self.add(acc, t);
        }
        acc
    }

    fn unary(&mut self, op: Unary, x: &[Coef]) -> Vec<Coef> {
        if op == Unary::Neg {
            return x.iter().map(|c| self.scale(*c, -T::one())).collect();
        }
        let lambda = match self.augment(x) {
            Some(l) => l,
            None => self.b.constant(T::zero()),
        };
        let unit = self.alg.unit().to_vec();
        let nil: Vec<Coef> = x
            .iter()
            .zip(&unit)
            .map(|(c, u)| {
                let shift = self.scale(Some(lambda), -*u);
                self.add(*c, shift)
            })
            .collect();
        let h = self.alg.height();
        let coeffs = TaylorTable::new(op).emit(&mut self.b, lambda, h);
        let mut acc = self.embed(coeffs[h]);
        for c in coeffs[..h].iter().rev() {
            acc = self.mul(&acc, &nil);
            let e = self.embed(*c);
            acc = acc.iter().zip(e).map(|(a, b)| self.add(*a, b)).collect();
        }
        acc
    }
}

/// The coefficient map of `T_A g`: a graph `R^{n·dim A} → R^{m·dim A}` whose
/// input `i·dim A + a` is coefficient `a` of the `i`-th lifted coordinate.
pub fn lift_graph<T: Scalar>(g: &ExprGraph<T>, alg: &WeilAlgebra<T>) -> Result<ExprGraph<T>, LiftError> {
    let d = alg.dim();
    let mut l = Lifter { b: GraphBuilder::new(g.arity() * d), alg };
    let mut vals: Vec<Vec<Coef>> = Vec::with_capacity(g.nodes().len());
    for n in g.nodes() {
        let v = match *n {
            Node::Input(k) => (0..d).map(|a| Some(l.b.input(k * d + a))).collect(),
            Node::Const(c) => l.constant(c),
            Node::Unary(op, a) => {
                let x = vals[a].clone();
                l.unary(op, &x)
            }
            Node::Binary(Binary::Add, a, b) => {
                let (x, y) = (vals[a].clone(), vals[b].clone());
                x.iter().zip(&y).map(|(p, q)| l.add(*p, *q)).collect()
            }
            Node::Binary(Binary::Mul, a, b) => {
                let (x, y) = (vals[a].clone(), vals[b].clone());
                l.mul(&x, &y)
            }
        };
        vals.push(v);
    }
    let mut zero = None;
    let mut outputs = Vec::with_capacity(g.output_len() * d);
    for o in g.outputs() {
        for c in &vals[*o] {
            let node = match c {
                Some(c) => *c,
                None => *zero.get_or_insert_with(|| l.b.constant(T::zero())),
            };
            outputs.push(node);
        }
    }
    Ok(l.b.finish(outputs)?)
}

/// Regroups a vector over `A ⊗ B` as a vector over `B` with `dim A` times
/// as many coordinates (the layout [`lift_graph`] expects).
pub fn nest_coeffs<T: Scalar>(
    v: &LiftedVector<T>,
    dim_a: usize,
    b: &Arc<WeilAlgebra<T>>,
) -> Result<LiftedVector<T>, LiftError> {
    let db = b.dim();
    let mut rows = Vec::with_capacity(v.len() * dim_a);
    for e in v.entries() {
        for a in 0..dim_a {
            rows.push((0..db).map(|j| e.coeffs()[pair_index(dim_a, a, j)]).collect());
        }
    }
    LiftedVector::from_coeffs(b, rows)
}

/// Inverse of [`nest_coeffs`].
pub fn unnest_coeffs<T: Scalar>(
    w: &LiftedVector<T>,
    dim_a: usize,
    ab: &Arc<WeilAlgebra<T>>,
) -> Result<LiftedVector<T>, LiftError> {
    let db = w.algebra().dim();
    let m = w.len() / dim_a;
    let mut rows = vec![vec![T::zero(); dim_a * db]; m];
    for (idx, e) in w.entries().iter().enumerate() {
        let (i, a) = (idx / dim_a, idx % dim_a);
        for (j, c) in e.coeffs().iter().enumerate() {
            rows[i][pair_index(dim_a, a, j)] = *c;
        }
    }
    LiftedVector::from_coeffs(ab, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{dual_numbers, jet, reals, tensor_product};
    use crate::expr::parse_exprs;
    use crate::lift::eval_lift;

    #[test]
    fn coefficient_graph_matches_lifted_evaluation() {
        let a = Arc::new(jet::<f64>(2));
        let g = parse_exprs::<f64>("sin(x1)*exp(x2) + log(x1^2 + 1) / sqrt(x2 + 3), x1^(-2)", Some(2)).unwrap();
        let v = LiftedVector::from_coeffs(&a, vec![vec![0.7, 1.0, -0.5], vec![0.2, 0.3, 2.0]]).unwrap();
        let direct = eval_lift(&g, &v).unwrap().flat_coeffs();
        let via_graph = lift_graph(&g, &a).unwrap().eval(&v.flat_coeffs()).unwrap();
        assert!(crate::scalar::rel_err(&direct, &via_graph) < 1e-13);
    }

    #[test]
    fn nested_dual_equals_flat() {
        let d = Arc::new(dual_numbers::<f64>());
        let dd = Arc::new(tensor_product(&d, &d).unwrap());
        let g = parse_exprs::<f64>("x1*x2", Some(2)).unwrap();
        let v = LiftedVector::seeded(&dd, &[3.0, 5.0], &[vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]]).unwrap();
        let flat = eval_lift(&g, &v).unwrap();
        let inner = lift_graph(&g, &d).unwrap();
        let nested = eval_lift(&inner, &nest_coeffs(&v, 2, &d).unwrap()).unwrap();
        assert_eq!(unnest_coeffs(&nested, 2, &dd).unwrap(), flat);
    }

    #[test]
    fn over_reals_is_the_graph_itself() {
        let r = reals::<f64>();
        let g = parse_exprs::<f64>("exp(x1) - x1", Some(1)).unwrap();
        let lg = lift_graph(&g, &r).unwrap();
        assert_eq!(lg.eval(&[0.4]).unwrap(), g.eval(&[0.4]).unwrap());
    }
}
