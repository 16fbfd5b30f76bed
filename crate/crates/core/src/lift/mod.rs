//! The Weil functor `T_A` on maps `R^n → R^m`.
//!
//! A point of `T_A R^n = A^n` is a [`LiftedVector`]; [`eval_lift`] pushes it
//! through an [`ExprGraph`] by lifting each primitive with its Taylor table.

mod oracle;
mod symbolic;
mod taylor;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use oracle::{expand_polynomial, taylor_formula_oracle, taylor_formula_oracle_with_basis, Polynomial};
pub use symbolic::{lift_graph, nest_coeffs, unnest_coeffs};
pub use taylor::TaylorTable;

use crate::algebra::{AlgebraElement, AlgebraError, AlgebraHom, AlgebraTable, WeilAlgebra};
use crate::expr::{Binary, ExprGraph, GraphBuilder, GraphError, Node, Unary};
use crate::scalar::{rel_err, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiftError {
    #[error("domain violation{}: {primitive} undefined at augmentation {value}", at_node(.node))]
    Domain { node: Option<usize>, primitive: &'static str, value: f64 },
    #[error("expected {expected} lifted inputs, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("node {node} ({primitive}) is not polynomial")]
    NotPolynomial { node: usize, primitive: &'static str },
    #[error("lifted vector mixes algebras `{left}` and `{right}`")]
    MixedAlgebras { left: String, right: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn at_node(node: &Option<usize>) -> String {
    node.map(|n| format!(" at node {n}")).unwrap_or_default()
}

/// A point of `T_A R^n`: one algebra element per coordinate.
#[derive(Clone, Debug)]
pub struct LiftedVector<T> {
    algebra: Arc<WeilAlgebra<T>>,
    entries: Vec<AlgebraElement<T>>,
}

impl<T: Scalar> PartialEq for LiftedVector<T> {
    fn eq(&self, other: &Self) -> bool {
        *self.algebra == *other.algebra && self.entries == other.entries
    }
}

impl<T: Scalar> LiftedVector<T> {
    pub fn new(algebra: &Arc<WeilAlgebra<T>>, entries: Vec<AlgebraElement<T>>) -> Result<Self, LiftError> {
        for e in &entries {
            if !(Arc::ptr_eq(e.algebra(), algebra) || **e.algebra() == **algebra) {
                return Err(LiftError::MixedAlgebras {
                    left: algebra.name().to_string(),
                    right: e.algebra().name().to_string(),
                });
            }
        }
        Ok(LiftedVector { algebra: Arc::clone(algebra), entries })
    }

    /// One coefficient vector per coordinate.
    pub fn from_coeffs(algebra: &Arc<WeilAlgebra<T>>, rows: Vec<Vec<T>>) -> Result<Self, LiftError> {
        let entries = rows
            .into_iter()
            .map(|c| AlgebraElement::new(Arc::clone(algebra), c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LiftedVector { algebra: Arc::clone(algebra), entries })
    }

    /// The point `x` with zero nilpotent parts.
    pub fn constant(algebra: &Arc<WeilAlgebra<T>>, x: &[T]) -> Self {
        let entries = x.iter().map(|v| AlgebraElement::constant(algebra, *v)).collect();
        LiftedVector { algebra: Arc::clone(algebra), entries }
    }

    /// `x_i·1 + seeds_i`, where each seed is a coefficient vector (normally
    /// inside `N`).
    pub fn seeded(algebra: &Arc<WeilAlgebra<T>>, x: &[T], seeds: &[Vec<T>]) -> Result<Self, LiftError> {
        if seeds.len() != x.len() {
            return Err(LiftError::ArityMismatch { expected: x.len(), found: seeds.len() });
        }
        let mut entries = Vec::with_capacity(x.len());
        for (xi, s) in x.iter().zip(seeds) {
            let e = AlgebraElement::new(Arc::clone(algebra), s.clone())?;
            entries.push(e.add_scalar(*xi));
        }
        Ok(LiftedVector { algebra: Arc::clone(algebra), entries })
    }

    pub fn algebra(&self) -> &Arc<WeilAlgebra<T>> {
        &self.algebra
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[AlgebraElement<T>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<AlgebraElement<T>> {
        self.entries
    }

    /// Componentwise augmentation: the underlying point of `R^n`.
    pub fn shadow(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.augmentation()).collect()
    }

    /// All coefficients, coordinate-major.
    pub fn flat_coeffs(&self) -> Vec<T> {
        self.entries.iter().flat_map(|e| e.coeffs().iter().copied()).collect()
    }

    /// Relative error against another lifted vector of the same shape.
    pub fn rel_err(&self, other: &Self) -> T {
        rel_err(&self.flat_coeffs(), &other.flat_coeffs())
    }
}

impl<T: Scalar> fmt::Display for LiftedVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// `T_A f(λ + n) = Σ_{j ≤ h} f^{(j)}(λ)/j! n^j`.
pub fn lift_primitive<T: Scalar>(op: Unary, a: &AlgebraElement<T>) -> Result<AlgebraElement<T>, LiftError> {
    let lambda = a.augmentation();
    if !op.domain().contains(lambda) {
        return Err(LiftError::Domain {
            node: None,
            primitive: op.name(),
            value: lambda.to_f64().unwrap_or(f64::NAN),
        });
    }
    match op {
        Unary::Neg => return Ok(a.scale(-T::one())),
        Unary::Inv => return Ok(a.try_invert()?),
        Unary::PowInt(k) if k >= 0 => return Ok(a.powi(k as u32)),
        Unary::PowInt(k) => return Ok(a.try_invert()?.powi(k.unsigned_abs())),
        _ => {}
    }
    let h = a.algebra().height();
    let coeffs = TaylorTable::new(op).coefficients(lambda, h);
    let n = a.nilpotent_part();
    let mut acc = AlgebraElement::constant(a.algebra(), coeffs[h]);
    for c in coeffs[..h].iter().rev() {
        acc = acc.mul_unchecked(&n).add_scalar(*c);
    }
    Ok(acc)
}

/// Evaluates `T_A g` at `v` by lifting every node in order.
pub fn eval_lift<T: Scalar>(g: &ExprGraph<T>, v: &LiftedVector<T>) -> Result<LiftedVector<T>, LiftError> {
    if v.len() != g.arity() {
        return Err(LiftError::ArityMismatch { expected: g.arity(), found: v.len() });
    }
    let alg = v.algebra();
    let mut vals: Vec<AlgebraElement<T>> = Vec::with_capacity(g.nodes().len());
    for (node, n) in g.nodes().iter().enumerate() {
        let x = match *n {
            Node::Input(k) => v.entries[k].clone(),
            Node::Const(c) => AlgebraElement::constant(alg, c),
            Node::Unary(op, a) => lift_primitive(op, &vals[a]).map_err(|e| match e {
                LiftError::Domain { primitive, value, .. } => LiftError::Domain { node: Some(node), primitive, value },
                other => other,
            })?,
            Node::Binary(Binary::Add, a, b) => vals[a].add_unchecked(&vals[b]),
            Node::Binary(Binary::Mul, a, b) => vals[a].mul_unchecked(&vals[b]),
        };
        vals.push(x);
    }
    let entries = g.outputs().iter().map(|o| vals[*o].clone()).collect();
    Ok(LiftedVector { algebra: Arc::clone(alg), entries })
}

/// `(φ ⊗ R^n)(v)`: applies the hom to every coordinate.
pub fn push_hom<T: Scalar>(phi: &AlgebraHom<T>, v: &LiftedVector<T>) -> Result<LiftedVector<T>, LiftError> {
    let src = phi.source();
    if !(Arc::ptr_eq(src, v.algebra()) || **src == **v.algebra()) {
        return Err(LiftError::Algebra(AlgebraError::Mismatch {
            left: src.name().to_string(),
            right: v.algebra().name().to_string(),
        }));
    }
    let rows = v.entries.iter().map(|e| phi.apply_coeffs(e.coeffs())).collect();
    LiftedVector::from_coeffs(phi.target(), rows)
}

/// Rebuilds the structure constants of `A` from `T_A` alone: the product
/// `b_i b_j` is the lift of `(s, t) ↦ s·t` evaluated at `(b_i, b_j)`.
pub fn recover_algebra<T: Scalar>(a: &Arc<WeilAlgebra<T>>) -> Result<AlgebraTable<T>, LiftError> {
    let mut b = GraphBuilder::new(2);
    let (s, t) = (b.input(0), b.input(1));
    let p = b.mul(s, t);
    let product = b.finish(vec![p])?;
    let d = a.dim();
    let mut sc = vec![T::zero(); d * d * d];
    for i in 0..d {
        for j in 0..d {
            let v = LiftedVector::new(a, vec![AlgebraElement::basis(a, i), AlgebraElement::basis(a, j)])?;
            let out = eval_lift(&product, &v)?;
            for (k, c) in out.entries[0].coeffs().iter().enumerate() {
                sc[(i * d + j) * d + k] = *c;
            }
        }
    }
    let mut t = AlgebraTable::new(a.name().to_string(), d, a.unit().to_vec(), Some(a.aug().to_vec()), sc)?;
    t.labels = a.labels().map(|l| l.to_vec());
    t.monomials = a.monomials().map(|m| m.to_vec());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{dual_numbers, jet, multivariate_jet, tensor_product};
    use crate::expr::parse_exprs;

    fn arc<T>(a: T) -> Arc<T> {
        Arc::new(a)
    }

    #[test]
    fn exp_over_dual_at_x() {
        let d = arc(dual_numbers::<f64>());
        let x = AlgebraElement::basis(&d, 1);
        assert_eq!(lift_primitive(Unary::Exp, &x).unwrap().coeffs(), &[1.0, 1.0]);
    }

    #[test]
    fn sin_over_three_jets() {
        let j3 = arc(jet::<f64>(3));
        let x = AlgebraElement::basis(&j3, 1);
        let s = lift_primitive(Unary::Sin, &x).unwrap();
        let want = [0.0, 1.0, 0.0, -1.0 / 6.0];
        assert!(rel_err(s.coeffs(), &want) < 1e-15);
    }

    #[test]
    fn constant_input_gives_constant_output() {
        let j3 = arc(jet::<f64>(3));
        let c = AlgebraElement::constant(&j3, 0.7);
        for op in [Unary::Exp, Unary::Log, Unary::Sqrt, Unary::Sin, Unary::Inv, Unary::PowInt(-2)] {
            let y = lift_primitive(op, &c).unwrap();
            assert!((y.coeffs()[0] - op.eval(0.7)).abs() < 1e-15);
            assert!(y.coeffs()[1..].iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn domain_errors_carry_node() {
        let d = arc(dual_numbers::<f64>());
        let g = parse_exprs::<f64>("log(x1 - 2)", Some(1)).unwrap();
        let v = LiftedVector::seeded(&d, &[1.0], &[vec![0.0, 1.0]]).unwrap();
        match eval_lift(&g, &v) {
            Err(LiftError::Domain { node: Some(_), primitive: "log", value }) => assert_eq!(value, -1.0),
            other => panic!("{other:?}"),
        }
        let x = AlgebraElement::basis(&d, 1);
        assert!(matches!(lift_primitive(Unary::Inv, &x), Err(LiftError::Domain { .. })));
    }

    #[test]
    fn square_over_dual() {
        let d = arc(dual_numbers::<f64>());
        let g = parse_exprs::<f64>("x1^2", Some(1)).unwrap();
        let v = LiftedVector::seeded(&d, &[3.0], &[vec![0.0, 1.0]]).unwrap();
        assert_eq!(eval_lift(&g, &v).unwrap().entries()[0].coeffs(), &[9.0, 6.0]);
    }

    #[test]
    fn product_over_dual_tensor_dual() {
        let d = dual_numbers::<f64>();
        let dd = arc(tensor_product(&d, &d).unwrap());
        let g = parse_exprs::<f64>("x1*x2", Some(2)).unwrap();
        let v = LiftedVector::seeded(&dd, &[3.0, 5.0], &[vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(eval_lift(&g, &v).unwrap().entries()[0].coeffs(), &[15.0, 5.0, 3.0, 1.0]);
    }

    #[test]
    fn identity_graph_is_identity() {
        let a = arc(multivariate_jet::<f64>(2, 2));
        let v = LiftedVector::from_coeffs(&a, vec![vec![0.5, 1.0, -2.0, 0.3, 0.1, 0.2], vec![-1.0, 0.0, 0.4, 7.0, 0.0, 1.0]])
            .unwrap();
        assert_eq!(eval_lift(&ExprGraph::identity(2), &v).unwrap(), v);
    }

    #[test]
    fn recovery_of_jets() {
        let j2 = arc(jet::<f64>(2));
        assert_eq!(&recover_algebra(&j2).unwrap(), j2.table());
    }

    #[test]
    fn push_aug_gives_shadow() {
        let a = arc(jet::<f64>(3));
        let v = LiftedVector::from_coeffs(&a, vec![vec![1.5, 2.0, 3.0, 4.0]]).unwrap();
        let p = push_hom(&AlgebraHom::augmentation(&a), &v).unwrap();
        assert_eq!(p.flat_coeffs(), v.shadow());
    }
}
