//! The explicit Taylor formula for polynomial maps
//!
//! `T_A f(1⊗x₁ + Σ n_j⊗x_j) = 1⊗f(x₁) + Σ_{k≥1} 1/k! Σ n_{j₁}…n_{j_k} ⊗ d^k f(x₁)(x_{j₁},…,x_{j_k})`
//!
//! evaluated by symbolic expansion, independently of [`eval_lift`](super::eval_lift).

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{LiftError, LiftedVector};
use crate::algebra::{AlgebraElement, AlgebraError};
use crate::expr::{Binary, ExprGraph, Node, Unary};
use crate::linalg::{self, Matrix};
use crate::scalar::{inv_factorial, Scalar};

/// A real polynomial in `vars` variables as a map from exponent vectors to
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    vars: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(vars: usize) -> Self {
        Polynomial { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: T) -> Self {
        let mut p = Self::zero(vars);
        if c != T::zero() {
            p.terms.insert(vec![0; vars], c);
        }
        p
    }

    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(e, T::one());
        p
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, T> {
        &self.terms
    }

    fn insert(&mut self, e: Vec<u32>, c: T) {
        let slot = self.terms.entry(e).or_insert_with(T::zero);
        *slot = *slot + c;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.insert(e.clone(), *c);
        }
        p
    }

    pub fn scale(&self, s: T) -> Self {
        Polynomial { vars: self.vars, terms: self.terms.iter().map(|(e, c)| (e.clone(), *c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.insert(e, *ca * *cb);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.vars, T::one()), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.terms.iter().fold(T::zero(), |acc, (e, c)| {
            acc + e.iter().zip(x).fold(*c, |m, (k, xi)| m * xi.powi(*k as i32))
        })
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut p = Self::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                p.insert(f, *c * T::from_count(e[i] as usize));
            }
        }
        p
    }

    /// `Σ_i u_i ∂_i p`.
    pub fn directional(&self, u: &[T]) -> Self {
        let mut p = Self::zero(self.vars);
        for (i, ui) in u.iter().enumerate() {
            if *ui != T::zero() {
                p = p.add(&self.partial(i).scale(*ui));
            }
        }
        p
    }
}

/// Expands every output of a polynomial graph.
pub fn expand_polynomial<T: Scalar>(g: &ExprGraph<T>) -> Result<Vec<Polynomial<T>>, LiftError> {
    let n = g.arity();
    let mut vals: Vec<Polynomial<T>> = Vec::with_capacity(g.nodes().len());
    for (node, nd) in g.nodes().iter().enumerate() {
        let p = match *nd {
            Node::Input(k) => Polynomial::var(n, k),
            Node::Const(c) => Polynomial::constant(n, c),
            Node::Unary(Unary::Neg, a) => vals[a].scale(-T::one()),
            Node::Unary(Unary::PowInt(k), a) if k >= 0 => vals[a].pow(k as u32),
            Node::Unary(op, _) => return Err(LiftError::NotPolynomial { node, primitive: op.name() }),
            Node::Binary(Binary::Add, a, b) => vals[a].add(&vals[b]),
            Node::Binary(Binary::Mul, a, b) => vals[a].mul(&vals[b]),
        };
        vals.push(p);
    }
    Ok(g.outputs().iter().map(|o| vals[*o].clone()).collect())
}

/// The Step-3 formula against the algebra's own orthonormal basis of `N`.
pub fn taylor_formula_oracle<T: Scalar>(g: &ExprGraph<T>, v: &LiftedVector<T>) -> Result<LiftedVector<T>, LiftError> {
    let basis = v.algebra().nilpotent_basis();
    taylor_formula_oracle_with_basis(g, v, &basis)
}

/// The Step-3 formula with `v_i = x_i·1 + Σ_j X_{ij} n_j` decomposed against
/// the given basis `{n_j}` of `N` (coefficient vectors, any basis).
pub fn taylor_formula_oracle_with_basis<T: Scalar>(
    g: &ExprGraph<T>,
    v: &LiftedVector<T>,
    nil_basis: &[Vec<T>],
) -> Result<LiftedVector<T>, LiftError> {
    if v.len() != g.arity() {
        return Err(LiftError::ArityMismatch { expected: g.arity(), found: v.len() });
    }
    let alg = Arc::clone(v.algebra());
    let d = alg.dim();
    if nil_basis.len() + 1 != d || nil_basis.iter().any(|b| b.len() != d) {
        return Err(AlgebraError::DimensionMismatch { expected: d - 1, found: nil_basis.len() }.into());
    }
    let polys = expand_polynomial(g)?;
    let x = v.shadow();

    // Coordinates of each nilpotent part in {n_j}: normal equations.
    let b = Matrix::from_columns(d, nil_basis);
    let gram = b.transpose().matmul(&b);
    let mut dirs = vec![vec![T::zero(); v.len()]; nil_basis.len()];
    for (i, e) in v.entries().iter().enumerate() {
        let rhs = b.transpose().mul_vec(e.nilpotent_part().coeffs());
        let coords = linalg::solve(&gram, &rhs)
            .ok_or_else(|| AlgebraError::Decomposition("nilpotent basis is degenerate".into()))?;
        for (j, c) in coords.into_iter().enumerate() {
            dirs[j][i] = c;
        }
    }
    let nil: Vec<AlgebraElement<T>> = nil_basis.iter().map(|c| AlgebraElement::new(Arc::clone(&alg), c.clone())).collect::<Result<_, _>>()?;

    let h = alg.height();
    let mut entries = Vec::with_capacity(polys.len());
    for p in &polys {
        let mut acc = AlgebraElement::constant(&alg, p.eval(&x));
        let ctx = Ctx { x: &x, dirs: &dirs, nil: &nil, h };
        ctx.descend(p, &AlgebraElement::one(&alg), 1, &mut acc);
        entries.push(acc);
    }
    LiftedVector::new(&alg, entries)
}

struct Ctx<'a, T> {
    x: &'a [T],
    dirs: &'a [Vec<T>],
    nil: &'a [AlgebraElement<T>],
    h: usize,
}

impl<T: Scalar> Ctx<'_, T> {
    // Adds 1/k! n_{j_1}…n_{j_k} d^k f(x)(X_{j_1}, …, X_{j_k}) over all tuples
    // extending the current prefix.
    fn descend(&self, p: &Polynomial<T>, prod: &AlgebraElement<T>, k: usize, acc: &mut AlgebraElement<T>) {
        if k > self.h {
            return;
        }
        for (j, nj) in self.nil.iter().enumerate() {
            let q = p.directional(&self.dirs[j]);
            if q.terms().is_empty() {
                continue;
            }
            let next = prod.mul_unchecked(nj);
            if next.coeffs().iter().all(|c| *c == T::zero()) {
                continue;
            }
            let w = q.eval(self.x) * inv_factorial(k);
            *acc = acc.add_unchecked(&next.scale(w));
            self.descend(&q, &next, k + 1, acc);
        }
    }
}
