//! Seeded generators for property tests and the `verify` suites.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{exchange_iso, parse_algebra_spec, AlgebraElement, AlgebraHom, WeilAlgebra};
use crate::expr::{ExprGraph, GraphBuilder, Unary};
use crate::lift::LiftedVector;
use crate::liegroup::{lifted_exp, zero_section, Constraint, GroupKind, LiftedLieAlgebraElement, LiftedMatrix};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// Shape of a random expression graph.
#[derive(Clone, Copy, Debug)]
pub struct GraphShape {
    pub arity: usize,
    pub outputs: usize,
    pub depth: usize,
    /// Restrict to add, mul, neg, constants and small non-negative powers.
    pub polynomial: bool,
}

fn uniform<T: Scalar, R: Rng>(rng: &mut R, lo: f64, hi: f64) -> T {
    T::lit(rng.gen_range(lo..hi))
}

struct Gen<'a, T, R> {
    b: GraphBuilder<T>,
    rng: &'a mut R,
    shape: GraphShape,
}

impl<T: Scalar, R: Rng> Gen<'_, T, R> {
    fn leaf(&mut self) -> usize {
        if self.shape.arity > 0 && self.rng.gen_bool(0.8) {
            let k = self.rng.gen_range(0..self.shape.arity);
            self.b.input(k)
        } else {
            let c = uniform(self.rng, -2.0, 2.0);
            self.b.constant(c)
        }
    }

    // `a² + c` with `c ∈ [0.5, 2]`: strictly positive wherever `a` is defined.
    fn positive(&mut self, a: usize) -> usize {
        let sq = self.b.powi(a, 2);
        let c = uniform(self.rng, 0.5, 2.0);
        self.b.add_const(sq, c)
    }

    fn node(&mut self, depth: usize) -> usize {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.leaf();
        }
        let d = depth - 1;
        if self.shape.polynomial {
            return match self.rng.gen_range(0..10) {
                0..=3 => {
                    let (a, b) = (self.node(d), self.node(d));
                    self.b.add(a, b)
                }
                4..=6 => {
                    let (a, b) = (self.node(d), self.node(d));
                    self.b.mul(a, b)
                }
                7 => {
                    let a = self.node(d);
                    self.b.neg(a)
                }
                8 => {
                    let a = self.node(d.min(2));
                    let k = *[2, 3].choose(self.rng).unwrap_or(&2);
                    self.b.powi(a, k)
                }
                _ => {
                    let a = self.node(d);
                    let s = uniform(self.rng, -1.5, 1.5);
                    self.b.scale(a, s)
                }
            };
        }
        match self.rng.gen_range(0..14) {
            0..=2 => {
                let (a, b) = (self.node(d), self.node(d));
                self.b.add(a, b)
            }
            3..=4 => {
                let (a, b) = (self.node(d), self.node(d));
                self.b.mul(a, b)
            }
            5 => {
                let a = self.node(d);
                self.b.neg(a)
            }
            6 => {
                let a = self.node(d);
                self.b.unary(Unary::Sin, a)
            }
            7 => {
                let a = self.node(d);
                self.b.unary(Unary::Cos, a)
            }
            8 => {
                // keep the exponent bounded
                let a = self.node(d);
                let s = self.b.unary(Unary::Sin, a);
                self.b.unary(Unary::Exp, s)
            }
            9 => {
                let a = self.node(d);
                let p = self.positive(a);
                self.b.unary(Unary::Log, p)
            }
            10 => {
                let a = self.node(d);
                let p = self.positive(a);
                self.b.unary(Unary::Sqrt, p)
            }
            11 => {
                let (a, b) = (self.node(d), self.node(d));
                let p = self.positive(b);
                self.b.div(a, p)
            }
            12 => {
                let a = self.node(d);
                let p = self.positive(a);
                let k = *[-1, -2].choose(self.rng).unwrap_or(&-1);
                self.b.powi(p, k)
            }
            _ => {
                let a = self.node(d.min(2));
                self.b.powi(a, 2)
            }
        }
    }
}

/// A random graph whose transcendental primitives are guarded so that every
/// real point lies in their domain.
pub fn random_graph<T: Scalar, R: Rng>(rng: &mut R, shape: GraphShape) -> ExprGraph<T> {
    let mut g = Gen { b: GraphBuilder::new(shape.arity), rng, shape };
    let outputs = (0..shape.outputs).map(|_| g.node(shape.depth)).collect();
    g.b.finish(outputs).expect("generated graphs are well formed")
}

/// Draws graphs until one stays within `bound` at every given point.
pub fn random_bounded_graph<T: Scalar, R: Rng>(
    rng: &mut R,
    shape: GraphShape,
    points: &[Vec<T>],
    bound: T,
) -> ExprGraph<T> {
    loop {
        let g = random_graph(rng, shape);
        let ok = points.iter().all(|x| match g.eval(x) {
            Ok(v) => v.iter().all(|y| y.is_finite() && y.abs() <= bound),
            Err(_) => false,
        });
        if ok {
            return g;
        }
    }
}

pub fn random_point<T: Scalar, R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<T> {
    (0..n).map(|_| uniform(rng, -radius, radius)).collect()
}

/// A random element of the augmentation ideal.
pub fn random_nilpotent<T: Scalar, R: Rng>(rng: &mut R, alg: &Arc<WeilAlgebra<T>>, scale: f64) -> AlgebraElement<T> {
    let c: Vec<T> = (0..alg.dim()).map(|_| uniform(rng, -scale, scale)).collect();
    AlgebraElement::new(Arc::clone(alg), c).expect("length matches").nilpotent_part()
}

pub fn random_element<T: Scalar, R: Rng>(rng: &mut R, alg: &Arc<WeilAlgebra<T>>, scale: f64) -> AlgebraElement<T> {
    let c: Vec<T> = (0..alg.dim()).map(|_| uniform(rng, -scale, scale)).collect();
    AlgebraElement::new(Arc::clone(alg), c).expect("length matches")
}

/// A lifted vector whose shadow is `x` and whose nilpotent parts are random.
pub fn random_lift_at<T: Scalar, R: Rng>(rng: &mut R, alg: &Arc<WeilAlgebra<T>>, x: &[T], scale: f64) -> LiftedVector<T> {
    let entries = x.iter().map(|xi| random_nilpotent(rng, alg, scale).add_scalar(*xi)).collect();
    LiftedVector::new(alg, entries).expect("single algebra")
}

/// A well-conditioned random invertible matrix: `I·1.5 + U[-1, 1]`, redrawn
/// until its `∞`-norm condition number is at most 50.
pub fn random_invertible<T: Scalar, R: Rng>(rng: &mut R, d: usize) -> Matrix<T> {
    let norm = |m: &Matrix<T>| (0..d).map(|r| m.row(r).iter().fold(T::zero(), |s, x| s + x.abs())).fold(T::zero(), T::max);
    loop {
        let p = Matrix::from_fn(d, d, |r, c| {
            uniform::<T, R>(rng, -1.0, 1.0) + if r == c { T::lit(1.5) } else { T::zero() }
        });
        if let Some(inv) = linalg::inverse(&p) {
            if norm(&p) * norm(&inv) <= T::lit(50.0) {
                return p;
            }
        }
    }
}

/// A random rotation of `R^n` from Gram-Schmidt on a random matrix, with
/// determinant fixed to `+1`.
pub fn random_rotation<T: Scalar, R: Rng>(rng: &mut R, n: usize) -> Matrix<T> {
    loop {
        let cols: Vec<Vec<T>> = (0..n).map(|_| random_point(rng, n, 1.0)).collect();
        let q = linalg::orthonormal_basis(&cols, T::lit(1e-3));
        if q.len() != n {
            continue;
        }
        let mut m = Matrix::from_columns(n, &q);
        if linalg::determinant(&m) < T::zero() {
            for r in 0..n {
                m[(r, 0)] = -m[(r, 0)];
            }
        }
        return m;
    }
}

/// The two factors of a `a*b` tensor algebra, when `alg` is literally their
/// tensor product.
fn tensor_factors<T: Scalar>(alg: &WeilAlgebra<T>) -> Option<(WeilAlgebra<T>, WeilAlgebra<T>)> {
    let (a, b) = alg.name().split_once('*')?;
    let (a, b) = (parse_algebra_spec::<T>(a).ok()?, parse_algebra_spec::<T>(b).ok()?);
    let ab = crate::algebra::tensor_product(&a, &b).ok()?;
    (ab == *alg).then_some((a, b))
}

/// A hom touching `alg`, drawn from: the augmentation `A → R`, the unit
/// inclusion `R → A`, a generator scaling `A → A` (monomial algebras) and the
/// factor exchange (two-factor tensor algebras).
pub fn random_hom<T: Scalar, R: Rng>(rng: &mut R, alg: &Arc<WeilAlgebra<T>>) -> AlgebraHom<T> {
    let mut kinds = vec![0, 1];
    if alg.monomials().is_some() {
        kinds.push(2);
    }
    let factors = tensor_factors(alg);
    if factors.is_some() {
        kinds.push(3);
    }
    match *kinds.choose(rng).unwrap_or(&0) {
        0 => AlgebraHom::augmentation(alg),
        1 => AlgebraHom::unit_inclusion(alg),
        2 => {
            let vars = alg.monomials().and_then(|m| m.first()).map_or(0, |m| m.len());
            let scales: Vec<T> = (0..vars).map(|_| uniform(rng, -2.0, 2.0)).collect();
            AlgebraHom::generator_scaling(alg, &scales).expect("monomial algebra")
        }
        _ => {
            let (a, b) = factors.expect("checked above");
            exchange_iso(&a, &b).expect("valid factors")
        }
    }
}

/// A random element of `T_A g` obeying `constraint`.
pub fn random_lie_element<T: Scalar, R: Rng>(
    rng: &mut R,
    constraint: Constraint,
    alg: &Arc<WeilAlgebra<T>>,
    n: usize,
    scale: f64,
) -> LiftedLieAlgebraElement<T> {
    let mut e = vec![AlgebraElement::zero(alg); n * n];
    for r in 0..n {
        for c in 0..n {
            match constraint {
                Constraint::None => e[r * n + c] = random_element(rng, alg, scale),
                Constraint::Antisymmetric if c > r => {
                    let x = random_element(rng, alg, scale);
                    e[c * n + r] = x.scale(-T::one());
                    e[r * n + c] = x;
                }
                Constraint::StrictlyUpper if c > r => e[r * n + c] = random_element(rng, alg, scale),
                _ => {}
            }
        }
    }
    LiftedLieAlgebraElement::new(constraint, alg, n, e).expect("constraint holds by construction")
}

/// A random element of `T_A G`: a random base point of `G` times the
/// exponential of a random fiber direction (GL also gets random nilpotent
/// entries directly).
pub fn random_group_element<T: Scalar, R: Rng>(
    rng: &mut R,
    kind: GroupKind,
    alg: &Arc<WeilAlgebra<T>>,
    n: usize,
) -> LiftedMatrix<T> {
    match kind {
        GroupKind::GL => {
            let base: Matrix<T> = random_invertible(rng, n);
            let e = (0..n * n)
                .map(|k| random_nilpotent(rng, alg, 1.0).add_scalar(base.as_slice()[k]))
                .collect();
            LiftedMatrix::new(kind, alg, n, e).expect("invertible shadow")
        }
        GroupKind::SO => {
            let base = random_rotation(rng, n);
            let x = random_lie_element(rng, Constraint::Antisymmetric, alg, n, 1.0);
            let fiber_dir = LiftedLieAlgebraElement::new(
                Constraint::Antisymmetric,
                alg,
                n,
                x.entries().iter().map(|a| a.nilpotent_part()).collect(),
            )
            .expect("antisymmetric");
            let g = zero_section(kind, alg, &base).expect("rotation");
            crate::liegroup::group_mul(&g, &lifted_exp(&fiber_dir)).expect("same group")
        }
        GroupKind::Unipotent => {
            let x = random_lie_element(rng, Constraint::StrictlyUpper, alg, n, 1.0);
            let mut e: Vec<AlgebraElement<T>> = x.entries().to_vec();
            for i in 0..n {
                e[i * n + i] = AlgebraElement::one(alg);
            }
            LiftedMatrix::new(kind, alg, n, e).expect("unipotent")
        }
    }
}
