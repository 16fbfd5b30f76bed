//! Matrix Lie groups lifted through `T_A`.
//!
//! `T_A g` is stored directly as an `n×n` array of algebra elements, so
//! `X ⊗ a` is the matrix with entries `X_ij · a`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraError, AlgebraHom, WeilAlgebra};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("not in T_A GL({0}): augmentation of the determinant is zero")]
    Singular(usize),
    #[error("not in {kind}: {reason}")]
    NotInGroup { kind: String, reason: String },
    #[error("entries violate the {constraint} constraint: {reason}")]
    Constraint { constraint: String, reason: String },
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("operands differ: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    GL,
    SO,
    /// Upper triangular with unit diagonal.
    Unipotent,
}

impl GroupKind {
    pub fn constraint(self) -> Constraint {
        match self {
            GroupKind::GL => Constraint::None,
            GroupKind::SO => Constraint::Antisymmetric,
            GroupKind::Unipotent => Constraint::StrictlyUpper,
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::GL => "GL",
            GroupKind::SO => "SO",
            GroupKind::Unipotent => "unipotent",
        })
    }
}

/// Shape constraint on a Lie algebra element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    None,
    Antisymmetric,
    StrictlyUpper,
}

impl Constraint {
    pub fn group(self) -> GroupKind {
        match self {
            Constraint::None => GroupKind::GL,
            Constraint::Antisymmetric => GroupKind::SO,
            Constraint::StrictlyUpper => GroupKind::Unipotent,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::None => "none",
            Constraint::Antisymmetric => "antisymmetric",
            Constraint::StrictlyUpper => "strictly upper",
        })
    }
}

// Square array of algebra elements, row-major. Shared plumbing for groups and
// Lie algebras.
#[derive(Clone, Debug)]
struct Grid<T> {
    n: usize,
    alg: Arc<WeilAlgebra<T>>,
    e: Vec<AlgebraElement<T>>,
}

impl<T: Scalar> Grid<T> {
    fn new(alg: &Arc<WeilAlgebra<T>>, n: usize, e: Vec<AlgebraElement<T>>) -> Result<Self, LieError> {
        if e.len() != n * n {
            return Err(LieError::Shape { expected: n * n, found: e.len() });
        }
        if let Some(bad) = e.iter().find(|x| !(Arc::ptr_eq(x.algebra(), alg) || **x.algebra() == **alg)) {
            return Err(LieError::Mismatch(format!("entry over `{}` in a matrix over `{}`", bad.algebra().name(), alg.name())));
        }
        Ok(Grid { n, alg: Arc::clone(alg), e })
    }

    fn from_fn(alg: &Arc<WeilAlgebra<T>>, n: usize, mut f: impl FnMut(usize, usize) -> AlgebraElement<T>) -> Self {
        let e = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Grid { n, alg: Arc::clone(alg), e }
    }

    fn real(alg: &Arc<WeilAlgebra<T>>, m: &Matrix<T>) -> Self {
        Self::from_fn(alg, m.rows(), |r, c| AlgebraElement::constant(alg, m[(r, c)]))
    }

    fn identity(alg: &Arc<WeilAlgebra<T>>, n: usize) -> Self {
        Self::real(alg, &Matrix::identity(n))
    }

    fn at(&self, r: usize, c: usize) -> &AlgebraElement<T> {
        &self.e[r * self.n + c]
    }

    fn compatible(&self, other: &Self) -> Result<(), LieError> {
        if self.n != other.n {
            return Err(LieError::Mismatch(format!("sizes {} and {}", self.n, other.n)));
        }
        if !(Arc::ptr_eq(&self.alg, &other.alg) || *self.alg == *other.alg) {
            return Err(LieError::Mismatch(format!("algebras `{}` and `{}`", self.alg.name(), other.alg.name())));
        }
        Ok(())
    }

    fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        Self::from_fn(&self.alg, n, |r, c| {
            (0..n).fold(AlgebraElement::zero(&self.alg), |acc, k| acc.add_unchecked(&self.at(r, k).mul_unchecked(other.at(k, c))))
        })
    }

    fn zip(&self, other: &Self, f: impl Fn(&AlgebraElement<T>, &AlgebraElement<T>) -> AlgebraElement<T>) -> Self {
        Grid { n: self.n, alg: Arc::clone(&self.alg), e: self.e.iter().zip(&other.e).map(|(a, b)| f(a, b)).collect() }
    }

    fn map(&self, f: impl Fn(&AlgebraElement<T>) -> AlgebraElement<T>) -> Self {
        Grid { n: self.n, alg: Arc::clone(&self.alg), e: self.e.iter().map(f).collect() }
    }

    fn transpose(&self) -> Self {
        Self::from_fn(&self.alg, self.n, |r, c| self.at(c, r).clone())
    }

    fn shadow(&self) -> Matrix<T> {
        Matrix::from_fn(self.n, self.n, |r, c| self.at(r, c).augmentation())
    }

    fn flat(&self) -> Vec<T> {
        self.e.iter().flat_map(|x| x.coeffs().iter().copied()).collect()
    }

    // Determinant by cofactor expansion along the first row.
    fn det(&self) -> AlgebraElement<T> {
        fn minor<T: Scalar>(g: &Grid<T>, rows: &[usize], cols: &[usize]) -> AlgebraElement<T> {
            if rows.len() == 1 {
                return g.at(rows[0], cols[0]).clone();
            }
            let mut acc = AlgebraElement::zero(&g.alg);
            for (k, c) in cols.iter().enumerate() {
                let rest: Vec<usize> = cols.iter().copied().filter(|x| x != c).collect();
                let term = g.at(rows[0], *c).mul_unchecked(&minor(g, &rows[1..], &rest));
                acc = if k % 2 == 0 { acc.add_unchecked(&term) } else { acc.add_unchecked(&term.scale(-T::one())) };
            }
            acc
        }
        let idx: Vec<usize> = (0..self.n).collect();
        if self.n == 0 {
            return AlgebraElement::one(&self.alg);
        }
        minor(self, &idx, &idx)
    }

    // Adjugate over determinant for small n; Neumann series around the
    // inverted shadow otherwise.
    fn inverse(&self) -> Result<Self, LieError> {
        let n = self.n;
        if linalg::determinant(&self.shadow()) == T::zero() {
            return Err(LieError::Singular(n));
        }
        if n <= 3 {
            let inv_det = self.det().try_invert()?;
            let idx: Vec<usize> = (0..n).collect();
            let sub = |skip_r: usize, skip_c: usize| -> AlgebraElement<T> {
                let rows: Vec<usize> = idx.iter().copied().filter(|r| *r != skip_r).collect();
                let cols: Vec<usize> = idx.iter().copied().filter(|c| *c != skip_c).collect();
                let m = Grid::from_fn(&self.alg, n - 1, |r, c| self.at(rows[r], cols[c]).clone());
                m.det()
            };
            return Ok(Self::from_fn(&self.alg, n, |r, c| {
                // adj(M)_{rc} = (−1)^{r+c} det M_{(c, r)}
                let cof = sub(c, r);
                let cof = if (r + c) % 2 == 0 { cof } else { cof.scale(-T::one()) };
                cof.mul_unchecked(&inv_det)
            }));
        }
        let m0 = self.shadow();
        let m0_inv = linalg::inverse(&m0).ok_or(LieError::Singular(n))?;
        let b = Self::real(&self.alg, &m0_inv);
        let nil = self.map(|x| x.nilpotent_part());
        // M⁻¹ = Σ_k (−M₀⁻¹ N)^k M₀⁻¹, finite since N has nilpotent entries
        let step = b.matmul(&nil).map(|x| x.scale(-T::one()));
        let mut term = b.clone();
        let mut acc = b;
        for _ in 0..self.alg.height() {
            term = step.matmul(&term);
            acc = acc.zip(&term, |x, y| x.add_unchecked(y));
        }
        Ok(acc)
    }

    fn check_group(&self, kind: GroupKind) -> Result<(), LieError> {
        let fail = |reason: String| Err(LieError::NotInGroup { kind: format!("T_A {kind}({})", self.n), reason });
        let tol = T::lit(1e-9);
        match kind {
            GroupKind::GL => {
                // aug(det M) = det(π_A M)
                if linalg::determinant(&self.shadow()) == T::zero() {
                    return Err(LieError::Singular(self.n));
                }
            }
            GroupKind::SO => {
                let mtm = self.transpose().matmul(self);
                let id = Grid::identity(&self.alg, self.n);
                let r = crate::scalar::abs_err(&mtm.flat(), &id.flat());
                if r > tol {
                    return fail(format!("MᵀM − 1 has size {r:e}"));
                }
                let d = self.det().add_scalar(-T::one()).max_abs();
                if d > tol {
                    return fail(format!("det − 1 has size {d:e}"));
                }
            }
            GroupKind::Unipotent => {
                for r in 0..self.n {
                    for c in 0..=r {
                        let want = if r == c { AlgebraElement::one(&self.alg) } else { AlgebraElement::zero(&self.alg) };
                        if self.at(r, c).coeffs() != want.coeffs() {
                            return fail(format!("entry ({r}, {c}) is {}", self.at(r, c)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_constraint(&self, c: Constraint) -> Result<(), LieError> {
        let tol = T::lit(1e-12);
        let fail = |reason: String| Err(LieError::Constraint { constraint: c.to_string(), reason });
        for r in 0..self.n {
            for s in 0..self.n {
                let bad = match c {
                    Constraint::None => T::zero(),
                    Constraint::Antisymmetric => self.at(r, s).add_unchecked(self.at(s, r)).max_abs(),
                    Constraint::StrictlyUpper if s <= r => self.at(r, s).max_abs(),
                    Constraint::StrictlyUpper => T::zero(),
                };
                if bad > tol {
                    return fail(format!("entry ({r}, {s}) off by {bad:e}"));
                }
            }
        }
        Ok(())
    }
}

/// An element of `T_A G` for a matrix group `G`.
#[derive(Clone, Debug)]
pub struct LiftedMatrix<T> {
    kind: GroupKind,
    grid: Grid<T>,
}

/// An element of `T_A g = g ⊗ A`.
#[derive(Clone, Debug)]
pub struct LiftedLieAlgebraElement<T> {
    constraint: Constraint,
    grid: Grid<T>,
}

macro_rules! shared_accessors {
    () => {
        pub fn n(&self) -> usize {
            self.grid.n
        }

        pub fn algebra(&self) -> &Arc<WeilAlgebra<T>> {
            &self.grid.alg
        }

        pub fn entry(&self, r: usize, c: usize) -> &AlgebraElement<T> {
            self.grid.at(r, c)
        }

        /// Row-major entries.
        pub fn entries(&self) -> &[AlgebraElement<T>] {
            &self.grid.e
        }

        /// Entrywise augmentation.
        pub fn shadow(&self) -> Matrix<T> {
            self.grid.shadow()
        }

        /// All coefficients, row-major over entries.
        pub fn flat_coeffs(&self) -> Vec<T> {
            self.grid.flat()
        }

        /// Relative coefficient error against another element of the same shape.
        pub fn rel_err(&self, other: &Self) -> T {
            crate::scalar::rel_err(&self.grid.flat(), &other.grid.flat())
        }
    };
}

impl<T: Scalar> LiftedMatrix<T> {
    /// Checks the group invariant of `kind`.
    pub fn new(kind: GroupKind, alg: &Arc<WeilAlgebra<T>>, n: usize, entries: Vec<AlgebraElement<T>>) -> Result<Self, LieError> {
        let grid = Grid::new(alg, n, entries)?;
        grid.check_group(kind)?;
        Ok(LiftedMatrix { kind, grid })
    }

    pub fn identity(kind: GroupKind, alg: &Arc<WeilAlgebra<T>>, n: usize) -> Self {
        LiftedMatrix { kind, grid: Grid::identity(alg, n) }
    }

    shared_accessors!();

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Re-runs the group invariant.
    pub fn check(&self) -> Result<(), LieError> {
        self.grid.check_group(self.kind)
    }

    pub fn det(&self) -> AlgebraElement<T> {
        self.grid.det()
    }

    /// Drops the group tag to `GL`.
    pub fn as_gl(&self) -> Self {
        LiftedMatrix { kind: GroupKind::GL, grid: self.grid.clone() }
    }

    /// Row-major coefficient vectors, one per entry.
    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.grid.e.iter().map(|e| e.coeffs().to_vec()).collect()
    }
}

impl<T: Scalar> LiftedLieAlgebraElement<T> {
    pub fn new(constraint: Constraint, alg: &Arc<WeilAlgebra<T>>, n: usize, entries: Vec<AlgebraElement<T>>) -> Result<Self, LieError> {
        let grid = Grid::new(alg, n, entries)?;
        grid.check_constraint(constraint)?;
        Ok(LiftedLieAlgebraElement { constraint, grid })
    }

    /// `X ⊗ a`.
    pub fn pure_tensor(constraint: Constraint, x: &Matrix<T>, a: &AlgebraElement<T>) -> Result<Self, LieError> {
        let grid = Grid::from_fn(a.algebra(), x.rows(), |r, c| a.scale(x[(r, c)]));
        grid.check_constraint(constraint)?;
        Ok(LiftedLieAlgebraElement { constraint, grid })
    }

    pub fn zero(constraint: Constraint, alg: &Arc<WeilAlgebra<T>>, n: usize) -> Self {
        LiftedLieAlgebraElement { constraint, grid: Grid::from_fn(alg, n, |_, _| AlgebraElement::zero(alg)) }
    }

    shared_accessors!();

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    fn same_tag(&self, other: &Self) -> Result<(), LieError> {
        self.grid.compatible(&other.grid)?;
        if self.constraint != other.constraint {
            return Err(LieError::Mismatch(format!("tags {} and {}", self.constraint, other.constraint)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LieError> {
        self.same_tag(other)?;
        Ok(LiftedLieAlgebraElement { constraint: self.constraint, grid: self.grid.zip(&other.grid, |a, b| a.add_unchecked(b)) })
    }

    pub fn scale(&self, s: T) -> Self {
        LiftedLieAlgebraElement { constraint: self.constraint, grid: self.grid.map(|a| a.scale(s)) }
    }

    /// Multiplies every entry by the algebra element `a`.
    pub fn scale_by(&self, a: &AlgebraElement<T>) -> Result<Self, LieError> {
        if !a.same_algebra(&AlgebraElement::zero(&self.grid.alg)) {
            return Err(LieError::Mismatch(format!("scalar over `{}`", a.algebra().name())));
        }
        Ok(LiftedLieAlgebraElement { constraint: self.constraint, grid: self.grid.map(|x| x.mul_unchecked(a)) })
    }
}

/// `T_A(μ)`: the lifted product.
pub fn group_mul<T: Scalar>(m: &LiftedMatrix<T>, n: &LiftedMatrix<T>) -> Result<LiftedMatrix<T>, LieError> {
    m.grid.compatible(&n.grid)?;
    if m.kind != n.kind {
        return Err(LieError::Mismatch(format!("groups {} and {}", m.kind, n.kind)));
    }
    Ok(LiftedMatrix { kind: m.kind, grid: m.grid.matmul(&n.grid) })
}

/// `T_A(ν)`: the lifted inverse.
pub fn group_inv<T: Scalar>(m: &LiftedMatrix<T>) -> Result<LiftedMatrix<T>, LieError> {
    Ok(LiftedMatrix { kind: m.kind, grid: m.grid.inverse()? })
}

fn inf_norm<T: Scalar>(m: &Matrix<T>) -> T {
    (0..m.rows()).fold(T::zero(), |acc, r| acc.max(m.row(r).iter().fold(T::zero(), |s, v| s + v.abs())))
}

/// Number of series terms used by [`lifted_exp`] for a real-part norm `x0`
/// and algebra height `h`.
///
/// `J₀` is the first index with `x0^{J₀+1}/(J₀+1)! < 1e-14`; the sum runs to
/// `(h+1)(J₀+1)` so that every nilpotent correction is included.
pub fn exp_cutoff<T: Scalar>(x0: T, h: usize) -> usize {
    let eps = T::lit(1e-14);
    let mut j0 = 0usize;
    let mut bound = x0; // x0^{j0+1}/(j0+1)!
    while bound >= eps && j0 < 1000 {
        j0 += 1;
        bound = bound * x0 / T::from_count(j0 + 1);
    }
    (h + 1) * (j0 + 1)
}

/// `exp` on `T_A g`: `Σ_{j ≤ J} X^j / j!` with [`exp_cutoff`] terms.
///
/// When the real part has `‖X₀‖_∞ > 1` the series is summed for `X/2^s`
/// and squared back `s` times.
pub fn lifted_exp<T: Scalar>(x: &LiftedLieAlgebraElement<T>) -> LiftedMatrix<T> {
    let norm = inf_norm(&x.shadow());
    let mut s = 0u32;
    let mut scaled = norm;
    while scaled > T::one() {
        scaled = scaled / T::lit(2.0);
        s += 1;
    }
    let g = x.grid.map(|e| e.scale(T::lit(0.5).powi(s as i32)));
    let big_j = exp_cutoff(scaled, x.algebra().height());
    let mut term = Grid::identity(&g.alg, g.n);
    let mut acc = term.clone();
    for j in 1..=big_j {
        term = term.matmul(&g).map(|e| e.scale(T::one() / T::from_count(j)));
        if term.e.iter().all(|e| e.coeffs().iter().all(|c| *c == T::zero())) {
            break;
        }
        acc = acc.zip(&term, |a, b| a.add_unchecked(b));
    }
    for _ in 0..s {
        acc = acc.matmul(&acc);
    }
    LiftedMatrix { kind: x.constraint.group(), grid: acc }
}

/// `T_A([ , ])`: `XY − YX` in `A`.
pub fn lifted_bracket<T: Scalar>(
    x: &LiftedLieAlgebraElement<T>,
    y: &LiftedLieAlgebraElement<T>,
) -> Result<LiftedLieAlgebraElement<T>, LieError> {
    x.same_tag(y)?;
    let xy = x.grid.matmul(&y.grid);
    let yx = y.grid.matmul(&x.grid);
    Ok(LiftedLieAlgebraElement { constraint: x.constraint, grid: xy.zip(&yx, |a, b| a.add_unchecked(&b.scale(-T::one()))) })
}

/// Real commutator `[X, Y]`.
pub fn real_bracket<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Matrix<T> {
    let (a, b) = (x.matmul(y), y.matmul(x));
    Matrix::from_fn(x.rows(), x.cols(), |r, c| a[(r, c)] - b[(r, c)])
}

/// Checks that a real matrix satisfies the invariant of `kind`.
pub fn check_real<T: Scalar>(kind: GroupKind, g: &Matrix<T>) -> Result<(), LieError> {
    let r = Arc::new(crate::algebra::reals());
    Grid::real(&r, g).check_group(kind)
}

/// `0_G: G → T_A G`, entries `λ ↦ λ·1`.
pub fn zero_section<T: Scalar>(kind: GroupKind, alg: &Arc<WeilAlgebra<T>>, g: &Matrix<T>) -> Result<LiftedMatrix<T>, LieError> {
    check_real(kind, g)?;
    Ok(LiftedMatrix { kind, grid: Grid::real(alg, g) })
}

/// `π_A: T_A G → G`.
pub fn project<T: Scalar>(m: &LiftedMatrix<T>) -> Matrix<T> {
    m.shadow()
}

/// `M = U · 0_G(π_A(M))` with `U` in the fiber over the identity.
#[derive(Clone, Debug)]
pub struct SemidirectReport<T> {
    pub fiber: LiftedMatrix<T>,
    pub base: Matrix<T>,
    /// `‖U · 0_G(g) − M‖_∞` on coefficients.
    pub residual: T,
    /// `‖π_A(U) − 1‖_∞`.
    pub fiber_offset: T,
}

pub fn semidirect_check<T: Scalar>(m: &LiftedMatrix<T>) -> Result<SemidirectReport<T>, LieError> {
    m.check()?;
    let base = project(m);
    let z = zero_section(m.kind, m.algebra(), &base)?;
    let fiber = group_mul(m, &group_inv(&z)?)?;
    let back = group_mul(&fiber, &z)?;
    let residual = crate::scalar::abs_err(&back.flat_coeffs(), &m.flat_coeffs());
    let id = Matrix::<T>::identity(m.n());
    let fiber_offset = crate::scalar::abs_err(fiber.shadow().as_slice(), id.as_slice());
    Ok(SemidirectReport { fiber, base, residual, fiber_offset })
}

fn push_grid<T: Scalar>(phi: &AlgebraHom<T>, g: &Grid<T>) -> Result<Grid<T>, LieError> {
    if !(Arc::ptr_eq(phi.source(), &g.alg) || **phi.source() == *g.alg) {
        return Err(AlgebraError::Mismatch { left: phi.source().name().into(), right: g.alg.name().into() }.into());
    }
    let e = g.e.iter().map(|x| phi.apply(x)).collect::<Result<Vec<_>, _>>()?;
    Grid::new(phi.target(), g.n, e)
}

/// `T_φ` on a lifted group element.
pub fn push_hom_matrix<T: Scalar>(phi: &AlgebraHom<T>, m: &LiftedMatrix<T>) -> Result<LiftedMatrix<T>, LieError> {
    Ok(LiftedMatrix { kind: m.kind, grid: push_grid(phi, &m.grid)? })
}

/// `T_φ` on a lifted Lie algebra element.
pub fn push_hom_lie<T: Scalar>(phi: &AlgebraHom<T>, x: &LiftedLieAlgebraElement<T>) -> Result<LiftedLieAlgebraElement<T>, LieError> {
    Ok(LiftedLieAlgebraElement { constraint: x.constraint, grid: push_grid(phi, &x.grid)? })
}

/// `[[0, −θ], [θ, 0]]`, the `so(2)` generator scaled by `θ`.
pub fn so2_generator<T: Scalar>(theta: T) -> Matrix<T> {
    Matrix::from_row_major(2, 2, vec![T::zero(), -theta, theta, T::zero()])
}

pub fn rotation2<T: Scalar>(theta: T) -> Matrix<T> {
    let (s, c) = theta.sin_cos();
    Matrix::from_row_major(2, 2, vec![c, -s, s, c])
}

/// Standard basis `e₁, e₂, e₃` of `so(3)` with `[e₁, e₂] = e₃`.
pub fn so3_basis<T: Scalar>() -> [Matrix<T>; 3] {
    let (o, l) = (T::zero(), T::one());
    [
        Matrix::from_row_major(3, 3, vec![o, o, o, o, o, -l, o, l, o]),
        Matrix::from_row_major(3, 3, vec![o, o, l, o, o, o, -l, o, o]),
        Matrix::from_row_major(3, 3, vec![o, -l, o, l, o, o, o, o, o]),
    ]
}
