//! Chart-glued manifolds and the lifted bundle `T_A M → M`.

mod builtin;
mod format;

use std::sync::Arc;

use thiserror::Error;

pub use builtin::{
    circle, circle_rotation, euclidean, sphere, sphere_embedding, sphere_height, sphere_orthogonal,
};
pub use format::{parse_atlas, write_atlas};

use crate::algebra::{AlgebraError, WeilAlgebra};
use crate::expr::{ExprGraph, GraphError};
use crate::lift::{eval_lift, LiftError, LiftedVector};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifoldError {
    #[error("no chart with id {0}")]
    UnknownChart(usize),
    #[error("no transition from chart {from} to chart {to} covers {point:?}")]
    NoTransition { from: usize, to: usize, point: Vec<f64> },
    #[error("point {point:?} lies outside the domain of chart {chart}")]
    OutsideChart { chart: usize, point: Vec<f64> },
    #[error("map `{map}` has no representative at chart {chart}, point {point:?}")]
    NoRepresentative { map: String, chart: usize, point: Vec<f64> },
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("atlas line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Lift(#[from] LiftError),
}

impl From<GraphError> for ManifoldError {
    fn from(e: GraphError) -> Self {
        ManifoldError::Lift(e.into())
    }
}

impl From<AlgebraError> for ManifoldError {
    fn from(e: AlgebraError) -> Self {
        ManifoldError::Lift(e.into())
    }
}

fn to_f64<T: Scalar>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
}

/// An open semialgebraic set `{x : g_k(x) > 0 for all k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Region<T> {
    dim: usize,
    inequalities: Vec<ExprGraph<T>>,
}

impl<T: Scalar> Region<T> {
    /// All of `R^dim`.
    pub fn everything(dim: usize) -> Self {
        Region { dim, inequalities: Vec::new() }
    }

    pub fn new(dim: usize, inequalities: Vec<ExprGraph<T>>) -> Result<Self, ManifoldError> {
        for g in &inequalities {
            if g.arity() != dim || g.output_len() != 1 {
                return Err(ManifoldError::DimensionMismatch { expected: dim, found: g.arity() });
            }
        }
        Ok(Region { dim, inequalities })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[ExprGraph<T>] {
        &self.inequalities
    }

    /// Strict membership; points where an inequality is undefined are outside.
    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim
            && self.inequalities.iter().all(|g| matches!(g.eval(x), Ok(v) if v[0] > T::zero()))
    }

    /// Smallest inequality value; a margin of how deep inside `x` sits.
    pub fn margin(&self, x: &[T]) -> Option<T> {
        self.inequalities.iter().try_fold(T::infinity(), |m, g| g.eval(x).ok().map(|v| m.min(v[0])))
    }

    pub fn and(&self, other: &Self) -> Self {
        let mut inequalities = self.inequalities.clone();
        inequalities.extend(other.inequalities.iter().cloned());
        Region { dim: self.dim, inequalities }
    }

    /// `{x : f(x) ∈ self}`.
    pub fn pullback(&self, f: &ExprGraph<T>) -> Result<Self, ManifoldError> {
        let inequalities = self.inequalities.iter().map(|g| g.compose(f)).collect::<Result<_, _>>()?;
        Ok(Region { dim: f.arity(), inequalities })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart<T> {
    pub id: usize,
    pub dim: usize,
    pub domain: Region<T>,
}

/// One piece of the chart change `u_{ba}` from chart `from` to chart `to`,
/// valid on `domain` (in `from`-coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct Transition<T> {
    pub from: usize,
    pub to: usize,
    pub domain: Region<T>,
    pub map: ExprGraph<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atlas<T> {
    pub name: String,
    charts: Vec<Chart<T>>,
    transitions: Vec<Transition<T>>,
}

impl<T: Scalar> Atlas<T> {
    pub fn new(name: impl Into<String>, charts: Vec<Chart<T>>, transitions: Vec<Transition<T>>) -> Result<Self, ManifoldError> {
        let atlas = Atlas { name: name.into(), charts, transitions };
        for t in &atlas.transitions {
            let a = atlas.chart(t.from)?;
            let b = atlas.chart(t.to)?;
            if t.domain.dim() != a.dim || t.map.arity() != a.dim {
                return Err(ManifoldError::DimensionMismatch { expected: a.dim, found: t.map.arity() });
            }
            if t.map.output_len() != b.dim {
                return Err(ManifoldError::DimensionMismatch { expected: b.dim, found: t.map.output_len() });
            }
        }
        Ok(atlas)
    }

    pub fn charts(&self) -> &[Chart<T>] {
        &self.charts
    }

    pub fn transitions(&self) -> &[Transition<T>] {
        &self.transitions
    }

    pub fn chart(&self, id: usize) -> Result<&Chart<T>, ManifoldError> {
        self.charts.iter().find(|c| c.id == id).ok_or(ManifoldError::UnknownChart(id))
    }

    /// Manifold dimension (all charts share it).
    pub fn dim(&self) -> usize {
        self.charts.first().map_or(0, |c| c.dim)
    }

    /// The transition piece from `a` to `b` whose domain contains `x`.
    /// For `a == b` this is `None`: the change is the identity.
    pub fn transition_at(&self, a: usize, b: usize, x: &[T]) -> Result<Option<&Transition<T>>, ManifoldError> {
        if a == b {
            return Ok(None);
        }
        self.transitions
            .iter()
            .find(|t| t.from == a && t.to == b && t.domain.contains(x))
            .map(Some)
            .ok_or_else(|| ManifoldError::NoTransition { from: a, to: b, point: to_f64(x) })
    }

    /// Ids of the charts whose domain contains the image of `(chart, x)`.
    pub fn charts_containing(&self, chart: usize, x: &[T]) -> Vec<usize> {
        self.charts
            .iter()
            .filter(|c| {
                if c.id == chart {
                    return c.domain.contains(x);
                }
                match self.transition_at(chart, c.id, x) {
                    Ok(Some(t)) => t.map.eval(x).map(|y| c.domain.contains(&y)).unwrap_or(false),
                    _ => false,
                }
            })
            .map(|c| c.id)
            .collect()
    }

    /// Real chart change of a base point.
    pub fn change_chart(&self, a: usize, b: usize, x: &[T]) -> Result<Vec<T>, ManifoldError> {
        match self.transition_at(a, b, x)? {
            None => Ok(x.to_vec()),
            Some(t) => Ok(t.map.eval(x)?),
        }
    }
}

/// A point of `T_A M`: a chart and lifted coordinates whose shadow lies in
/// that chart.
#[derive(Clone, Debug)]
pub struct WeilPoint<T> {
    pub chart: usize,
    pub coords: LiftedVector<T>,
}

impl<T: Scalar> PartialEq for WeilPoint<T> {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart && self.coords == other.coords
    }
}

impl<T: Scalar> WeilPoint<T> {
    pub fn new(atlas: &Atlas<T>, chart: usize, coords: LiftedVector<T>) -> Result<Self, ManifoldError> {
        let c = atlas.chart(chart)?;
        if coords.len() != c.dim {
            return Err(ManifoldError::DimensionMismatch { expected: c.dim, found: coords.len() });
        }
        let x = coords.shadow();
        if !c.domain.contains(&x) {
            return Err(ManifoldError::OutsideChart { chart, point: to_f64(&x) });
        }
        Ok(WeilPoint { chart, coords })
    }

    /// The zero-section point over `(chart, x)`.
    pub fn zero_section(atlas: &Atlas<T>, alg: &Arc<WeilAlgebra<T>>, chart: usize, x: &[T]) -> Result<Self, ManifoldError> {
        Self::new(atlas, chart, LiftedVector::constant(alg, x))
    }

    pub fn algebra(&self) -> &Arc<WeilAlgebra<T>> {
        self.coords.algebra()
    }
}

/// Re-expresses `p` in chart `beta` through the lifted chart change.
pub fn to_chart<T: Scalar>(atlas: &Atlas<T>, p: &WeilPoint<T>, beta: usize) -> Result<WeilPoint<T>, ManifoldError> {
    let x = p.coords.shadow();
    match atlas.transition_at(p.chart, beta, &x)? {
        None => Ok(p.clone()),
        Some(t) => WeilPoint::new(atlas, beta, eval_lift(&t.map, &p.coords)?),
    }
}

/// `π_{A,M}`: the base point `(chart, shadow)`.
pub fn bundle_project<T: Scalar>(p: &WeilPoint<T>) -> (usize, Vec<T>) {
    (p.chart, p.coords.shadow())
}

/// Local representative of a map `M → M'` from chart `source` of `M` into
/// chart `target` of `M'`, valid on `domain`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapPiece<T> {
    pub source: usize,
    pub target: usize,
    pub domain: Region<T>,
    pub map: ExprGraph<T>,
}

/// A smooth map between atlased manifolds given by local representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldMap<T> {
    pub name: String,
    pub pieces: Vec<MapPiece<T>>,
}

impl<T: Scalar> ManifoldMap<T> {
    /// Identity of an atlas: one piece per chart.
    pub fn identity(atlas: &Atlas<T>) -> Self {
        let pieces = atlas
            .charts()
            .iter()
            .map(|c| MapPiece { source: c.id, target: c.id, domain: c.domain.clone(), map: ExprGraph::identity(c.dim) })
            .collect();
        ManifoldMap { name: "id".into(), pieces }
    }

    /// `other ∘ self`, piece by piece: `(a→b, U, f)` and `(b→c, V, g)` give
    /// `(a→c, U ∩ f⁻¹V, g∘f)`.
    pub fn then(&self, other: &Self) -> Result<Self, ManifoldError> {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for q in other.pieces.iter().filter(|q| q.source == p.target) {
                pieces.push(MapPiece {
                    source: p.source,
                    target: q.target,
                    domain: p.domain.and(&q.domain.pullback(&p.map)?),
                    map: q.map.compose(&p.map)?,
                });
            }
        }
        Ok(ManifoldMap { name: format!("{}∘{}", other.name, self.name), pieces })
    }

    /// Pieces usable at the base point `(chart, x)` whose image lands in the
    /// target chart's domain.
    pub fn admissible<'a>(&'a self, target: &'a Atlas<T>, chart: usize, x: &'a [T]) -> impl Iterator<Item = &'a MapPiece<T>> + 'a {
        self.pieces.iter().filter(move |p| {
            p.source == chart
                && p.domain.contains(x)
                && match (p.map.eval(x), target.chart(p.target)) {
                    (Ok(y), Ok(c)) => c.domain.contains(&y),
                    _ => false,
                }
        })
    }
}

/// `T_A f` at `p` through the first admissible local representative.
pub fn lift_map<T: Scalar>(f: &ManifoldMap<T>, target: &Atlas<T>, p: &WeilPoint<T>) -> Result<WeilPoint<T>, ManifoldError> {
    let x = p.coords.shadow();
    let piece = f.admissible(target, p.chart, &x).next().ok_or_else(|| ManifoldError::NoRepresentative {
        map: f.name.clone(),
        chart: p.chart,
        point: to_f64(&x),
    })?;
    WeilPoint::new(target, piece.target, eval_lift(&piece.map, &p.coords)?)
}

/// `T_A f(p)` computed through every admissible pair (source chart, piece),
/// each result moved to the chart of the first. Agreement of the list is
/// the chart independence of the glued lift.
pub fn lift_map_all_representatives<T: Scalar>(
    f: &ManifoldMap<T>,
    source: &Atlas<T>,
    target: &Atlas<T>,
    p: &WeilPoint<T>,
) -> Result<Vec<WeilPoint<T>>, ManifoldError> {
    let x = p.coords.shadow();
    let mut out: Vec<WeilPoint<T>> = Vec::new();
    for alpha in source.charts_containing(p.chart, &x) {
        let q = to_chart(source, p, alpha)?;
        let qx = q.coords.shadow();
        for piece in f.admissible(target, alpha, &qx) {
            let y = WeilPoint::new(target, piece.target, eval_lift(&piece.map, &q.coords)?)?;
            let y = match out.first() {
                Some(first) => to_chart(target, &y, first.chart)?,
                None => y,
            };
            out.push(y);
        }
    }
    if out.is_empty() {
        return Err(ManifoldError::NoRepresentative { map: f.name.clone(), chart: p.chart, point: to_f64(&x) });
    }
    Ok(out)
}

/// A numeric failure of fiberwise additivity of a lifted chart change.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleWitness<T> {
    pub from: usize,
    pub to: usize,
    pub base: Vec<T>,
    /// Fiber vectors `v, w ∈ N ⊗ R^m` as nilpotent coefficient rows.
    pub v: Vec<Vec<T>>,
    pub w: Vec<Vec<T>>,
    /// `‖F(v + w) − F(v) − F(w)‖_∞` for the fiber part `F` of the lift.
    pub defect: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BundleReport<T> {
    /// `true` iff `N² = 0`, i.e. height ≤ 1.
    pub is_vector_bundle: bool,
    pub height: usize,
    pub transitions_checked: usize,
    /// Largest additivity defect seen over all probes.
    pub max_defect: T,
    pub witness: Option<BundleWitness<T>>,
}

// Fiber part of the lifted transition at `x` applied to the nilpotent rows `v`.
fn fiber_map<T: Scalar>(t: &Transition<T>, alg: &Arc<WeilAlgebra<T>>, x: &[T], v: &[Vec<T>]) -> Result<Vec<T>, ManifoldError> {
    let p = LiftedVector::seeded(alg, x, v)?;
    let y = eval_lift(&t.map, &p)?;
    Ok(y.entries().iter().flat_map(|e| e.nilpotent_part().into_coeffs()).collect())
}

/// Decides whether `T_A M → M` is a vector bundle (height ≤ 1) and probes
/// every transition for a fiberwise nonlinearity.
///
/// The probes are deterministic: base points are fixed offsets inside each
/// transition domain, fiber vectors are basis-aligned nilpotents.
pub fn is_vector_bundle<T: Scalar>(atlas: &Atlas<T>, alg: &Arc<WeilAlgebra<T>>) -> Result<BundleReport<T>, ManifoldError> {
    let height = alg.height();
    let nil = alg.nilpotent_basis();
    let m = atlas.dim();
    let probes: Vec<T> = [0.9, -0.6, 1.3, 0.4, -1.7, 2.5].iter().map(|v| T::lit(*v)).collect();
    let mut max_defect = T::zero();
    let mut witness: Option<BundleWitness<T>> = None;
    for t in atlas.transitions() {
        // base points: a few probes, kept if inside the transition domain
        let bases: Vec<Vec<T>> = (0..probes.len())
            .map(|s| (0..m).map(|i| probes[(s + i) % probes.len()]).collect::<Vec<T>>())
            .chain((0..probes.len()).map(|s| (0..m).map(|i| probes[(s + 2 * i) % probes.len()] + T::lit(4.0)).collect()))
            .filter(|x| t.domain.contains(x))
            .collect();
        for x in &bases {
            for (a, na) in nil.iter().enumerate() {
                for nb in &nil[a..] {
                    for i in 0..m {
                        let mut v = vec![vec![T::zero(); alg.dim()]; m];
                        let mut w = v.clone();
                        v[i] = na.clone();
                        w[(i + 1) % m] = nb.clone();
                        let sum: Vec<Vec<T>> = v
                            .iter()
                            .zip(&w)
                            .map(|(p, q)| p.iter().zip(q).map(|(a, b)| *a + *b).collect())
                            .collect();
                        let fv = fiber_map(t, alg, x, &v)?;
                        let fw = fiber_map(t, alg, x, &w)?;
                        let fs = fiber_map(t, alg, x, &sum)?;
                        let defect = fs
                            .iter()
                            .zip(fv.iter().zip(&fw))
                            .fold(T::zero(), |acc, (s, (a, b))| acc.max((*s - *a - *b).abs()));
                        if defect > max_defect {
                            max_defect = defect;
                            if defect > T::lit(1e-7) {
                                witness = Some(BundleWitness { from: t.from, to: t.to, base: x.clone(), v, w, defect });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(BundleReport {
        is_vector_bundle: height <= 1,
        height,
        transitions_checked: atlas.transitions().len(),
        max_defect,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{dual_numbers, jet};
    use crate::scalar::rel_err;

    fn dual() -> Arc<WeilAlgebra<f64>> {
        Arc::new(dual_numbers())
    }

    #[test]
    fn circle_chart_change_shifts_angle_and_keeps_slot() {
        let s1 = circle::<f64>();
        let d = dual();
        let p = WeilPoint::new(&s1, 0, LiftedVector::seeded(&d, &[-1.0], &[vec![0.0, 0.7]]).unwrap()).unwrap();
        let q = to_chart(&s1, &p, 1).unwrap();
        let want = [2.0 * std::f64::consts::PI - 1.0, 0.7];
        assert!(rel_err(q.coords.entries()[0].coeffs(), &want) < 1e-15);
        let back = to_chart(&s1, &q, 0).unwrap();
        assert!(back.coords.rel_err(&p.coords) < 1e-15);
        assert_eq!(to_chart(&s1, &p, 0).unwrap(), p);
    }

    #[test]
    fn stereographic_change_at_one_zero() {
        let s2 = sphere::<f64>();
        let d = dual();
        // tangent slot (a, b) at (1, 0); inversion has Jacobian diag(-1, 1) there
        let p = WeilPoint::new(&s2, 0, LiftedVector::seeded(&d, &[1.0, 0.0], &[vec![0.0, 0.3], vec![0.0, -0.2]]).unwrap())
            .unwrap();
        let q = to_chart(&s2, &p, 1).unwrap();
        assert!(rel_err(&q.coords.flat_coeffs(), &[1.0, -0.3, 0.0, -0.2]) < 1e-15);
    }

    #[test]
    fn projection_of_zero_section() {
        let s1 = circle::<f64>();
        let p = WeilPoint::zero_section(&s1, &dual(), 1, &[2.0]).unwrap();
        assert_eq!(bundle_project(&p), (1, vec![2.0]));
    }

    #[test]
    fn antipodal_map_on_circle() {
        let s1 = circle::<f64>();
        let f = circle_rotation(std::f64::consts::PI);
        let p = WeilPoint::new(&s1, 0, LiftedVector::seeded(&dual(), &[0.5], &[vec![0.0, 1.25]]).unwrap()).unwrap();
        let reps = lift_map_all_representatives(&f, &s1, &s1, &p).unwrap();
        assert!(reps.len() >= 2);
        for r in &reps {
            assert!(r.coords.rel_err(&reps[0].coords) < 1e-14);
        }
        let y = lift_map(&f, &s1, &p).unwrap();
        let base = s1.change_chart(y.chart, 0, &y.coords.shadow()).unwrap()[0];
        assert!((base - (0.5 + std::f64::consts::PI - 2.0 * std::f64::consts::PI)).abs() < 1e-14);
        assert!((y.coords.entries()[0].coeffs()[1] - 1.25).abs() < 1e-15);
    }

    #[test]
    fn identity_lift_is_identity() {
        let s2 = sphere::<f64>();
        let id = ManifoldMap::identity(&s2);
        let p = WeilPoint::new(&s2, 1, LiftedVector::seeded(&dual(), &[0.2, -0.4], &[vec![0.0, 1.0], vec![0.0, 2.0]]).unwrap())
            .unwrap();
        assert_eq!(lift_map(&id, &s2, &p).unwrap(), p);
    }

    #[test]
    fn bundle_criterion() {
        let s2 = sphere::<f64>();
        let d = is_vector_bundle(&s2, &dual()).unwrap();
        assert!(d.is_vector_bundle && d.witness.is_none() && d.max_defect < 1e-12);
        let j2 = is_vector_bundle(&s2, &Arc::new(jet(2))).unwrap();
        assert!(!j2.is_vector_bundle);
        assert!(j2.witness.unwrap().defect > 1e-3);
        let r = is_vector_bundle(&euclidean::<f64>(2), &Arc::new(jet(2))).unwrap();
        assert!(!r.is_vector_bundle && r.witness.is_none() && r.transitions_checked == 0);
    }

    #[test]
    fn outside_chart_rejected() {
        let s1 = circle::<f64>();
        let e = WeilPoint::zero_section(&s1, &dual(), 0, &[4.0]).unwrap_err();
        assert!(matches!(e, ManifoldError::OutsideChart { chart: 0, .. }));
    }
}
