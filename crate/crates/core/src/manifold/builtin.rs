//! Stock manifolds and maps: `R^m`, the circle with two angle charts, the
//! sphere with two stereographic charts.

use super::{Atlas, Chart, ManifoldMap, MapPiece, Region, Transition};
use crate::expr::{parse_exprs, parse_inequality, ExprGraph, GraphBuilder};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

fn expr<T: Scalar>(text: &str, arity: usize) -> ExprGraph<T> {
    parse_exprs(text, Some(arity)).expect("built-in expression parses")
}

fn region<T: Scalar>(dim: usize, ineqs: &[&str]) -> Region<T> {
    let gs = ineqs
        .iter()
        .map(|s| parse_inequality(s, dim).expect("built-in inequality parses"))
        .collect();
    Region::new(dim, gs).expect("built-in region has the right arity")
}

/// `R^m` with its single identity chart (id 0).
pub fn euclidean<T: Scalar>(m: usize) -> Atlas<T> {
    let chart = Chart { id: 0, dim: m, domain: Region::everything(m) };
    Atlas::new(format!("R^{m}"), vec![chart], Vec::new()).expect("one chart")
}

/// `S¹` with angle charts `(−π, π)` (id 0) and `(0, 2π)` (id 1).
pub fn circle<T: Scalar>() -> Atlas<T> {
    let charts = vec![
        Chart { id: 0, dim: 1, domain: region(1, &["x1 > -pi", "x1 < pi"]) },
        Chart { id: 1, dim: 1, domain: region(1, &["x1 > 0", "x1 < 2*pi"]) },
    ];
    let t = |from, to, dom: &[&str], map: &str| Transition { from, to, domain: region(1, dom), map: expr(map, 1) };
    let transitions = vec![
        t(0, 1, &["x1 > 0", "x1 < pi"], "x1"),
        t(0, 1, &["x1 < 0", "x1 > -pi"], "x1 + 2*pi"),
        t(1, 0, &["x1 > 0", "x1 < pi"], "x1"),
        t(1, 0, &["x1 > pi", "x1 < 2*pi"], "x1 - 2*pi"),
    ];
    Atlas::new("S1", charts, transitions).expect("circle atlas is consistent")
}

/// `S²` with stereographic projections from the north pole (id 0) and the
/// south pole (id 1); the chart change is `u ↦ u/|u|²` both ways.
pub fn sphere<T: Scalar>() -> Atlas<T> {
    let charts = (0..2).map(|id| Chart { id, dim: 2, domain: Region::everything(2) }).collect();
    let t = |from, to| Transition {
        from,
        to,
        domain: region(2, &["x1^2 + x2^2 > 0"]),
        map: expr("x1/(x1^2 + x2^2), x2/(x1^2 + x2^2)", 2),
    };
    Atlas::new("S2", charts, vec![t(0, 1), t(1, 0)]).expect("sphere atlas is consistent")
}

/// Rotation of `S¹` by `phi`, with a representative for every chart pair and
/// every shift by a multiple of `2π` that can land in the target chart.
pub fn circle_rotation<T: Scalar>(phi: T) -> ManifoldMap<T> {
    let atlas = circle::<T>();
    let mut pieces = Vec::new();
    for a in atlas.charts() {
        for b in atlas.charts() {
            for k in -2i32..=2 {
                let shift = phi + T::lit(f64::from(k)) * T::PI() * T::lit(2.0);
                let mut g = GraphBuilder::new(1);
                let x = g.input(0);
                let y = g.add_const(x, shift);
                let map = g.finish(vec![y]).expect("affine map");
                let domain = a.domain.and(&b.domain.pullback(&map).expect("arity 1"));
                pieces.push(MapPiece { source: a.id, target: b.id, domain, map });
            }
        }
    }
    ManifoldMap { name: format!("rot({phi})"), pieces }
}

// Inverse stereographic projection from chart `id`.
fn embed<T: Scalar>(id: usize) -> ExprGraph<T> {
    if id == 0 {
        expr("2*x1/(x1^2 + x2^2 + 1), 2*x2/(x1^2 + x2^2 + 1), (x1^2 + x2^2 - 1)/(x1^2 + x2^2 + 1)", 2)
    } else {
        expr("2*x1/(x1^2 + x2^2 + 1), 2*x2/(x1^2 + x2^2 + 1), (1 - x1^2 - x2^2)/(x1^2 + x2^2 + 1)", 2)
    }
}

fn project<T: Scalar>(id: usize) -> (ExprGraph<T>, Region<T>) {
    if id == 0 {
        (expr("x1/(1 - x3), x2/(1 - x3)", 3), region(3, &["x3 < 1"]))
    } else {
        (expr("x1/(1 + x3), x2/(1 + x3)", 3), region(3, &["x3 > -1"]))
    }
}

fn linear<T: Scalar>(q: &Matrix<T>) -> ExprGraph<T> {
    let mut g = GraphBuilder::new(3);
    let xs: Vec<usize> = (0..3).map(|i| g.input(i)).collect();
    let outs = (0..3)
        .map(|r| {
            let terms: Vec<usize> = (0..3).map(|c| g.scale(xs[c], q[(r, c)])).collect();
            g.sum(&terms)
        })
        .collect();
    g.finish(outs).expect("linear map")
}

/// The inclusion `S² → R³`.
pub fn sphere_embedding<T: Scalar>() -> ManifoldMap<T> {
    let pieces = (0..2)
        .map(|id| MapPiece { source: id, target: 0, domain: Region::everything(2), map: embed(id) })
        .collect();
    ManifoldMap { name: "incl".into(), pieces }
}

/// `x ↦ Qx` restricted to `S²`, for an orthogonal `3×3` matrix `Q`.
pub fn sphere_orthogonal<T: Scalar>(name: &str, q: &Matrix<T>) -> ManifoldMap<T> {
    let lin = linear(q);
    let mut pieces = Vec::new();
    for a in 0..2 {
        let rotated = lin.compose(&embed(a)).expect("3 = 3");
        for b in 0..2 {
            let (proj, valid) = project::<T>(b);
            pieces.push(MapPiece {
                source: a,
                target: b,
                domain: valid.pullback(&rotated).expect("arity 3"),
                map: proj.compose(&rotated).expect("3 = 3"),
            });
        }
    }
    ManifoldMap { name: name.to_string(), pieces }
}

/// The height function `(x, y, z) ↦ z` on `S²`, into `R`.
pub fn sphere_height<T: Scalar>() -> ManifoldMap<T> {
    let z = expr("x3", 3);
    let pieces = (0..2)
        .map(|id| MapPiece {
            source: id,
            target: 0,
            domain: Region::everything(2),
            map: z.compose(&embed(id)).expect("3 = 3"),
        })
        .collect();
    ManifoldMap { name: "height".into(), pieces }
}
