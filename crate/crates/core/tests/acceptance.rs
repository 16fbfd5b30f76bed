//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the verdict lines always reach the
//! terminal. Exits non-zero if any criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weil_core::algebra::{
    exchange_iso, jet, minimal_idempotents, parse_algebra_spec, reals, AlgebraElement, AlgebraHom, AlgebraTable,
    WeilAlgebra,
};
use weil_core::expr::{Binary, ExprGraph, Node, Unary};
use weil_core::lift::{eval_lift, push_hom, recover_algebra, taylor_formula_oracle, lift_graph, LiftedVector};
use weil_core::liegroup::{lifted_exp, Constraint, LiftedLieAlgebraElement};
use weil_core::linalg::Matrix;
use weil_core::manifold::{
    circle, circle_rotation, is_vector_bundle, lift_map, lift_map_all_representatives, sphere, sphere_orthogonal,
    to_chart, Atlas, ManifoldMap, WeilPoint,
};
use weil_core::random::{random_bounded_graph, random_graph, random_lift_at, random_point, random_rotation, GraphShape};
use weil_core::verify::{self, Suite};

type A = Arc<WeilAlgebra<f64>>;

fn alg(spec: &str) -> A {
    Arc::new(parse_algebra_spec(spec).unwrap())
}

/// `‖a − b‖∞ / max(1, ‖a‖∞, ‖b‖∞)`, written out here rather than borrowed.
fn rel(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let d = if diff.is_nan() { f64::INFINITY } else { diff };
    d / 1f64.max(inf(a)).max(inf(b))
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn shape(arity: usize, outputs: usize, depth: usize, polynomial: bool) -> GraphShape {
    GraphShape { arity, outputs, depth, polynomial }
}

// 1 --------------------------------------------------------------------------

fn dual_fd(rng: &mut ChaCha8Rng) -> Outcome {
    let d = alg("dual");
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let depth = rng.gen_range(2..=6);
        let base: Vec<Vec<f64>> = (0..10).map(|_| random_point(rng, n, 1.0)).collect();
        let dirs: Vec<Vec<f64>> = (0..10).map(|_| random_point(rng, n, 1.0)).collect();
        let shift = |x: &[f64], u: &[f64], s: f64| x.iter().zip(u).map(|(a, b)| a + s * b).collect::<Vec<f64>>();
        let probes: Vec<Vec<f64>> = base
            .iter()
            .zip(&dirs)
            .flat_map(|(x, u)| [x.clone(), shift(x, u, h), shift(x, u, -h)])
            .collect();
        let g: ExprGraph<f64> = random_bounded_graph(rng, shape(n, 1, depth, false), &probes, 1e2);
        for (x, u) in base.iter().zip(&dirs) {
            let seeds: Vec<Vec<f64>> = u.iter().map(|c| vec![0.0, *c]).collect();
            let v = LiftedVector::seeded(&d, x, &seeds).unwrap();
            let slot = eval_lift(&g, &v).unwrap().entries()[0].coeffs()[1];
            let fd = (g.eval(&shift(x, u, h)).unwrap()[0] - g.eval(&shift(x, u, -h)).unwrap()[0]) / (2.0 * h);
            worst = worst.max(rel(&[slot], &[fd]));
        }
    }
    outcome(worst < 1e-6, format!("500 points, max rel err {worst:.2e} (tol 1e-6)"))
}

// 2 --------------------------------------------------------------------------

/// Dense univariate polynomial, `c[k]` the coefficient of `t^k`.
#[derive(Clone)]
struct Poly(Vec<f64>);

impl Poly {
    fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly((0..n).map(|k| self.0.get(k).unwrap_or(&0.0) + o.0.get(k).unwrap_or(&0.0)).collect())
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut c = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly(c)
    }

    fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect())
    }

    fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// Expands a univariate polynomial graph symbolically.
fn expand(g: &ExprGraph<f64>) -> Poly {
    let mut vals: Vec<Poly> = Vec::new();
    for node in g.nodes() {
        let p = match *node {
            Node::Input(_) => Poly(vec![0.0, 1.0]),
            Node::Const(c) => Poly(vec![c]),
            Node::Unary(Unary::Neg, a) => Poly(vals[a].0.iter().map(|c| -c).collect()),
            Node::Unary(Unary::PowInt(k), a) => {
                let k = usize::try_from(k).expect("polynomial graphs use non-negative powers");
                (0..k).fold(Poly(vec![1.0]), |acc, _| acc.mul(&vals[a]))
            }
            Node::Binary(Binary::Add, a, b) => vals[a].add(&vals[b]),
            Node::Binary(Binary::Mul, a, b) => vals[a].mul(&vals[b]),
            Node::Unary(op, _) => panic!("{} is not polynomial", op.name()),
        };
        vals.push(p);
    }
    vals[g.outputs()[0]].clone()
}

fn jet_oracle(rng: &mut ChaCha8Rng) -> Outcome {
    let j3 = alg("jet:3");
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let depth = rng.gen_range(2..=5);
        let g: ExprGraph<f64> = random_graph(rng, shape(1, 1, depth, true));
        let lambda: f64 = rng.gen_range(-1.5..1.5);
        let p = expand(&g);
        let mut want = Vec::new();
        let mut q = p.clone();
        let mut fact = 1.0;
        for k in 0..4 {
            if k > 0 {
                fact *= k as f64;
            }
            want.push(q.eval(lambda) / fact);
            q = q.derivative();
        }
        let v = LiftedVector::seeded(&j3, &[lambda], &[vec![0.0, 1.0, 0.0, 0.0]]).unwrap();
        let got = eval_lift(&g, &v).unwrap();
        worst = worst.max(rel(got.entries()[0].coeffs(), &want));
    }
    outcome(worst < 1e-9, format!("50 graphs, max rel err {worst:.2e} (tol 1e-9)"))
}

// 3 --------------------------------------------------------------------------

fn functoriality(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for spec in ["dual", "jet:3", "dual*dual", "jet:2:2"] {
        let a = alg(spec);
        for _ in 0..200 {
            let (n, m, p) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=2));
            let x: Vec<f64> = random_point(rng, n, 1.0);
            let inner: ExprGraph<f64> = random_bounded_graph(rng, shape(n, m, 4, false), std::slice::from_ref(&x), 1e3);
            let y = inner.eval(&x).unwrap();
            let outer: ExprGraph<f64> = random_bounded_graph(rng, shape(m, p, 4, false), &[y], 1e3);
            let v = random_lift_at(rng, &a, &x, 0.5);
            let whole = eval_lift(&outer.compose(&inner).unwrap(), &v).unwrap();
            let staged = eval_lift(&outer, &eval_lift(&inner, &v).unwrap()).unwrap();
            worst = worst.max(rel(&whole.flat_coeffs(), &staged.flat_coeffs()));
        }
    }
    outcome(worst < 1e-9, format!("800 pairs, max rel err {worst:.2e} (tol 1e-9)"))
}

// 4 --------------------------------------------------------------------------

fn formula_equivalence(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for spec in ["dual*dual", "jet:2:2"] {
        let a = alg(spec);
        for _ in 0..100 {
            let n = rng.gen_range(1..=3);
            let depth = rng.gen_range(2..=5);
            let g: ExprGraph<f64> = random_graph(rng, shape(n, 2, depth, true));
            let x: Vec<f64> = random_point(rng, n, 1.5);
            let v = random_lift_at(rng, &a, &x, 1.0);
            let oracle = taylor_formula_oracle(&g, &v).unwrap();
            let lifted = eval_lift(&g, &v).unwrap();
            worst = worst.max(rel(&oracle.flat_coeffs(), &lifted.flat_coeffs()));
        }
    }
    outcome(worst < 1e-9, format!("200 graphs, max rel err {worst:.2e} (tol 1e-9)"))
}

// 5 --------------------------------------------------------------------------

fn naturality(rng: &mut ChaCha8Rng) -> Outcome {
    let specs = ["jet:3", "dual*dual", "jet:2:2", "jet:2*dual"];
    let mut worst = 0.0f64;
    let mut kinds = [0usize; 4];
    for i in 0..20 {
        let kind = i % 4;
        let a = alg(specs[(i / 4) % specs.len()]);
        let phi = match kind {
            0 => AlgebraHom::augmentation(&a),
            1 => AlgebraHom::unit_inclusion(&a),
            2 => {
                let vars = a.monomials().unwrap()[0].len();
                let s: Vec<f64> = (0..vars).map(|_| rng.gen_range(-2.0..2.0)).collect();
                AlgebraHom::generator_scaling(&a, &s).unwrap()
            }
            _ => {
                let (l, r) = match (i / 4) % 2 {
                    0 => (jet(2), parse_algebra_spec("dual").unwrap()),
                    _ => (parse_algebra_spec("dual").unwrap(), parse_algebra_spec("dual").unwrap()),
                };
                exchange_iso(&l, &r).unwrap()
            }
        };
        kinds[kind] += 1;
        for _ in 0..50 {
            let n = rng.gen_range(1..=3);
            let x: Vec<f64> = random_point(rng, n, 1.0);
            let g: ExprGraph<f64> = random_bounded_graph(rng, shape(n, 2, 4, false), std::slice::from_ref(&x), 1e3);
            let v = random_lift_at(rng, phi.source(), &x, 0.5);
            let left = push_hom(&phi, &eval_lift(&g, &v).unwrap()).unwrap();
            let right = eval_lift(&g, &push_hom(&phi, &v).unwrap()).unwrap();
            worst = worst.max(rel(&left.flat_coeffs(), &right.flat_coeffs()));
        }
    }
    outcome(
        worst < 1e-9,
        format!("homs per kind {kinds:?} (aug, incl, scaling, exchange), 50 inputs each, max rel err {worst:.2e} (tol 1e-9)"),
    )
}

// 6 --------------------------------------------------------------------------

fn nesting(rng: &mut ChaCha8Rng) -> Outcome {
    let d = alg("dual");
    let dd = alg("dual*dual");
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let x: Vec<f64> = random_point(rng, n, 1.0);
        let g: ExprGraph<f64> = random_bounded_graph(rng, shape(n, 2, 4, false), std::slice::from_ref(&x), 1e3);
        let v = random_lift_at(rng, &dd, &x, 0.5);
        let flat = eval_lift(&g, &v).unwrap();
        // basis of D⊗D is 1, e⊗1, 1⊗e, e⊗e; coefficient a + 2j belongs to e^a ⊗ e^j
        let rows: Vec<Vec<f64>> = v
            .entries()
            .iter()
            .flat_map(|e| {
                let c = e.coeffs();
                [vec![c[0], c[2]], vec![c[1], c[3]]]
            })
            .collect();
        let inner = LiftedVector::from_coeffs(&d, rows).unwrap();
        let nested = eval_lift(&lift_graph(&g, &d).unwrap(), &inner).unwrap();
        let back: Vec<f64> = nested
            .entries()
            .chunks(2)
            .flat_map(|pair| {
                let (p, q) = (pair[0].coeffs(), pair[1].coeffs());
                [p[0], q[0], p[1], q[1]]
            })
            .collect();
        worst = worst.max(rel(&back, &flat.flat_coeffs()));
    }

    let ex = exchange_iso(&parse_algebra_spec::<f64>("dual").unwrap(), &parse_algebra_spec("dual").unwrap()).unwrap();
    let perm = [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    let matrix_exact = (0..4).all(|r| (0..4).all(|c| ex.matrix()[(r, c)] == perm[r][c]));
    let mut swap_exact = true;
    for _ in 0..20 {
        let x: Vec<f64> = random_point(rng, 2, 1.0);
        let g: ExprGraph<f64> = random_bounded_graph(rng, shape(2, 1, 4, false), std::slice::from_ref(&x), 1e3);
        let v = random_lift_at(rng, &dd, &x, 0.5);
        let direct = eval_lift(&g, &v).unwrap();
        let conj = push_hom(&ex, &eval_lift(&g, &push_hom(&ex, &v).unwrap()).unwrap()).unwrap();
        let (a, b) = (direct.entries()[0].coeffs(), conj.entries()[0].coeffs());
        swap_exact &= a[1] == b[1] && a[2] == b[2];
    }
    outcome(
        worst < 1e-9 && matrix_exact && swap_exact,
        format!(
            "100 graphs, max rel err {worst:.2e} (tol 1e-9); exchange is the slot swap: {matrix_exact}; conjugation exact: {swap_exact}"
        ),
    )
}

// 7 --------------------------------------------------------------------------

/// Rotated block-diagonal sum of `blocks`, built from the raw tables.
fn rotated_sum(blocks: &[&WeilAlgebra<f64>], q: &Matrix<f64>) -> AlgebraTable<f64> {
    let n: usize = blocks.iter().map(|b| b.dim()).sum();
    let mut sc = vec![0.0; n * n * n];
    let mut unit = vec![0.0; n];
    let mut off = 0;
    for b in blocks {
        let t = b.table();
        let d = t.dim;
        for i in 0..d {
            unit[off + i] = t.unit[i];
            for j in 0..d {
                for k in 0..d {
                    sc[((off + i) * n + off + j) * n + off + k] = t.sc[(i * d + j) * d + k];
                }
            }
        }
        off += d;
    }
    // new basis f_a = Σ_i q[i][a] e_i; q is orthogonal so its inverse is qᵀ
    let mul = |x: &[f64], y: &[f64]| {
        let mut z = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let c = x[i] * y[j];
                if c != 0.0 {
                    for k in 0..n {
                        z[k] += c * sc[(i * n + j) * n + k];
                    }
                }
            }
        }
        z
    };
    let col = |a: usize| (0..n).map(|i| q[(i, a)]).collect::<Vec<f64>>();
    let to_new = |z: &[f64]| (0..n).map(|a| (0..n).map(|i| q[(i, a)] * z[i]).sum()).collect::<Vec<f64>>();
    let mut rsc = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            let p = to_new(&mul(&col(a), &col(b)));
            rsc[(a * n + b) * n..(a * n + b + 1) * n].copy_from_slice(&p);
        }
    }
    AlgebraTable::new("rotated sum", n, to_new(&unit), None, rsc).unwrap()
}

fn decomposition(rng: &mut ChaCha8Rng) -> Outcome {
    let pool: [WeilAlgebra<f64>; 3] = [reals(), jet(1), jet(2)];
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let blocks: Vec<&WeilAlgebra<f64>> = loop {
            let k = rng.gen_range(1..=4);
            let b: Vec<&WeilAlgebra<f64>> = (0..k).map(|_| &pool[rng.gen_range(0..3)]).collect();
            if b.iter().map(|x| x.dim()).sum::<usize>() <= 9 {
                break b;
            }
        };
        let n: usize = blocks.iter().map(|b| b.dim()).sum();
        let q: Matrix<f64> = random_rotation(rng, n);
        let t = rotated_sum(&blocks, &q);
        let mut want: Vec<(usize, usize)> = blocks.iter().map(|b| (b.dim(), b.height())).collect();
        want.sort_unstable();
        let dec = match minimal_idempotents(&t) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("trial {trial}: {e}"));
                continue;
            }
        };
        let mut got: Vec<(usize, usize)> = dec.summands.iter().map(|s| (s.dim(), s.height())).collect();
        got.sort_unstable();
        if got != want {
            failures.push(format!("trial {trial}: want {want:?}, got {got:?}"));
        }
        let mut sum = vec![0.0; n];
        for e in &dec.idempotents {
            for (s, c) in sum.iter_mut().zip(&e.coeffs) {
                *s += c;
            }
        }
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        worst = worst.max(diff(&sum, &t.unit));
        for (i, ei) in dec.idempotents.iter().enumerate() {
            for ej in &dec.idempotents[i + 1..] {
                worst = worst.max(diff(&t.mul(&ei.coeffs, &ej.coeffs), &vec![0.0; n]));
            }
        }
    }
    outcome(
        failures.is_empty() && worst < 1e-9,
        match failures.first() {
            Some(f) => format!("{} mismatches, first: {f}", failures.len()),
            None => format!("20 sums, shapes exact, max idempotent residual {worst:.2e} (tol 1e-9)"),
        },
    )
}

// 8 --------------------------------------------------------------------------

fn vector_bundle() -> Outcome {
    let s2 = sphere::<f64>();
    let d = is_vector_bundle(&s2, &alg("dual")).unwrap();
    let j = is_vector_bundle(&s2, &alg("jet:2")).unwrap();
    let defect = j.witness.as_ref().map_or(0.0, |w| w.defect);
    outcome(
        d.is_vector_bundle && d.witness.is_none() && !j.is_vector_bundle && defect > 1e-3,
        format!("D: {}; jet:2: {} with witness defect {defect:.3e}", d.is_vector_bundle, j.is_vector_bundle),
    )
}

// 9 --------------------------------------------------------------------------

fn embed(chart: usize, u: &[f64]) -> [f64; 3] {
    let r = u[0] * u[0] + u[1] * u[1];
    let z = if chart == 0 { (r - 1.0) / (r + 1.0) } else { (1.0 - r) / (r + 1.0) };
    [2.0 * u[0] / (r + 1.0), 2.0 * u[1] / (r + 1.0), z]
}

fn stereo(chart: usize, p: &[f64; 3]) -> [f64; 2] {
    let s = if chart == 0 { 1.0 - p[2] } else { 1.0 + p[2] };
    [p[0] / s, p[1] / s]
}

fn chart_point(rng: &mut ChaCha8Rng, atlas: &Atlas<f64>) -> (usize, Vec<f64>) {
    let chart = rng.gen_range(0..2);
    loop {
        let x: Vec<f64> = if atlas.dim() == 1 {
            let lo = if chart == 0 { -std::f64::consts::PI } else { 0.0 };
            vec![lo + rng.gen_range(0.02..2.0 * std::f64::consts::PI - 0.02)]
        } else {
            vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]
        };
        if atlas.chart(chart).unwrap().domain.contains(&x) && x.iter().map(|v| v * v).sum::<f64>() > 1e-2 {
            return (chart, x);
        }
    }
}

fn wrap_to(chart: usize, angle: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let lo = if chart == 0 { -std::f64::consts::PI } else { 0.0 };
    lo + (angle - lo).rem_euclid(tau)
}

fn gluing(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cocycle = 0.0f64;
    let mut jac = 0.0f64;
    let mut indep = 0.0f64;
    let mut naturality = 0.0f64;
    let d = alg("dual");
    let j2 = alg("jet:2");
    for (atlas, maps) in [
        (circle::<f64>(), (0..4).map(|_| circle_rotation(rng.gen_range(-3.0..3.0))).collect::<Vec<ManifoldMap<f64>>>()),
        (sphere(), (0..4).map(|_| sphere_orthogonal("Q", &random_rotation(rng, 3))).collect()),
    ] {
        for trial in 0..200 {
            let a = if trial % 2 == 0 { &d } else { &j2 };
            let (chart, x) = chart_point(rng, &atlas);
            let p = WeilPoint::new(&atlas, chart, random_lift_at(rng, a, &x, 0.5)).unwrap();
            let charts = atlas.charts_containing(chart, &x);
            for &b in &charts {
                let q = to_chart(&atlas, &p, b).unwrap();
                for &c in &charts {
                    let via = to_chart(&atlas, &q, c).unwrap();
                    let direct = to_chart(&atlas, &p, c).unwrap();
                    cocycle = cocycle.max(rel(&via.coords.flat_coeffs(), &direct.coords.flat_coeffs()));
                }
            }
            // tangent slots against the closed-form Jacobian of the chart change
            if Arc::ptr_eq(a, &d) && charts.len() == 2 {
                let other = 1 - chart;
                let q = to_chart(&atlas, &p, other).unwrap();
                let t: Vec<f64> = p.coords.entries().iter().map(|e| e.coeffs()[1]).collect();
                let want: Vec<f64> = if atlas.dim() == 1 {
                    t.clone()
                } else {
                    let r = x[0] * x[0] + x[1] * x[1];
                    let jm = |i: usize, k: usize| {
                        ((if i == k { r } else { 0.0 }) - 2.0 * x[i] * x[k]) / (r * r)
                    };
                    (0..2).map(|i| jm(i, 0) * t[0] + jm(i, 1) * t[1]).collect()
                };
                let got: Vec<f64> = q.coords.entries().iter().map(|e| e.coeffs()[1]).collect();
                jac = jac.max(rel(&got, &want));
            }

            let f = &maps[trial % maps.len()];
            let reps = lift_map_all_representatives(f, &atlas, &atlas, &p).unwrap();
            for r in &reps[1..] {
                let r = to_chart(&atlas, r, reps[0].chart).unwrap();
                indep = indep.max(rel(&r.coords.flat_coeffs(), &reps[0].coords.flat_coeffs()));
            }

            // shadow of the lift against the real map computed from scratch
            let y = lift_map(f, &atlas, &p).unwrap();
            let ys = y.coords.shadow();
            let real: Vec<f64> = if atlas.dim() == 1 {
                let phi = f.pieces[0].map.eval(&[0.0]).unwrap()[0];
                vec![wrap_to(y.chart, x[0] + phi)]
            } else {
                // recover Q from the images of the basis through chart 0
                let img = |u: [f64; 3]| {
                    let piece = f.pieces.iter().find(|pc| pc.source == 0 && pc.target == 0).unwrap();
                    let v = piece.map.eval(&stereo(0, &u)).unwrap();
                    embed(0, &v)
                };
                let cols = [img([1.0, 0.0, 0.0]), img([0.0, 1.0, 0.0]), img([0.0, 0.0, -1.0])];
                let e = embed(chart, &x);
                let qe = [0, 1, 2].map(|i| cols[0][i] * e[0] + cols[1][i] * e[1] - cols[2][i] * e[2]);
                stereo(y.chart, &qe).to_vec()
            };
            naturality = naturality.max(rel(&ys, &real));
        }
    }
    let ok = cocycle < 1e-9 && jac < 1e-9 && indep < 1e-9 && naturality < 1e-9;
    outcome(
        ok,
        format!(
            "S1 and S2, 200 points each: cocycle {cocycle:.2e}, Jacobian {jac:.2e}, chart independence {indep:.2e}, projection {naturality:.2e} (tol 1e-9)"
        ),
    )
}

// 10 -------------------------------------------------------------------------

fn lie_groups(seed: u64) -> Outcome {
    let report = verify::run(Suite::Liegroup, seed, 100);
    let wanted = ["group-axioms", "projection-hom", "exp-naturality", "bracket-pure-tensor", "semidirect-reassembly"];
    let mut ok = true;
    let mut parts = Vec::new();
    for w in wanted {
        let p = report.property(w).expect("suite reports the property");
        ok &= p.passed() && p.max_residual < 1e-9;
        parts.push(format!("{w} {:.1e}", p.max_residual));
    }

    // SO(2) over D against closed forms: exp((θ + εφ)J) = R(θ) + εφ R'(θ)
    let d = alg("dual");
    let mut so2 = 0.0f64;
    for k in 0..20 {
        let (theta, phi) = (0.3 * f64::from(k) - 2.5, 1.0 - 0.1 * f64::from(k));
        let jm = Matrix::from_row_major(2, 2, vec![0.0, -1.0, 1.0, 0.0]);
        let a = AlgebraElement::new(Arc::clone(&d), vec![theta, phi]).unwrap();
        let x = LiftedLieAlgebraElement::pure_tensor(Constraint::Antisymmetric, &jm, &a).unwrap();
        let m = lifted_exp(&x);
        let (c, s) = (theta.cos(), theta.sin());
        let want = [c, -phi * s, -s, -phi * c, s, phi * c, c, -phi * s];
        so2 = so2.max(rel(&m.flat_coeffs(), &want));
    }
    ok &= so2 < 1e-9;
    parts.push(format!("SO(2) closed form {so2:.1e}"));
    outcome(ok, format!("12 group/algebra pairs x 100 trials: {} (tol 1e-9)", parts.join(", ")))
}

// 11 -------------------------------------------------------------------------

fn recovery() -> Outcome {
    let presets = ["R", "dual", "jet:1", "jet:2", "jet:3", "jet:4", "jet:2:2", "jet:3:2", "jet:2:3", "dual*dual", "jet:2*dual"];
    let mut worst = 0.0f64;
    for p in presets {
        let a = alg(p);
        let t = recover_algebra(&a).unwrap();
        let diff = t.sc.iter().zip(&a.table().sc).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        worst = worst.max(if t.dim == a.dim() { diff } else { f64::INFINITY });
    }
    outcome(worst < 1e-12, format!("{} presets, max structure-constant error {worst:.2e} (tol 1e-12)", presets.len()))
}

fn main() {
    let seed = 20_240_611;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    type Check<'a> = Box<dyn FnMut() -> Outcome + 'a>;
    let mut rng2 = ChaCha8Rng::seed_from_u64(seed + 1);
    let mut rng3 = ChaCha8Rng::seed_from_u64(seed + 2);
    let mut rng4 = ChaCha8Rng::seed_from_u64(seed + 3);
    let mut rng5 = ChaCha8Rng::seed_from_u64(seed + 4);
    let mut rng6 = ChaCha8Rng::seed_from_u64(seed + 5);
    let mut rng7 = ChaCha8Rng::seed_from_u64(seed + 6);
    let mut rng9 = ChaCha8Rng::seed_from_u64(seed + 8);
    let checks: Vec<(&str, Option<Duration>, Check)> = vec![
        ("dual-number derivative oracle", Some(Duration::from_secs(5)), Box::new(|| dual_fd(&mut rng))),
        ("jet:3 symbolic oracle", Some(Duration::from_secs(5)), Box::new(|| jet_oracle(&mut rng2))),
        ("functoriality", Some(Duration::from_secs(30)), Box::new(|| functoriality(&mut rng3))),
        ("step-3 formula equivalence", None, Box::new(|| formula_equivalence(&mut rng4))),
        ("naturality", None, Box::new(|| naturality(&mut rng5))),
        ("tensor/nesting", None, Box::new(|| nesting(&mut rng6))),
        ("idempotent decomposition", Some(Duration::from_secs(10)), Box::new(|| decomposition(&mut rng7))),
        ("vector-bundle criterion", None, Box::new(vector_bundle)),
        ("manifold gluing", None, Box::new(|| gluing(&mut rng9))),
        ("Lie group suite", Some(Duration::from_secs(60)), Box::new(|| lie_groups(seed))),
        ("algebra recovery", None, Box::new(recovery)),
    ];
    let mut failed = 0;
    for (i, (name, budget, mut check)) in checks.into_iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed < b);
        let ok = out.ok && in_time;
        failed += usize::from(!ok);
        let budget = budget.map_or(String::new(), |b| format!(" / {}s budget", b.as_secs()));
        println!(
            "{} {:>2} {name}: {} [{:.2}s{budget}]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
