//! Randomized property suites behind `weil verify`.
//!
//! Every suite draws from a ChaCha stream seeded by `seed` (mixed with a
//! per-suite constant), so a report is a pure function of its arguments.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    direct_sum, exchange_iso, jet, minimal_idempotents, parse_algebra_spec, reals, tensor_product, AlgebraElement,
    AlgebraHom, WeilAlgebra,
};
use crate::expr::ExprGraph;
use crate::liegroup::{
    group_inv, group_mul, lifted_bracket, lifted_exp, project, push_hom_lie, push_hom_matrix, real_bracket,
    semidirect_check, zero_section, Constraint, GroupKind, LiftedLieAlgebraElement, LiftedMatrix,
};
use crate::lift::{eval_lift, lift_graph, nest_coeffs, push_hom, taylor_formula_oracle, taylor_formula_oracle_with_basis, unnest_coeffs, LiftedVector};
use crate::linalg::Matrix;
use crate::manifold::{
    bundle_project, circle, circle_rotation, euclidean, is_vector_bundle, lift_map, lift_map_all_representatives,
    sphere, sphere_embedding, sphere_height, sphere_orthogonal, to_chart, Atlas, ManifoldMap, WeilPoint,
};
use crate::random::{
    random_bounded_graph, random_element, random_graph, random_group_element, random_hom, random_invertible,
    random_lie_element, random_lift_at, random_nilpotent, random_point, random_rotation, GraphShape,
};
use crate::scalar::{abs_err, rel_err};

type A = Arc<WeilAlgebra<f64>>;

/// Algebras the algebra and lift suites sweep over.
pub const SUITE_ALGEBRAS: [&str; 4] = ["dual", "jet:3", "dual*dual", "jet:2:2"];

/// Outcome of one property over all its trials.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub name: String,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    /// First failing trial, if any.
    pub counterexample: Option<String>,
}

impl PropertyReport {
    fn new(name: &str, tolerance: f64) -> Self {
        PropertyReport { name: name.into(), trials: 0, max_residual: 0.0, tolerance, counterexample: None }
    }

    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn record(&mut self, residual: f64, context: impl FnOnce() -> String) {
        self.trials += 1;
        // NaN counts as a failure
        if !(residual <= self.max_residual) {
            self.max_residual = if residual.is_nan() { f64::INFINITY } else { residual };
        }
        if !(residual <= self.tolerance) && self.counterexample.is_none() {
            self.counterexample = Some(format!("{} (residual {residual:.3e})", context()));
        }
    }

    fn record_result<E: fmt::Display>(&mut self, r: Result<f64, E>, context: impl FnOnce() -> String) {
        match r {
            Ok(v) => self.record(v, context),
            Err(e) => {
                let ctx = context();
                self.record(f64::INFINITY, || format!("{ctx}: {e}"));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyReport::passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.name == name)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "suite {} seed {} trials {}: {verdict}", self.suite, self.seed, self.trials)?;
        for p in &self.properties {
            writeln!(
                f,
                "  {} {:<28} checks {:>6}  max residual {:.3e}  tol {:.0e}",
                if p.passed() { "ok  " } else { "FAIL" },
                p.name,
                p.trials,
                p.max_residual,
                p.tolerance
            )?;
            if let Some(c) = &p.counterexample {
                writeln!(f, "       counterexample: {c}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Lift,
    Manifold,
    Liegroup,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Algebra, Suite::Lift, Suite::Manifold, Suite::Liegroup];

    fn salt(self) -> u64 {
        match self {
            Suite::Algebra => 0x2545_f491_4f6c_dd1d,
            Suite::Lift => 0x9e37_79b9_7f4a_7c15,
            Suite::Manifold => 0xc2b2_ae3d_27d4_eb4f,
            Suite::Liegroup => 0x1656_67b1_9e37_79f9,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Algebra => "algebra",
            Suite::Lift => "lift",
            Suite::Manifold => "manifold",
            Suite::Liegroup => "liegroup",
        })
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown suite `{0}` (expected algebra, lift, manifold, liegroup or all)")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.to_string() == s).ok_or_else(|| UnknownSuite(s.into()))
    }
}

/// Suites named by `name`: one of the four, or `all`.
pub fn select(name: &str) -> Result<Vec<Suite>, UnknownSuite> {
    if name == "all" {
        Ok(Suite::ALL.to_vec())
    } else {
        Ok(vec![name.parse()?])
    }
}

pub fn run(suite: Suite, seed: u64, trials: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ suite.salt());
    let properties = match suite {
        Suite::Algebra => algebra_suite(&mut rng, trials),
        Suite::Lift => lift_suite(&mut rng, trials),
        Suite::Manifold => manifold_suite(&mut rng, trials),
        Suite::Liegroup => liegroup_suite(&mut rng, trials),
    };
    SuiteReport { suite, seed, trials, properties }
}

/// Runs every suite selected by `name`.
pub fn run_named(name: &str, seed: u64, trials: usize) -> Result<Vec<SuiteReport>, UnknownSuite> {
    Ok(select(name)?.into_iter().map(|s| run(s, seed, trials)).collect())
}

fn preset(spec: &str) -> A {
    Arc::new(parse_algebra_spec(spec).expect("preset algebra"))
}

fn coeff_diff(a: &AlgebraElement<f64>, b: &AlgebraElement<f64>) -> f64 {
    abs_err(a.coeffs(), b.coeffs())
}

// ---------------------------------------------------------------- algebra

fn algebra_suite(rng: &mut ChaCha8Rng, trials: usize) -> Vec<PropertyReport> {
    let mut assoc = PropertyReport::new("associativity", 1e-12);
    let mut comm = PropertyReport::new("commutativity", 1e-12);
    let mut unit = PropertyReport::new("unit", 1e-12);
    let mut aug = PropertyReport::new("augmentation-hom", 1e-12);
    let mut inv = PropertyReport::new("inverse", 1e-9);
    let mut rebase = PropertyReport::new("rebasing-invariance", 0.0);
    let mut tensor = PropertyReport::new("tensor-validates", 0.0);
    let mut dec = PropertyReport::new("decomposition", 1e-9);

    let algs: Vec<A> = SUITE_ALGEBRAS.iter().map(|s| preset(s)).collect();
    for t in 0..trials {
        for alg in &algs {
            let name = alg.name().to_string();
            let (a, b, c) = (random_element(rng, alg, 1.0), random_element(rng, alg, 1.0), random_element(rng, alg, 1.0));
            let m = |x: &AlgebraElement<f64>, y: &AlgebraElement<f64>| x.try_mul(y).expect("same algebra");
            assoc.record(coeff_diff(&m(&m(&a, &b), &c), &m(&a, &m(&b, &c))), || format!("{name}, trial {t}"));
            comm.record(coeff_diff(&m(&a, &b), &m(&b, &a)), || format!("{name}, trial {t}"));
            unit.record(coeff_diff(&m(&AlgebraElement::one(alg), &a), &a), || format!("{name}, trial {t}"));
            aug.record((m(&a, &b).augmentation() - a.augmentation() * b.augmentation()).abs(), || {
                format!("{name}, trial {t}")
            });

            let shift = rng.gen_range(0.5..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let x = random_nilpotent(rng, alg, 1.0).add_scalar(shift);
            inv.record_result(
                x.try_invert().map(|y| coeff_diff(&m(&x, &y), &AlgebraElement::one(alg))),
                || format!("{name}, aug {shift:.3}, trial {t}"),
            );

            let p: Matrix<f64> = random_invertible(rng, alg.dim());
            let res = alg
                .table()
                .change_basis(&p)
                .and_then(WeilAlgebra::from_table)
                .map(|r| if r.dim() == alg.dim() && r.height() == alg.height() { 0.0 } else { 1.0 });
            rebase.record_result(res, || format!("{name}, trial {t}"));
        }

        let pick = |rng: &mut ChaCha8Rng| algs[rng.gen_range(0..2)].clone();
        let (l, r) = (pick(rng), pick(rng));
        let res = tensor_product(&l, &r).and_then(|ab| {
            exchange_iso(&l, &r)?;
            Ok(if ab.validate().passed() { 0.0 } else { 1.0 })
        });
        tensor.record_result(res, || format!("{} * {}, trial {t}", l.name(), r.name()));

        decomposition_trial(rng, &mut dec, t);
    }
    vec![assoc, comm, unit, aug, inv, rebase, tensor, dec]
}

/// One randomly rotated direct sum of copies of `R`, `D` and `jet:2`.
/// Returns the expected sorted `(dim, height)` list and the rotated table.
pub fn random_direct_sum(rng: &mut impl Rng, max_dim: usize) -> (Vec<(usize, usize)>, crate::algebra::AlgebraTable<f64>) {
    let blocks: [WeilAlgebra<f64>; 3] = [reals(), jet(1), jet(2)];
    loop {
        let k = rng.gen_range(1..=4);
        let parts: Vec<&WeilAlgebra<f64>> = (0..k).map(|_| &blocks[rng.gen_range(0..3)]).collect();
        let dim: usize = parts.iter().map(|p| p.dim()).sum();
        if dim > max_dim {
            continue;
        }
        let mut shape: Vec<(usize, usize)> = parts.iter().map(|p| (p.dim(), p.height())).collect();
        shape.sort_unstable();
        let tables: Vec<_> = parts.iter().map(|p| p.table()).collect();
        let p: Matrix<f64> = random_rotation(rng, dim);
        let rotated = direct_sum(&tables).change_basis(&p).expect("rotation is invertible");
        return (shape, rotated);
    }
}

fn decomposition_trial(rng: &mut ChaCha8Rng, dec: &mut PropertyReport, t: usize) {
    let (shape, table) = random_direct_sum(rng, 9);
    let res = minimal_idempotents(&table).map(|d| {
        let mut got: Vec<(usize, usize)> = d.summands.iter().map(|s| (s.dim(), s.height())).collect();
        got.sort_unstable();
        if got != shape {
            return f64::INFINITY;
        }
        let n = table.dim;
        let mut sum = vec![0.0; n];
        for e in &d.idempotents {
            for (s, c) in sum.iter_mut().zip(&e.coeffs) {
                *s += c;
            }
        }
        let mut worst = abs_err(&sum, &table.unit);
        for (i, ei) in d.idempotents.iter().enumerate() {
            for (j, ej) in d.idempotents.iter().enumerate() {
                let p = table.mul(&ei.coeffs, &ej.coeffs);
                let want = if i == j { ei.coeffs.clone() } else { vec![0.0; n] };
                worst = worst.max(abs_err(&p, &want));
            }
        }
        worst
    });
    dec.record_result(res, || format!("blocks {shape:?}, trial {t}"));
}

// ---------------------------------------------------------------- lift

fn shape(arity: usize, outputs: usize, depth: usize, polynomial: bool) -> GraphShape {
    GraphShape { arity, outputs, depth, polynomial }
}

fn lift_suite(rng: &mut ChaCha8Rng, trials: usize) -> Vec<PropertyReport> {
    let mut func = PropertyReport::new("functoriality", 1e-9);
    let mut shadow = PropertyReport::new("shadow-commutation", 1e-12);
    let mut product = PropertyReport::new("product-preservation", 0.0);
    let mut natural = PropertyReport::new("naturality", 1e-9);
    let mut basis = PropertyReport::new("basis-independence", 1e-9);
    let mut formula = PropertyReport::new("formula-equivalence", 1e-9);
    let mut dual_fd = PropertyReport::new("dual-finite-differences", 1e-6);
    let mut jet_fd = PropertyReport::new("jet-finite-differences", 1e-4);
    let mut nested = PropertyReport::new("nested-flattening", 1e-9);

    let algs: Vec<A> = SUITE_ALGEBRAS.iter().map(|s| preset(s)).collect();
    let dual = preset("dual");
    let jet3 = preset("jet:3");
    let dd = preset("dual*dual");

    for t in 0..trials {
        for alg in &algs {
            let name = alg.name().to_string();
            let (n, m, p) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=2));
            let x: Vec<f64> = random_point(rng, n, 1.0);
            let inner: ExprGraph<f64> = random_bounded_graph(rng, shape(n, m, 4, false), std::slice::from_ref(&x), 1e3);
            let y = inner.eval(&x).expect("bounded");
            let outer: ExprGraph<f64> = random_bounded_graph(rng, shape(m, p, 4, false), &[y], 1e3);
            let v = random_lift_at(rng, alg, &x, 0.5);
            let ctx = || format!("{name}, trial {t}, inner {inner}, outer {outer}");

            let res = (|| {
                let whole = eval_lift(&outer.compose(&inner)?, &v)?;
                let staged = eval_lift(&outer, &eval_lift(&inner, &v)?)?;
                Ok::<_, crate::lift::LiftError>(whole.rel_err(&staged))
            })();
            func.record_result(res, ctx);

            let res = eval_lift(&inner, &v).map(|w| rel_err(&w.shadow(), &inner.eval(&x).expect("bounded")));
            shadow.record_result(res, ctx);

            let other: ExprGraph<f64> = random_graph(rng, shape(n, 2, 3, false));
            let res = (|| {
                let paired = eval_lift(&inner.pair(&other)?, &v)?;
                let mut separate = eval_lift(&inner, &v)?.into_entries();
                separate.extend(eval_lift(&other, &v)?.into_entries());
                Ok::<_, crate::lift::LiftError>(if paired.entries() == separate.as_slice() { 0.0 } else { 1.0 })
            })();
            product.record_result(res, ctx);

            let phi = random_hom(rng, alg);
            let u = random_lift_at(rng, phi.source(), &x, 0.5);
            let res = (|| {
                let left = push_hom(&phi, &eval_lift(&inner, &u)?)?;
                let right = eval_lift(&inner, &push_hom(&phi, &u)?)?;
                Ok::<_, crate::lift::LiftError>(left.rel_err(&right))
            })();
            natural.record_result(res, || format!("{name}, hom {} -> {}, trial {t}", phi.source().name(), phi.target().name()));

            let poly: ExprGraph<f64> = random_graph(rng, shape(n, m, 4, true));
            let res = (|| {
                let nil = alg.nilpotent_basis();
                let q: Matrix<f64> = random_invertible(rng, nil.len());
                let other_basis: Vec<Vec<f64>> = (0..nil.len())
                    .map(|j| (0..alg.dim()).map(|k| (0..nil.len()).map(|i| nil[i][k] * q[(i, j)]).sum()).collect())
                    .collect();
                let a = taylor_formula_oracle_with_basis(&poly, &v, &nil)?;
                let b = taylor_formula_oracle_with_basis(&poly, &v, &other_basis)?;
                Ok::<_, crate::lift::LiftError>(a.rel_err(&b))
            })();
            basis.record_result(res, || format!("{name}, trial {t}, graph {poly}"));

            let res = (|| {
                let a = taylor_formula_oracle(&poly, &v)?;
                Ok::<_, crate::lift::LiftError>(a.rel_err(&eval_lift(&poly, &v)?))
            })();
            formula.record_result(res, || format!("{name}, trial {t}, graph {poly}"));
        }

        dual_fd_trial(rng, &dual, &mut dual_fd, t);
        jet_fd_trial(rng, &jet3, &mut jet_fd, t);
        nested_trial(rng, &dd, &mut nested, t);
    }
    vec![func, shadow, product, natural, basis, formula, dual_fd, jet_fd, nested]
}

fn dual_fd_trial(rng: &mut ChaCha8Rng, dual: &A, rep: &mut PropertyReport, t: usize) {
    let n = rng.gen_range(1..=3);
    let x: Vec<f64> = random_point(rng, n, 1.0);
    let dir: Vec<f64> = random_point(rng, n, 1.0);
    let h = 1e-5;
    let shifted = |s: f64| x.iter().zip(&dir).map(|(a, d)| a + s * d).collect::<Vec<f64>>();
    let g: ExprGraph<f64> = random_bounded_graph(rng, shape(n, 1, 5, false), &[x.clone(), shifted(h), shifted(-h)], 1e2);
    let seeds: Vec<Vec<f64>> = dir.iter().map(|d| vec![0.0, *d]).collect();
    let res = (|| {
        let v = LiftedVector::seeded(dual, &x, &seeds)?;
        let slot = eval_lift(&g, &v)?.entries()[0].coeffs()[1];
        let fd = (g.eval(&shifted(h))?[0] - g.eval(&shifted(-h))?[0]) / (2.0 * h);
        Ok::<_, crate::lift::LiftError>(rel_err(&[slot], &[fd]))
    })();
    rep.record_result(res, || format!("trial {t}, graph {g}, at {x:?}"));
}

/// `g^{(k)}(x)` for `k = 1, 2, 3` from central differences, the higher two
/// Richardson-extrapolated from steps `h` and `h/2`.
pub fn finite_derivatives(f: impl Fn(f64) -> f64, x: f64) -> [f64; 3] {
    let h1 = 1e-5;
    let d1 = (f(x + h1) - f(x - h1)) / (2.0 * h1);
    let second = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    let third = |h: f64| (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h);
    let richardson = |d: &dyn Fn(f64) -> f64, h: f64| (4.0 * d(h / 2.0) - d(h)) / 3.0;
    [d1, richardson(&second, 2e-3), richardson(&third, 4e-3)]
}

fn jet_fd_trial(rng: &mut ChaCha8Rng, jet3: &A, rep: &mut PropertyReport, t: usize) {
    let x: f64 = random_point(rng, 1, 1.0)[0];
    let probe: Vec<Vec<f64>> = (-8..=8).map(|k| vec![x + 1e-3 * f64::from(k)]).collect();
    let g: ExprGraph<f64> = random_bounded_graph(rng, shape(1, 1, 4, false), &probe, 1e2);
    let res = (|| {
        let mut seed = vec![0.0; jet3.dim()];
        seed[1] = 1.0;
        let v = LiftedVector::seeded(jet3, &[x], &[seed])?;
        let got = eval_lift(&g, &v)?.entries()[0].coeffs().to_vec();
        let f = |s: f64| g.eval(&[s]).map(|y| y[0]).unwrap_or(f64::NAN);
        let d = finite_derivatives(f, x);
        let want = [f(x), d[0], d[1] / 2.0, d[2] / 6.0];
        Ok::<_, crate::lift::LiftError>(rel_err(&got, &want))
    })();
    rep.record_result(res, || format!("trial {t}, graph {g}, at {x}"));
}

fn nested_trial(rng: &mut ChaCha8Rng, dd: &A, rep: &mut PropertyReport, t: usize) {
    let d = preset("dual");
    let n = rng.gen_range(1..=3);
    let x: Vec<f64> = random_point(rng, n, 1.0);
    let g: ExprGraph<f64> = random_bounded_graph(rng, shape(n, 2, 4, false), std::slice::from_ref(&x), 1e3);
    let v = random_lift_at(rng, dd, &x, 0.5);
    let res = (|| {
        let flat = eval_lift(&g, &v)?;
        let inner = lift_graph(&g, &d)?;
        let nested = eval_lift(&inner, &nest_coeffs(&v, d.dim(), &d)?)?;
        Ok::<_, crate::lift::LiftError>(unnest_coeffs(&nested, d.dim(), dd)?.rel_err(&flat))
    })();
    rep.record_result(res, || format!("trial {t}, graph {g}"));
}

// ---------------------------------------------------------------- manifold

/// A uniform point of chart `chart` at least `margin` inside its domain,
/// drawn from the box `[-r, r]^m`.
pub fn random_chart_point(rng: &mut impl Rng, atlas: &Atlas<f64>, chart: usize, r: f64, margin: f64) -> Vec<f64> {
    let c = atlas.chart(chart).expect("chart exists");
    loop {
        let x: Vec<f64> = (0..c.dim).map(|_| rng.gen_range(-r..r) + if chart == 1 && c.dim == 1 { r } else { 0.0 }).collect();
        if c.domain.margin(&x).is_none_or(|m| m > margin) && x.iter().map(|v| v * v).sum::<f64>() > margin * margin {
            return x;
        }
    }
}

fn random_weil_point(rng: &mut ChaCha8Rng, atlas: &Atlas<f64>, alg: &A) -> WeilPoint<f64> {
    let chart = atlas.charts()[rng.gen_range(0..atlas.charts().len())].id;
    let r = if atlas.dim() == 1 { std::f64::consts::PI } else { 3.0 };
    let x = random_chart_point(rng, atlas, chart, r, 0.05);
    WeilPoint::new(atlas, chart, random_lift_at(rng, alg, &x, 0.5)).expect("inside chart")
}

struct MapCase {
    name: &'static str,
    source: Atlas<f64>,
    target: Atlas<f64>,
    map: ManifoldMap<f64>,
}

fn map_cases(rng: &mut ChaCha8Rng) -> Vec<MapCase> {
    let phi = rng.gen_range(-3.0..3.0);
    let q: Matrix<f64> = random_rotation(rng, 3);
    vec![
        MapCase { name: "S1 rotation", source: circle(), target: circle(), map: circle_rotation(phi) },
        MapCase { name: "S2 rotation", source: sphere(), target: sphere(), map: sphere_orthogonal("Q", &q) },
        MapCase { name: "S2 -> R3", source: sphere(), target: euclidean(3), map: sphere_embedding() },
        MapCase { name: "S2 height", source: sphere(), target: euclidean(1), map: sphere_height() },
    ]
}

fn point_err(target: &Atlas<f64>, a: &WeilPoint<f64>, b: &WeilPoint<f64>) -> Result<f64, crate::manifold::ManifoldError> {
    let b = to_chart(target, b, a.chart)?;
    Ok(a.coords.rel_err(&b.coords))
}

fn manifold_suite(rng: &mut ChaCha8Rng, trials: usize) -> Vec<PropertyReport> {
    let mut cover = PropertyReport::new("open-cover", 0.0);
    let mut cocycle = PropertyReport::new("cocycle", 1e-9);
    let mut indep = PropertyReport::new("chart-independence", 1e-9);
    let mut proj = PropertyReport::new("projection-naturality", 1e-9);
    let mut func = PropertyReport::new("functoriality", 1e-9);
    let mut bundle = PropertyReport::new("vector-bundle-criterion", 0.0);

    let algs = [preset("dual"), preset("jet:2")];
    let atlases = [circle::<f64>(), sphere()];
    for t in 0..trials {
        for alg in &algs {
            for atlas in &atlases {
                let p = random_weil_point(rng, atlas, alg);
                let ctx = || format!("{} over {}, chart {}, at {:?}, trial {t}", atlas.name, alg.name(), p.chart, p.coords.shadow());
                let x = p.coords.shadow();
                let containing = atlas.charts_containing(p.chart, &x);
                cover.record(if containing.is_empty() { 1.0 } else { 0.0 }, ctx);

                let res = (|| {
                    let mut worst: f64 = 0.0;
                    for &b in &containing {
                        let q = to_chart(atlas, &p, b)?;
                        for &c in &containing {
                            let via = to_chart(atlas, &q, c)?;
                            let direct = to_chart(atlas, &p, c)?;
                            worst = worst.max(via.coords.rel_err(&direct.coords));
                        }
                    }
                    Ok::<_, crate::manifold::ManifoldError>(worst)
                })();
                cocycle.record_result(res, ctx);
            }
        }

        for case in map_cases(rng) {
            let alg = &algs[rng.gen_range(0..algs.len())];
            let p = random_weil_point(rng, &case.source, alg);
            let ctx = || format!("{} over {}, chart {}, at {:?}, trial {t}", case.name, alg.name(), p.chart, p.coords.shadow());

            let res = lift_map_all_representatives(&case.map, &case.source, &case.target, &p).and_then(|reps| {
                let mut worst: f64 = 0.0;
                for r in &reps[1..] {
                    worst = worst.max(point_err(&case.target, &reps[0], r)?);
                }
                Ok(worst)
            });
            indep.record_result(res, ctx);

            let res = (|| {
                let x = p.coords.shadow();
                let (chart, lifted_base) = bundle_project(&lift_map(&case.map, &case.target, &p)?);
                let mut worst: f64 = 0.0;
                for piece in case.map.admissible(&case.target, p.chart, &x) {
                    let y = piece.map.eval(&x)?;
                    let y = case.target.change_chart(piece.target, chart, &y)?;
                    worst = worst.max(rel_err(&y, &lifted_base));
                }
                Ok::<_, crate::manifold::ManifoldError>(worst)
            })();
            proj.record_result(res, ctx);
        }

        // composable pairs on the circle and the sphere
        let psi = rng.gen_range(-3.0..3.0);
        let chi = rng.gen_range(-3.0..3.0);
        let (q1, q2): (Matrix<f64>, Matrix<f64>) = (random_rotation(rng, 3), random_rotation(rng, 3));
        let pairs = [
            (circle(), circle(), circle_rotation(psi), circle_rotation(chi)),
            (sphere(), sphere(), sphere_orthogonal("Q1", &q1), sphere_orthogonal("Q2", &q2)),
            (sphere(), euclidean(3), sphere_orthogonal("Q1", &q1), sphere_embedding()),
        ];
        for (src, tgt, f, g) in &pairs {
            let alg = &algs[rng.gen_range(0..algs.len())];
            let p = random_weil_point(rng, src, alg);
            let res = (|| {
                let gf = f.then(g)?;
                let whole = lift_map(&gf, tgt, &p)?;
                let staged = lift_map(g, tgt, &lift_map(f, src, &p)?)?;
                point_err(tgt, &whole, &staged)
            })();
            func.record_result(res, || format!("{} then {} over {}, trial {t}", f.name, g.name, alg.name()));
        }
    }

    // the criterion is deterministic; check it once
    let s2 = sphere::<f64>();
    let res = (|| {
        let d = is_vector_bundle(&s2, &preset("dual"))?;
        let j = is_vector_bundle(&s2, &preset("jet:2"))?;
        let witnessed = j.witness.as_ref().is_some_and(|w| w.defect > 1e-3);
        Ok::<_, crate::manifold::ManifoldError>(if d.is_vector_bundle && !j.is_vector_bundle && witnessed { 0.0 } else { 1.0 })
    })();
    bundle.record_result(res, || "S2 with dual and jet:2".into());

    vec![cover, cocycle, indep, proj, func, bundle]
}

// ---------------------------------------------------------------- liegroup

/// The group/algebra grid swept by the liegroup suite.
pub const LIE_CASES: [(GroupKind, usize); 4] =
    [(GroupKind::SO, 2), (GroupKind::SO, 3), (GroupKind::GL, 2), (GroupKind::Unipotent, 3)];
pub const LIE_ALGEBRAS: [&str; 3] = ["dual", "jet:2", "dual*dual"];

fn real_lie_element(rng: &mut ChaCha8Rng, constraint: Constraint, n: usize) -> Matrix<f64> {
    let r = Arc::new(reals());
    random_lie_element(rng, constraint, &r, n, 1.0).shadow()
}

fn real_exp(constraint: Constraint, x: &Matrix<f64>) -> Result<Matrix<f64>, crate::liegroup::LieError> {
    let r = Arc::new(reals());
    let l = LiftedLieAlgebraElement::pure_tensor(constraint, x, &AlgebraElement::one(&r))?;
    Ok(lifted_exp(&l).shadow())
}

fn liegroup_suite(rng: &mut ChaCha8Rng, trials: usize) -> Vec<PropertyReport> {
    use crate::liegroup::LieError;
    let mut axioms = PropertyReport::new("group-axioms", 1e-9);
    let mut proj = PropertyReport::new("projection-hom", 1e-12);
    let mut zero = PropertyReport::new("zero-section-hom", 1e-12);
    let mut exp_nat = PropertyReport::new("exp-naturality", 1e-9);
    let mut bracket = PropertyReport::new("bracket-pure-tensor", 1e-9);
    let mut jacobi = PropertyReport::new("jacobi", 1e-9);
    let mut semi = PropertyReport::new("semidirect-reassembly", 1e-9);
    let mut exp_fd = PropertyReport::new("exp-first-order", 1e-6);

    let algs: Vec<A> = LIE_ALGEBRAS.iter().map(|s| preset(s)).collect();
    for t in 0..trials {
        for alg in &algs {
            for &(kind, n) in &LIE_CASES {
                let cons = kind.constraint();
                let ctx = || format!("{kind}({n}) over {}, trial {t}", alg.name());
                let m = random_group_element(rng, kind, alg, n);
                let k = random_group_element(rng, kind, alg, n);
                let l = random_group_element(rng, kind, alg, n);

                let res = (|| {
                    let left = group_mul(&group_mul(&m, &k)?, &l)?;
                    let right = group_mul(&m, &group_mul(&k, &l)?)?;
                    let id = LiftedMatrix::identity(kind, alg, n);
                    let unit = group_mul(&id, &m)?.rel_err(&m).max(group_mul(&m, &id)?.rel_err(&m));
                    let mi = group_inv(&m)?;
                    let inverse = group_mul(&m, &mi)?.rel_err(&id).max(group_mul(&mi, &m)?.rel_err(&id));
                    Ok::<_, LieError>(left.rel_err(&right).max(unit).max(inverse))
                })();
                axioms.record_result(res, ctx);

                let res = group_mul(&m, &k).map(|mk| {
                    rel_err(project(&mk).as_slice(), project(&m).matmul(&project(&k)).as_slice())
                });
                proj.record_result(res, ctx);

                let res = (|| {
                    let (g, h) = (project(&m), project(&k));
                    let whole = zero_section(kind, alg, &g.matmul(&h))?;
                    let staged = group_mul(&zero_section(kind, alg, &g)?, &zero_section(kind, alg, &h)?)?;
                    let split = rel_err(project(&whole).as_slice(), g.matmul(&h).as_slice());
                    Ok::<_, LieError>(whole.rel_err(&staged).max(split))
                })();
                zero.record_result(res, ctx);

                let x = random_lie_element(rng, cons, alg, n, 0.7);
                let phi: AlgebraHom<f64> = random_hom(rng, alg);
                let res = (|| {
                    let x = if Arc::ptr_eq(phi.source(), alg) || **phi.source() == **alg {
                        x.clone()
                    } else {
                        random_lie_element(rng, cons, phi.source(), n, 0.7)
                    };
                    let left = push_hom_matrix(&phi, &lifted_exp(&x))?;
                    let right = lifted_exp(&push_hom_lie(&phi, &x)?);
                    Ok::<_, LieError>(left.rel_err(&right))
                })();
                exp_nat.record_result(res, || format!("{}, hom {} -> {}", ctx(), phi.source().name(), phi.target().name()));

                let (xr, yr) = (real_lie_element(rng, cons, n), real_lie_element(rng, cons, n));
                let (a, b) = (random_element(rng, alg, 1.0), random_element(rng, alg, 1.0));
                let res = (|| {
                    let lhs = lifted_bracket(
                        &LiftedLieAlgebraElement::pure_tensor(cons, &xr, &a)?,
                        &LiftedLieAlgebraElement::pure_tensor(cons, &yr, &b)?,
                    )?;
                    let rhs = LiftedLieAlgebraElement::pure_tensor(cons, &real_bracket(&xr, &yr), &a.try_mul(&b)?)?;
                    Ok::<_, LieError>(rel_err(&lhs.flat_coeffs(), &rhs.flat_coeffs()))
                })();
                bracket.record_result(res, ctx);

                let y = random_lie_element(rng, cons, alg, n, 1.0);
                let z = random_lie_element(rng, cons, alg, n, 1.0);
                let res = (|| {
                    let cyc = |p: &LiftedLieAlgebraElement<f64>, q: &LiftedLieAlgebraElement<f64>, r: &LiftedLieAlgebraElement<f64>| {
                        lifted_bracket(p, &lifted_bracket(q, r)?)
                    };
                    let sum = cyc(&x, &y, &z)?.add(&cyc(&y, &z, &x)?)?.add(&cyc(&z, &x, &y)?)?;
                    let zero = LiftedLieAlgebraElement::zero(cons, alg, n);
                    Ok::<_, LieError>(sum.rel_err(&zero))
                })();
                jacobi.record_result(res, ctx);

                let res = semidirect_check(&m).map(|r| r.residual.max(r.fiber_offset));
                semi.record_result(res, ctx);

                if alg.name() == "dual" {
                    let (x0, x1) = (real_lie_element(rng, cons, n), real_lie_element(rng, cons, n));
                    let res = (|| {
                        let d = alg;
                        let entries = x0
                            .as_slice()
                            .iter()
                            .zip(x1.as_slice())
                            .map(|(p, q)| AlgebraElement::new(Arc::clone(d), vec![*p, *q]))
                            .collect::<Result<Vec<_>, _>>()?;
                        let lifted = lifted_exp(&LiftedLieAlgebraElement::new(cons, d, n, entries)?);
                        let slot: Vec<f64> = lifted.entries().iter().map(|e| e.coeffs()[1]).collect();
                        let h = 1e-5;
                        let at = |s: f64| Matrix::from_fn(n, n, |r, c| x0[(r, c)] + s * x1[(r, c)]);
                        let (p, q) = (real_exp(cons, &at(h))?, real_exp(cons, &at(-h))?);
                        let fd: Vec<f64> = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| (a - b) / (2.0 * h)).collect();
                        Ok::<_, LieError>(rel_err(&slot, &fd))
                    })();
                    exp_fd.record_result(res, ctx);
                }
            }
        }
    }
    vec![axioms, proj, zero, exp_nat, bracket, jacobi, semi, exp_fd]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(select("all").unwrap().len(), 4);
        assert!(select("bogus").is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        for s in Suite::ALL {
            let a = run(s, 5, 1);
            let b = run(s, 5, 1);
            assert_eq!(a.to_string(), b.to_string());
            assert!(a.passed(), "{a}");
        }
    }

    #[test]
    fn failures_keep_the_first_counterexample() {
        let mut p = PropertyReport::new("x", 1e-9);
        p.record(1e-12, || "fine".into());
        p.record(1.0, || "first".into());
        p.record(f64::NAN, || "second".into());
        assert!(!p.passed());
        assert!(p.counterexample.as_deref().unwrap().starts_with("first"));
        assert_eq!(p.max_residual, f64::INFINITY);
    }
}
