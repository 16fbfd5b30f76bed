use std::sync::Arc;

use proptest::prelude::*;

use weil_core::algebra::{parse_algebra_spec, parse_table, write_table, AlgebraElement, WeilAlgebra};
use weil_core::expr::{parse_exprs, ExprGraph};
use weil_core::lift::{eval_lift, LiftedVector};
use weil_core::liegroup::{group_mul, lifted_exp, so2_generator, Constraint, LiftedLieAlgebraElement};
use weil_core::manifold::{circle, sphere, to_chart, WeilPoint};
use weil_core::scalar::{abs_err, rel_err};

const SPECS: [&str; 5] = ["dual", "jet:3", "dual*dual", "jet:2:2", "jet:2*dual"];

fn algebra(i: usize) -> Arc<WeilAlgebra<f64>> {
    Arc::new(parse_algebra_spec(SPECS[i % SPECS.len()]).unwrap())
}

/// An algebra index and `count` coefficient vectors for it.
fn elements(count: usize) -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (0..SPECS.len()).prop_flat_map(move |i| {
        let d = algebra(i).dim();
        (Just(i), prop::collection::vec(prop::collection::vec(-2.0..2.0f64, d), count))
    })
}

fn el(a: &Arc<WeilAlgebra<f64>>, c: &[f64]) -> AlgebraElement<f64> {
    AlgebraElement::new(Arc::clone(a), c.to_vec()).unwrap()
}

const EXPRS: [&str; 6] = [
    "x1*x2 + sin(x1)",
    "exp(x1 - x2)*cos(x2)",
    "(x1^2 + x2^2 + 1)^(-2)",
    "log(x1^2 + 1) + sqrt(x2^2 + 4)",
    "x1^3 - 2*x1*x2^2 + 7",
    "1/(2 + cos(x1*x2))",
];

proptest! {
    #[test]
    fn ring_axioms((i, v) in elements(3)) {
        let a = algebra(i);
        let (x, y, z) = (el(&a, &v[0]), el(&a, &v[1]), el(&a, &v[2]));
        let m = |p: &AlgebraElement<f64>, q: &AlgebraElement<f64>| p.try_mul(q).unwrap();
        prop_assert!(abs_err(m(&m(&x, &y), &z).coeffs(), m(&x, &m(&y, &z)).coeffs()) < 1e-12);
        prop_assert!(abs_err(m(&x, &y).coeffs(), m(&y, &x).coeffs()) < 1e-12);
        let ux = m(&AlgebraElement::one(&a), &x);
        prop_assert_eq!(ux.coeffs(), x.coeffs());
        let dist = m(&x, &y.try_add(&z).unwrap());
        let split = m(&x, &y).try_add(&m(&x, &z)).unwrap();
        prop_assert!(abs_err(dist.coeffs(), split.coeffs()) < 1e-12);
        prop_assert!((m(&x, &y).augmentation() - x.augmentation() * y.augmentation()).abs() < 1e-12);
    }

    #[test]
    fn inverse_law((i, v) in elements(1), shift in prop_oneof![-3.0..-0.3f64, 0.3..3.0f64]) {
        let a = algebra(i);
        let x = el(&a, &v[0]).nilpotent_part().add_scalar(shift);
        let y = x.try_invert().unwrap();
        prop_assert!(abs_err(x.try_mul(&y).unwrap().coeffs(), AlgebraElement::one(&a).coeffs()) < 1e-9);
    }

    #[test]
    fn nilpotent_powers_vanish((i, v) in elements(1)) {
        let a = algebra(i);
        let n = el(&a, &v[0]).nilpotent_part();
        let h = u32::try_from(a.height()).unwrap();
        prop_assert!(n.powi(h + 1).max_abs() < 1e-12);
    }

    #[test]
    fn table_format_round_trip(i in 0..SPECS.len()) {
        let a = algebra(i);
        let back = parse_table::<f64>(&write_table(a.table())).unwrap();
        prop_assert_eq!(&back.sc, &a.table().sc);
        prop_assert_eq!(WeilAlgebra::from_table(back).unwrap().height(), a.height());
    }

    #[test]
    fn lift_shadow_and_products(
        (i, v) in elements(2),
        e in 0..EXPRS.len(),
        f in 0..EXPRS.len(),
        x in prop::array::uniform2(-2.0..2.0f64),
    ) {
        let a = algebra(i);
        let g: ExprGraph<f64> = parse_exprs(EXPRS[e], Some(2)).unwrap();
        let k: ExprGraph<f64> = parse_exprs(EXPRS[f], Some(2)).unwrap();
        let entries = v.iter().zip(x).map(|(c, xi)| el(&a, c).nilpotent_part().add_scalar(xi)).collect();
        let p = LiftedVector::new(&a, entries).unwrap();
        let y = eval_lift(&g, &p).unwrap();
        prop_assert!(rel_err(&y.shadow(), &g.eval(&x).unwrap()) < 1e-12);
        let paired = eval_lift(&g.pair(&k).unwrap(), &p).unwrap();
        let mut separate = y.into_entries();
        separate.extend(eval_lift(&k, &p).unwrap().into_entries());
        prop_assert_eq!(paired.entries(), separate.as_slice());
    }

    #[test]
    fn dual_slot_is_directional_derivative(
        e in 0..EXPRS.len(),
        x in prop::array::uniform2(-1.5..1.5f64),
        u in prop::array::uniform2(-1.0..1.0f64),
    ) {
        let d = Arc::new(parse_algebra_spec::<f64>("dual").unwrap());
        let g: ExprGraph<f64> = parse_exprs(EXPRS[e], Some(2)).unwrap();
        let v = LiftedVector::seeded(&d, &x, &[vec![0.0, u[0]], vec![0.0, u[1]]]).unwrap();
        let slot = eval_lift(&g, &v).unwrap().entries()[0].coeffs()[1];
        let h = 1e-5;
        let at = |s: f64| [x[0] + s * u[0], x[1] + s * u[1]];
        let fd = (g.eval(&at(h)).unwrap()[0] - g.eval(&at(-h)).unwrap()[0]) / (2.0 * h);
        prop_assert!(rel_err(&[slot], &[fd]) < 1e-6, "slot {slot} fd {fd}");
    }

    #[test]
    fn printed_expressions_reparse(e in 0..EXPRS.len(), x in prop::array::uniform2(-2.0..2.0f64)) {
        let g: ExprGraph<f64> = parse_exprs(EXPRS[e], Some(2)).unwrap();
        let back: ExprGraph<f64> = parse_exprs(&g.to_strings().join(", "), Some(2)).unwrap();
        prop_assert!(rel_err(&g.eval(&x).unwrap(), &back.eval(&x).unwrap()) < 1e-14);
    }

    #[test]
    fn circle_chart_round_trip(t in -3.1..3.1f64, c in prop::collection::vec(-1.0..1.0f64, 2)) {
        let a = Arc::new(parse_algebra_spec::<f64>("jet:2").unwrap());
        let s1 = circle::<f64>();
        prop_assume!(t.abs() > 1e-3);
        let p = WeilPoint::new(&s1, 0, LiftedVector::seeded(&a, &[t], &[vec![0.0, c[0], c[1]]]).unwrap()).unwrap();
        let back = to_chart(&s1, &to_chart(&s1, &p, 1).unwrap(), 0).unwrap();
        prop_assert!(back.coords.rel_err(&p.coords) < 1e-14);
    }

    #[test]
    fn stereographic_change_is_an_involution(u in prop::array::uniform2(-3.0..3.0f64), c in prop::collection::vec(-1.0..1.0f64, 4)) {
        prop_assume!(u[0].hypot(u[1]) > 0.1);
        let a = Arc::new(parse_algebra_spec::<f64>("jet:2").unwrap());
        let s2 = sphere::<f64>();
        let seeds = vec![vec![0.0, c[0], c[1]], vec![0.0, c[2], c[3]]];
        let p = WeilPoint::new(&s2, 0, LiftedVector::seeded(&a, &u, &seeds).unwrap()).unwrap();
        let back = to_chart(&s2, &to_chart(&s2, &p, 1).unwrap(), 0).unwrap();
        prop_assert!(back.coords.rel_err(&p.coords) < 1e-12);
    }

    #[test]
    fn so2_exp_is_additive(s in prop::collection::vec(-2.0..2.0f64, 2), t in prop::collection::vec(-2.0..2.0f64, 2)) {
        let d = Arc::new(parse_algebra_spec::<f64>("dual").unwrap());
        let j = so2_generator(1.0);
        let lie = |c: &[f64]| LiftedLieAlgebraElement::pure_tensor(Constraint::Antisymmetric, &j, &el(&d, c)).unwrap();
        let sum: Vec<f64> = s.iter().zip(&t).map(|(p, q)| p + q).collect();
        let whole = lifted_exp(&lie(&sum));
        let staged = group_mul(&lifted_exp(&lie(&s)), &lifted_exp(&lie(&t))).unwrap();
        prop_assert!(whole.rel_err(&staged) < 1e-12);
        let det = whole.det();
        prop_assert!(abs_err(det.coeffs(), &[1.0, 0.0]) < 1e-12);
    }
}

#[test]
fn single_precision_lift() {
    let j = Arc::new(parse_algebra_spec::<f32>("jet:3").unwrap());
    let g: ExprGraph<f32> = parse_exprs("exp(x1)", Some(1)).unwrap();
    let v = LiftedVector::seeded(&j, &[0.0f32], &[vec![0.0, 1.0, 0.0, 0.0]]).unwrap();
    let y = eval_lift(&g, &v).unwrap();
    let want = [1.0f32, 1.0, 0.5, 1.0 / 6.0];
    for (a, b) in y.entries()[0].coeffs().iter().zip(want) {
        assert!((a - b).abs() < 1e-6);
    }
}
