use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::discretization::chebyshev;
use crate::error::Error;
use crate::matrix::{diag, scale_rows, OperatorMatrix};

fn cheb_d(n: usize) -> Arc<OperatorMatrix> {
    Arc::new(chebyshev(n).unwrap().d)
}

fn u_env(u: &[f64]) -> Environment {
    Environment::new().with("u", u.to_vec())
}

#[test]
fn evaluate_variable() {
    let v = evaluate(&Expr::var("u"), &u_env(&[1.0, 2.0, 3.0])).unwrap();
    assert_eq!(v.as_slice(), &[1.0, 2.0, 3.0]);
}

#[test]
fn evaluate_derivative_of_x() {
    let e = Expr::matvec("D", cheb_d(2), Expr::var("u"));
    let v = evaluate(&e, &u_env(&[1.0, -1.0])).unwrap();
    assert_eq!(v.as_slice(), &[1.0, 1.0]);
}

#[test]
fn unbound_and_mismatched() {
    let e = Expr::var("v");
    assert_eq!(
        evaluate(&e, &u_env(&[1.0])).unwrap_err(),
        Error::UnboundVariable("v".into())
    );
    let e = Expr::var("u") * Expr::constant(vec![1.0, 2.0]);
    assert!(matches!(
        evaluate(&e, &u_env(&[1.0, 2.0, 3.0])),
        Err(Error::DimensionMismatch { .. })
    ));
    let e = Expr::matvec("D", cheb_d(4), Expr::var("u"));
    assert!(evaluate(&e, &u_env(&[1.0, 2.0])).is_err());
}

#[test]
fn domain_errors_surface() {
    let e = Expr::var("u").ln();
    assert_eq!(
        evaluate(&e, &u_env(&[1.0, -0.5])).unwrap_err(),
        Error::Domain {
            func: "ln",
            index: 1,
            value: -0.5
        }
    );
    assert!(evaluate(&Expr::var("u").sqrt(), &u_env(&[0.0])).is_err());
    assert!(jacobian(&Expr::var("u").sqrt(), "u", &u_env(&[-1.0])).is_err());
}

fn e2u_du(d: Arc<OperatorMatrix>) -> Expr {
    let u = Expr::var("u");
    (2.0 * u.clone()).exp() * Expr::matvec("D", d, u)
}

#[test]
fn e2u_du_matches_pointwise() {
    let n = 7;
    let d = cheb_d(n);
    let u: Vec<f64> = (0..n).map(|i| 0.3 * (i as f64).sin()).collect();
    let value = evaluate(&e2u_du(d.clone()), &u_env(&u)).unwrap();
    let du = d.apply(&u).unwrap();
    for i in 0..n {
        assert_eq!(value[i], (2.0 * u[i]).exp() * du[i]);
    }
}

#[test]
fn jacobian_of_derivative_is_d() {
    let d = cheb_d(6);
    let j = jacobian(&Expr::matvec("D", d.clone(), Expr::var("u")), "u", &u_env(&[0.0; 6])).unwrap();
    assert_eq!(j.max_abs_diff(&d), 0.0);
}

#[test]
fn jacobian_of_sin_is_diag_cos() {
    let u = [0.1, -0.7, 1.3];
    let j = jacobian(&Expr::var("u").sin(), "u", &u_env(&u)).unwrap();
    let expected = diag(&u.map(f64::cos));
    assert_eq!(j.max_abs_diff(&expected), 0.0);
    assert!(j.is_sparse());
}

#[test]
fn jacobian_of_e2u_du_closed_form() {
    let n = 9;
    let d = cheb_d(n);
    let u: Vec<f64> = (0..n).map(|i| 0.2 * (1.0 + i as f64).ln()).collect();
    let j = jacobian(&e2u_du(d.clone()), "u", &u_env(&u)).unwrap();
    let e2u: Vec<f64> = u.iter().map(|x| (2.0 * x).exp()).collect();
    let du = d.apply(&u).unwrap();
    let lhs: Vec<f64> = du.iter().zip(&e2u).map(|(a, b)| a * b).collect();
    let reference = diag(&lhs)
        .scaled(2.0)
        .add(&scale_rows(&e2u, &d).unwrap())
        .unwrap();
    assert!(j.max_abs_diff(&reference) <= 1e-13);
}

#[test]
fn nested_matvec_stays_lazy() {
    let d = cheb_d(5);
    let e = Expr::matvec("D", d.clone(), Expr::matvec("D", d.clone(), Expr::var("u")));
    let lazy = jacobian_lazy(&e, "u", &u_env(&[0.0; 5])).unwrap();
    assert!(matches!(lazy, LinOp::Product(ref f) if f.len() == 2));
    let d2 = d.matmul(&d).unwrap();
    assert_eq!(lazy.materialize().unwrap().max_abs_diff(&d2), 0.0);
}

#[test]
fn zero_blocks_and_block_layout() {
    let env = Environment::new()
        .with("a", vec![1.0, 2.0])
        .with("b", vec![3.0, 4.0, 5.0]);
    let fa = Expr::var("a").powi(2);
    let fb = Expr::var("b").exp();
    let bj = jacobian_blocks(&[fa, fb], &["a", "b"], &env).unwrap();
    assert_eq!(bj.block(0, 1).shape(), (2, 3));
    assert_eq!(bj.block(0, 1).max_abs(), 0.0);
    assert_eq!(bj.block(1, 0).max_abs(), 0.0);
    let full = bj.assemble().unwrap();
    assert_eq!(full.shape(), (5, 5));
    assert_eq!(full.get(1, 1), 4.0);
    assert_eq!(full.get(4, 4), 5f64.exp());
    assert_eq!(full.get(0, 3), 0.0);
}

#[test]
fn display_is_prefix() {
    let e = e2u_du(cheb_d(3));
    assert_eq!(e.to_string(), "(* (exp (lin 2*u)) (D u))");
    let e = Expr::var("c").ln().shift(vec![0.0; 3]) - Expr::var("u");
    assert_eq!(e.to_string(), "(lin 1*(+ (ln c) const[3]) -1*u)");
}

#[test]
fn custom_function_pairs() {
    let cube = CwiseFn::custom("cube", |x| x * x * x, |x| 3.0 * x * x);
    let e = Expr::var("u").map(cube);
    let j = jacobian(&e, "u", &u_env(&[2.0, -1.0])).unwrap();
    assert_eq!(j.get(0, 0), 12.0);
    assert_eq!(j.get(1, 1), 3.0);
    assert_eq!(e.to_string(), "(cube u)");
}

/// A small corpus of expressions over `u` and `v` on 6 points.
fn corpus() -> Vec<Expr> {
    let d = cheb_d(6);
    let u = || Expr::var("u");
    let v = || Expr::var("v");
    let du = || Expr::matvec("D", d.clone(), u());
    vec![
        du(),
        u().sin() + v().cos(),
        e2u_du(d.clone()),
        u().hadamard(v()).exp(),
        Expr::matvec("D", d.clone(), u().powi(3) - 0.5 * v().sinh()),
        (u().cosh() * du()).affine(2.0, 1.0),
        v().powi(2).shift(vec![1.0; 6]).sqrt() * du(),
        Expr::matvec("D", d.clone(), Expr::matvec("D", d.clone(), u()) * v()),
        u().powf(2.5).ln(),
        Expr::constant(vec![1.0; 6]) * v(),
    ]
}

fn close(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn directional_derivatives_converge_quadratically(
        u in prop::collection::vec(0.5f64..1.5, 6),
        v in prop::collection::vec(-1.0f64..1.0, 6),
        dir in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let env = Environment::new().with("u", u.clone()).with("v", v.clone());
        for e in corpus() {
            let j = jacobian_lazy(&e, "u", &env).unwrap();
            let jv = j.apply(&dir).unwrap();
            let fd = |h: f64| {
                let up: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a + h * b).collect();
                let um: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a - h * b).collect();
                let fp = evaluate(&e, &Environment::new().with("u", up).with("v", v.clone())).unwrap();
                let fm = evaluate(&e, &Environment::new().with("u", um).with("v", v.clone())).unwrap();
                fp.iter().zip(fm.iter()).map(|(p, m)| (p - m) / (2.0 * h)).collect::<Vec<_>>()
            };
            let scale = 1.0 + jv.norm_inf();
            let e1 = close(&fd(1e-2), &jv) / scale;
            let e2 = close(&fd(5e-3), &jv) / scale;
            // either already at roundoff, or the error fell by ~4x
            prop_assert!(e2 < 1e-9 || e1 / e2 > 3.0, "{e}: {e1} -> {e2}");
            // the materialized matrix agrees with the lazy form
            let jm = j.materialize().unwrap().apply(&dir).unwrap();
            prop_assert!(close(&jm, &jv) <= 1e-10 * scale);
        }
    }

    #[test]
    fn lincomb_jacobian_is_linear(
        u in prop::collection::vec(0.5f64..1.5, 6),
        v in prop::collection::vec(-1.0f64..1.0, 6),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let env = Environment::new().with("u", u).with("v", v);
        let c = corpus();
        let (e1, e2) = (c[1].clone(), c[3].clone());
        let combined = jacobian(&Expr::lincomb(vec![(a, e1.clone()), (b, e2.clone())]), "u", &env).unwrap();
        let separate = jacobian(&e1, "u", &env)
            .unwrap()
            .linear_combination(a, &jacobian(&e2, "u", &env).unwrap(), b)
            .unwrap();
        prop_assert_eq!(combined.max_abs_diff(&separate), 0.0);
    }

    #[test]
    fn expressions_without_the_variable_have_zero_jacobian(
        v in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let env = Environment::new().with("u", vec![1.0; 6]).with("v", v);
        let d = cheb_d(6);
        let e = Expr::matvec("D", d, Expr::var("v").sinh()) * Expr::var("v");
        let j = jacobian(&e, "u", &env).unwrap();
        prop_assert_eq!(j.max_abs(), 0.0);
    }

    #[test]
    fn folded_equals_unfolded(
        a in prop::collection::vec(-2.0f64..2.0, 5),
        b in prop::collection::vec(-2.0f64..2.0, 5),
        u in prop::collection::vec(-1.0f64..1.0, 5),
    ) {
        let d = cheb_d(5);
        let folded = LinOp::Diag(a.clone())
            .compose(LinOp::Diag(b.clone()).compose(LinOp::Matrix(d.clone())).unwrap())
            .unwrap()
            .materialize()
            .unwrap();
        let unfolded = diag(&a).matmul(&diag(&b)).unwrap().matmul(&d).unwrap();
        prop_assert!(folded.max_abs_diff(&unfolded) <= 1e-13);
        let j = jacobian(&Expr::var("u").exp().exp(), "u", &u_env(&u)).unwrap();
        let inner: Vec<f64> = u.iter().map(|x| x.exp()).collect();
        let unfolded = diag(&inner.iter().map(|x| x.exp()).collect::<Vec<_>>())
            .matmul(&diag(&inner))
            .unwrap();
        prop_assert!(j.max_abs_diff(&unfolded) <= 1e-13);
    }
}
