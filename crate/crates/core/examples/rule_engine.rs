//! Operator expressions and their Jacobians, checked against closed forms:
//! `D(Du)`, `e^{2u} .* Du` and a coupled two-field system.

use std::sync::Arc;

use dmjac::discretization::chebyshev;
use dmjac::matrix::{diag, scale_rows};
use dmjac::opexpr::{evaluate, jacobian, jacobian_blocks, Environment, Expr};

fn main() -> dmjac::Result<()> {
    let g = chebyshev(16)?;
    let d = Arc::new(g.d.clone());
    let u: Vec<f64> = g.points.iter().map(|x| x.sin()).collect();
    let v: Vec<f64> = g.points.iter().map(|x| 1.0 + x * x).collect();
    let env = Environment::new().with("u", u.clone()).with("v", v.clone());
    let du = || Expr::matvec("D", d.clone(), Expr::var("u"));

    let poisson = Expr::matvec("D", d.clone(), du());
    let j = jacobian(&poisson, "u", &env)?;
    println!("{poisson}: |J - D·D| = {:.1e}", j.max_abs_diff(&g.second_derivative()));

    let growth = Expr::var("u").affine(2.0, 0.0).exp() * du();
    let j = jacobian(&growth, "u", &env)?;
    let e2u: Vec<f64> = u.iter().map(|u| (2.0 * u).exp()).collect();
    let dterm = evaluate(&du(), &env)?;
    let lead: Vec<f64> = e2u.iter().zip(dterm.iter()).map(|(e, d)| 2.0 * e * d).collect();
    let closed = diag(&lead).add(&scale_rows(&e2u, &g.d)?)?;
    println!("{growth}: |J - closed form| = {:.1e}", j.max_abs_diff(&closed));

    // F = D(v .* Du), G = v - u^2
    let f = Expr::matvec("D", d.clone(), Expr::var("v") * du());
    let gx = Expr::var("v") - Expr::var("u").powi(2);
    let blocks = jacobian_blocks(&[f, gx], &["u", "v"], &env)?;
    for (r, name) in ["F", "G"].iter().enumerate() {
        for (c, var) in ["u", "v"].iter().enumerate() {
            let b = blocks.block(r, c);
            println!("d{name}/d{var}: {}x{}, max |entry| {:.3}", b.rows(), b.cols(), b.max_abs());
        }
    }
    Ok(())
}
