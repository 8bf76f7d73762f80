use crate::error::{Error, Result};
use crate::matrix::{block_matrix, check_len, GridFunction, OperatorMatrix};

use super::expr::{Environment, Expr};
use super::linop::LinOp;

/// Value of `e` under `env`.
pub fn evaluate(e: &Expr, env: &Environment) -> Result<GridFunction> {
    Ok(match e {
        Expr::Var(name) => env.get(name)?.clone(),
        Expr::Const(c) => c.clone(),
        Expr::MatVec { op, child, .. } => op.apply(&evaluate(child, env)?)?,
        Expr::Cwise(f, child) => f.apply(&evaluate(child, env)?)?.into(),
        Expr::Hadamard(a, b) => evaluate(a, env)?.hadamard(&evaluate(b, env)?)?,
        Expr::LinComb(terms) => lincomb_value(terms, env)?,
        Expr::AffineShift(child, c) => evaluate(child, env)?.axpy(1.0, c)?,
    })
}

fn lincomb_value(terms: &[(f64, Expr)], env: &Environment) -> Result<GridFunction> {
    let mut it = terms.iter();
    let (k0, e0) = it
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
    let mut acc = evaluate(e0, env)?.scaled(*k0);
    for (k, e) in it {
        acc = acc.axpy(*k, &evaluate(e, env)?)?;
    }
    Ok(acc)
}

/// Jacobian of `e` with respect to `var`, kept in factored form.
pub fn jacobian_lazy(e: &Expr, var: &str, env: &Environment) -> Result<LinOp> {
    let n = env.get(var)?.len();
    Ok(value_and_jacobian(e, var, n, env)?.1)
}

/// Jacobian of `e` with respect to `var` as an explicit matrix.
pub fn jacobian(e: &Expr, var: &str, env: &Environment) -> Result<OperatorMatrix> {
    jacobian_lazy(e, var, env)?.materialize()
}

/// One recursion produces both the value (needed by the diagonal and
/// product rules) and the derivative.
fn value_and_jacobian(
    e: &Expr,
    var: &str,
    n: usize,
    env: &Environment,
) -> Result<(GridFunction, LinOp)> {
    if !e.contains_var(var) {
        let v = evaluate(e, env)?;
        let rows = v.len();
        return Ok((v, LinOp::Zero { rows, cols: n }));
    }
    Ok(match e {
        Expr::Var(_) => (env.get(var)?.clone(), LinOp::Identity(n)),
        Expr::Const(_) => unreachable!("constants contain no variables"),
        Expr::MatVec { op, child, .. } => {
            let (v, j) = value_and_jacobian(child, var, n, env)?;
            (op.apply(&v)?, LinOp::Matrix(op.clone()).compose(j)?)
        }
        Expr::Cwise(f, child) => {
            let (v, j) = value_and_jacobian(child, var, n, env)?;
            let d = f.apply_derivative(&v)?;
            (f.apply(&v)?.into(), LinOp::Diag(d).compose(j)?)
        }
        Expr::Hadamard(a, b) => {
            let (va, ja) = value_and_jacobian(a, var, n, env)?;
            let (vb, jb) = value_and_jacobian(b, var, n, env)?;
            let rows = va.len();
            check_len("Hadamard product", rows, vb.len())?;
            let left = LinOp::Diag(vb.to_vec()).compose(ja)?;
            let right = LinOp::Diag(va.to_vec()).compose(jb)?;
            (va.hadamard(&vb)?, LinOp::sum(vec![(1.0, left), (1.0, right)], rows, n)?)
        }
        Expr::LinComb(terms) => {
            let value = lincomb_value(terms, env)?;
            let mut parts = Vec::with_capacity(terms.len());
            for (k, t) in terms {
                parts.push((*k, value_and_jacobian(t, var, n, env)?.1));
            }
            let rows = value.len();
            (value, LinOp::sum(parts, rows, n)?)
        }
        Expr::AffineShift(child, c) => {
            let (v, j) = value_and_jacobian(child, var, n, env)?;
            (v.axpy(1.0, c)?, j)
        }
    })
}

/// Block Jacobian `[∂F_i/∂v_j]` of a system of expressions.
#[derive(Debug, Clone)]
pub struct BlockJacobian {
    pub blocks: Vec<Vec<OperatorMatrix>>,
}

impl BlockJacobian {
    pub fn block(&self, i: usize, j: usize) -> &OperatorMatrix {
        &self.blocks[i][j]
    }

    /// The full system matrix.
    pub fn assemble(&self) -> Result<OperatorMatrix> {
        block_matrix(&self.blocks)
    }
}

pub fn jacobian_blocks(exprs: &[Expr], vars: &[&str], env: &Environment) -> Result<BlockJacobian> {
    let blocks = exprs
        .iter()
        .map(|e| vars.iter().map(|v| jacobian(e, v, env)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockJacobian { blocks })
}
