//! Operator-expression trees and their analytical Jacobians.
//!
//! Jacobians follow four rules: `∂(A u) = A ∂u`, `∂f(u) = diag(f'(u)) ∂u`,
//! the chain rule through nested nodes, and
//! `∂(F .* G) = diag(G) ∂F + diag(F) ∂G`. Adjacent diagonal factors are
//! folded (`diag(a) diag(b) = diag(a .* b)`) and diagonal-times-matrix
//! becomes row or column scaling, so no dense product is formed for them.

mod cwise;
mod eval;
mod expr;
mod linop;

pub use cwise::{CustomFn, CwiseFn};
pub use eval::{evaluate, jacobian, jacobian_blocks, jacobian_lazy, BlockJacobian};
pub use expr::{Environment, Expr};
pub use linop::LinOp;

#[cfg(test)]
mod tests;
