//! Dense and sparse operator matrices and the structural operations the
//! direct matrix method relies on.
//!
//! Multi-dimensional grids are flattened lexicographically (the last grid
//! index varies fastest), so a derivative along the fast direction of an
//! `m x n` grid is `I_m ⊗ D_n` and along the slow direction `D_m ⊗ I_n`.

mod dense;
mod grid_function;
mod operator;
mod solve;
mod sparse;
mod subset;

pub use dense::DenseMatrix;
pub use grid_function::GridFunction;
pub use operator::{
    block_matrix, diag, kron, outer, prolongation, restrict_operator, restriction, scale_cols,
    scale_rows, OperatorMatrix,
};
pub use solve::{factorize, solve_linear, Factorization, BACKWARD_TOL};
pub use sparse::CsrMatrix;
pub use subset::IndexSubset;

pub(crate) use grid_function::{check_len, norm_inf};
