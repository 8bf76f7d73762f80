//! Pseudospectral operator calculus with analytical Jacobians built directly
//! in matrix form.
//!
//! A discretized integro-differential equation is written as a vector
//! expression over grid functions using only matrix-vector products and
//! component-wise operations. Its Jacobian then follows from four rules:
//!
//! - matrix-vector product: `∂(A·u)/∂u = A`
//! - diagonal: `∂f(u)/∂u = diag(f'(u))`
//! - chain: `∂(A·F(u))/∂u = A·∂F/∂u` and `∂f(A·u)/∂u = diag(f'(A·u))·A`
//! - product: `∂(F .* G)/∂u = diag(G)·∂F/∂u + diag(F)·∂G/∂u`
//!
//! [`opexpr`] mechanizes the rules over expression trees; [`problems`] holds
//! hand-assembled Jacobians for several electrochemical transport systems;
//! [`fdjac`] is the finite-difference oracle used to check them; [`newton`]
//! drives the nonlinear solves with parameter continuation.

pub mod cli;
pub mod discretization;
pub mod error;
pub mod fdjac;
pub mod matrix;
pub mod newton;
pub mod opexpr;
pub mod problems;

pub use error::{Error, Result};
pub use matrix::{GridFunction, IndexSubset, OperatorMatrix};
