use thiserror::Error;

/// Errors raised by operator construction, expression evaluation and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range for a grid of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("index {index} appears more than once in subset")]
    DuplicateIndex { index: usize },

    #[error("dimension overflow forming a {rows} x {cols} product")]
    DimensionOverflow { rows: usize, cols: usize },

    #[error("matrix is singular to working precision (pivot {pivot}, |u_kk| = {magnitude:e})")]
    Singular { pivot: usize, magnitude: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("{func} evaluated outside its domain at component {index} (argument {value})")]
    Domain {
        func: &'static str,
        index: usize,
        value: f64,
    },

    #[error("non-finite value in {context} at index {index}")]
    NonFinite { context: &'static str, index: usize },

    #[error("surface concentration is non-positive at surface point {index} (c_s = {value})")]
    NonPositiveConcentration { index: usize, value: f64 },

    #[error("zeta-potential solve did not converge at {} surface point(s), first {:?}", .components.len(), .components.first())]
    ZetaNotConverged { components: Vec<usize> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
