use crate::error::{Error, Result};
use crate::matrix::{scale_rows, OperatorMatrix};

use super::chebyshev::chebyshev;

/// Chebyshev grid stretched by `x = tanh(α y) / β`, `α = atanh(β)`, which
/// clusters points near `x = ±1` as `β → 1`.
///
/// `gamma = dy/dx = β cosh²(α y) / α`, so `diag(γ) D` differentiates in `x`.
#[derive(Debug, Clone)]
pub struct MappedThinFilmGrid {
    pub beta: f64,
    pub alpha: f64,
    /// Computational (Chebyshev) coordinates.
    pub y: Vec<f64>,
    /// Physical coordinates.
    pub x: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Chebyshev derivative with respect to `y`.
    pub d: OperatorMatrix,
    /// Clenshaw-Curtis weights in `y`.
    pub weights: Vec<f64>,
    /// `diag(γ) D diag(γ) D`, the second derivative in `x`.
    pub l_mapped: OperatorMatrix,
}

pub fn mapped_thinfilm_grid(n: usize, beta: f64) -> Result<MappedThinFilmGrid> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "mapping parameter beta must lie in (0, 1), got {beta}"
        )));
    }
    let base = chebyshev(n)?;
    let alpha = beta.atanh();
    let y = base.points.clone();
    let mut x: Vec<f64> = y.iter().map(|&y| (alpha * y).tanh() / beta).collect();
    // tanh(α)/β is 1 only up to roundoff; pin the endpoints
    x[0] = 1.0;
    x[n - 1] = -1.0;
    let gamma: Vec<f64> = y
        .iter()
        .map(|&y| beta / alpha * (alpha * y).cosh().powi(2))
        .collect();
    let gd = scale_rows(&gamma, &base.d)?;
    let l_mapped = gd.matmul(&gd)?;
    Ok(MappedThinFilmGrid {
        beta,
        alpha,
        y,
        x,
        gamma,
        d: base.d,
        weights: base.weights.expect("Chebyshev grids carry weights"),
        l_mapped,
    })
}

impl MappedThinFilmGrid {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// First derivative in the physical coordinate, `diag(γ) D`.
    pub fn physical_derivative(&self) -> OperatorMatrix {
        scale_rows(&self.gamma, &self.d).expect("gamma matches grid")
    }
}
