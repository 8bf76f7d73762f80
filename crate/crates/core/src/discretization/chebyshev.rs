use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, OperatorMatrix};

use super::quadrature::clenshaw_curtis;

/// A one-dimensional collocation grid with its derivative operator.
#[derive(Debug, Clone)]
pub struct Grid1D {
    /// Collocation points, `x[0] = 1` down to `x[n-1] = -1` for Chebyshev grids.
    pub points: Vec<f64>,
    /// First-derivative matrix.
    pub d: OperatorMatrix,
    /// Quadrature weights (row vector), when the grid supports them.
    pub weights: Option<Vec<f64>>,
}

impl Grid1D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `D * D`, formed once.
    pub fn second_derivative(&self) -> OperatorMatrix {
        self.d.matmul(&self.d).expect("square derivative matrix")
    }
}

/// Gauss-Lobatto-Chebyshev points `cos(jπ/(n-1))`, ordered from 1 down to -1.
///
/// Uses the sine form so the set is exactly symmetric about the origin.
pub fn chebyshev_points(n: usize) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n)
        .map(|j| (PI * (m - 2.0 * j as f64) / (2.0 * m)).sin())
        .collect()
}

/// Chebyshev collocation grid with `n` points, its standard derivative
/// matrix and Clenshaw-Curtis weights.
pub fn chebyshev(n: usize) -> Result<Grid1D> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a Chebyshev grid needs at least 2 points, got {n}"
        )));
    }
    let m = n - 1;
    let x = chebyshev_points(n);
    let c = |j: usize| if j == 0 || j == m { 2.0 } else { 1.0 };
    let h = PI / (2.0 * m as f64);
    let mut d = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            // x_i - x_j via the product formula avoids cancellation near the ends
            let dx = 2.0 * (((i + j) as f64) * h).sin() * (((j as f64) - (i as f64)) * h).sin();
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let v = c(i) / c(j) * sign / dx;
            d.set(i, j, v);
            row_sum += v;
        }
        d.set(i, i, -row_sum);
    }
    Ok(Grid1D {
        points: x,
        d: OperatorMatrix::Dense(d),
        weights: Some(clenshaw_curtis(n)?),
    })
}
