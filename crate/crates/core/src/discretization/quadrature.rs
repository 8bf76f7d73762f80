use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::{check_len, DenseMatrix, OperatorMatrix};

/// Clenshaw-Curtis weights for the `n` Chebyshev points on `[-1, 1]`,
/// in the same (descending) order as [`super::chebyshev_points`].
pub fn clenshaw_curtis(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Clenshaw-Curtis needs at least 2 points, got {n}"
        )));
    }
    let m = n - 1;
    let mf = m as f64;
    let mut w = vec![0.0; n];
    let interior = |k_terms: &mut dyn FnMut(f64) -> f64| -> Vec<f64> {
        (1..m)
            .map(|i| {
                let theta = PI * i as f64 / mf;
                k_terms(theta)
            })
            .collect()
    };
    let v: Vec<f64> = if m % 2 == 0 {
        w[0] = 1.0 / (mf * mf - 1.0);
        w[m] = w[0];
        interior(&mut |theta| {
            let mut v = 1.0;
            for k in 1..m / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
            v - (mf * theta).cos() / (mf * mf - 1.0)
        })
    } else {
        w[0] = 1.0 / (mf * mf);
        w[m] = w[0];
        interior(&mut |theta| {
            let mut v = 1.0;
            for k in 1..=(m - 1) / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
            v
        })
    };
    for (i, vi) in v.into_iter().enumerate() {
        w[i + 1] = 2.0 * vi / mf;
    }
    Ok(w)
}

/// Quadrature matrix whose every row is `w`, so `Q * f` is the constant
/// vector holding the integral of `f`.
pub fn quadrature_matrix(w: &[f64], n: usize) -> Result<OperatorMatrix> {
    check_len("quadrature weights", n, w.len())?;
    Ok(OperatorMatrix::Dense(DenseMatrix::from_fn(n, n, |_, j| w[j])))
}
