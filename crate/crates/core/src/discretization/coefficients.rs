use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Magnitudes of the Chebyshev coefficients of samples on the Chebyshev
/// points (ordered from `x = 1` down to `x = -1`).
///
/// Matches `abs(fft([f; flipud(f(2:end-1))]))(1:n)`: no normalization, so for
/// `f = T_k` the entry `k` equals `n - 1` for interior `k` and `2(n - 1)` at
/// the ends.
pub fn chebyshev_coefficients(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "coefficients need at least 2 samples, got {n}"
        )));
    }
    let m = n - 1;
    let mf = m as f64;
    Ok((0..n)
        .map(|k| {
            let mut s = values[0] + if k % 2 == 0 { values[m] } else { -values[m] };
            for (j, &v) in values.iter().enumerate().take(m).skip(1) {
                // reduce k*j mod 2m before taking the cosine
                let phase = ((k * j) % (2 * m)) as f64;
                s += 2.0 * v * (PI * phase / mf).cos();
            }
            s.abs()
        })
        .collect())
}
