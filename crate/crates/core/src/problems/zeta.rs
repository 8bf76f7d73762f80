use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_len, norm_inf};

/// Stopping rules for the Stern-layer solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaTolerances {
    pub res_tol: f64,
    pub step_tol: f64,
    pub max_iters: usize,
}

impl Default for ZetaTolerances {
    fn default() -> Self {
        Self {
            res_tol: 1e-9,
            step_tol: 1e-13,
            max_iters: 20,
        }
    }
}

fn stern_residual(zeta: f64, psi: f64, sqrt_c: f64, delta: f64) -> f64 {
    zeta + 2.0 * delta * sqrt_c * (zeta / 2.0).sinh() - psi
}

/// Solve `ζ + 2δ√c sinh(ζ/2) = Ψ` component-wise by Newton's method from `ζ = Ψ`.
///
/// Iterates on the whole vector until the ∞-norm of the residual or of the
/// step falls below its tolerance, or the budget runs out.
pub fn zeta_solve(psi: &[f64], c_s: &[f64], delta: f64, tols: &ZetaTolerances) -> Result<Vec<f64>> {
    check_len("surface concentration", psi.len(), c_s.len())?;
    if let Some((index, &value)) = c_s.iter().enumerate().find(|(_, &c)| !(c > 0.0)) {
        return Err(Error::NonPositiveConcentration { index, value });
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be non-negative, got {delta}")));
    }
    let sqrt_c: Vec<f64> = c_s.iter().map(|c| c.sqrt()).collect();
    let mut zeta = psi.to_vec();
    let mut res: Vec<f64> = (0..psi.len())
        .map(|i| stern_residual(zeta[i], psi[i], sqrt_c[i], delta))
        .collect();
    let mut res_norm = f64::INFINITY;
    let mut step_norm = f64::INFINITY;
    let mut count = 0;
    while res_norm > tols.res_tol && step_norm > tols.step_tol && count < tols.max_iters {
        let mut step = vec![0.0; psi.len()];
        for i in 0..psi.len() {
            let jac = 1.0 + delta * sqrt_c[i] * (zeta[i] / 2.0).cosh();
            step[i] = -res[i] / jac;
            zeta[i] += step[i];
            res[i] = stern_residual(zeta[i], psi[i], sqrt_c[i], delta);
        }
        res_norm = norm_inf(&res);
        step_norm = norm_inf(&step);
        count += 1;
    }
    if res_norm > tols.res_tol && step_norm > tols.step_tol {
        let components: Vec<usize> = (0..psi.len())
            .filter(|&i| !(res[i].abs() <= tols.res_tol))
            .collect();
        return Err(Error::ZetaNotConverged { components });
    }
    Ok(zeta)
}

/// `(∂ζ/∂ψ_s, ∂ζ/∂c_s)` by implicit differentiation of the Stern condition
/// with `Ψ = v - (ψ_s - E cos θ)`.
pub fn zeta_sensitivities(zeta: &[f64], c_s: &[f64], delta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len("surface concentration", zeta.len(), c_s.len())?;
    let mut d_psi = Vec::with_capacity(zeta.len());
    let mut d_c = Vec::with_capacity(zeta.len());
    for (i, (&z, &c)) in zeta.iter().zip(c_s).enumerate() {
        if !(c > 0.0) {
            return Err(Error::NonPositiveConcentration { index: i, value: c });
        }
        let sc = c.sqrt();
        let denom = 1.0 + delta * sc * (z / 2.0).cosh();
        d_psi.push(-1.0 / denom);
        d_c.push(-delta * (z / 2.0).sinh() / (sc * denom));
    }
    Ok((d_psi, d_c))
}
