//! Column-wise finite-difference Jacobians, the oracle every analytical
//! Jacobian is checked against.

use std::thread;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, GridFunction, OperatorMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FdScheme {
    Forward,
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub scheme: FdScheme,
    pub base_step: f64,
    /// Floor on `|u_j|` when sizing the step for column `j`.
    pub typical_scale: f64,
}

impl FdConfig {
    /// Forward differences with `h = sqrt(eps)`.
    pub fn forward() -> Self {
        Self {
            scheme: FdScheme::Forward,
            base_step: f64::EPSILON.sqrt(),
            typical_scale: 1.0,
        }
    }

    /// Central differences with `h = cbrt(eps)`.
    pub fn central() -> Self {
        Self {
            scheme: FdScheme::Central,
            base_step: f64::EPSILON.cbrt(),
            typical_scale: 1.0,
        }
    }

    pub fn with_step(mut self, base_step: f64) -> Self {
        self.base_step = base_step;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.base_step > 0.0 && self.typical_scale > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "finite-difference step and scale must be positive (got {}, {})",
                self.base_step, self.typical_scale
            )))
        }
    }
}

impl Default for FdConfig {
    fn default() -> Self {
        Self::central()
    }
}

fn column<F>(residual: &F, u: &[f64], f0: Option<&[f64]>, j: usize, cfg: &FdConfig) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<GridFunction> + ?Sized,
{
    let h = cfg.base_step * u[j].abs().max(cfg.typical_scale);
    let mut x = u.to_vec();
    x[j] = u[j] + h;
    // use the step actually representable in floating point
    let hp = x[j] - u[j];
    let fp = residual(&x)?;
    if fp.first_non_finite().is_some() {
        return Err(Error::NonFinite {
            context: "finite-difference column",
            index: j,
        });
    }
    Ok(match cfg.scheme {
        FdScheme::Forward => {
            let f0 = f0.expect("forward scheme needs the base residual");
            fp.iter().zip(f0).map(|(p, b)| (p - b) / hp).collect()
        }
        FdScheme::Central => {
            x[j] = u[j] - h;
            let hm = u[j] - x[j];
            let fm = residual(&x)?;
            if fm.first_non_finite().is_some() {
                return Err(Error::NonFinite {
                    context: "finite-difference column",
                    index: j,
                });
            }
            fp.iter().zip(fm.iter()).map(|(p, m)| (p - m) / (hp + hm)).collect()
        }
    })
}

fn base_residual<F>(residual: &F, u: &[f64], cfg: &FdConfig) -> Result<(usize, Option<GridFunction>)>
where
    F: Fn(&[f64]) -> Result<GridFunction> + ?Sized,
{
    cfg.validate()?;
    if let Some(i) = u.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "finite-difference base point",
            index: i,
        });
    }
    let f0 = residual(u)?;
    if let Some(i) = f0.first_non_finite() {
        return Err(Error::NonFinite {
            context: "residual at the base point",
            index: i,
        });
    }
    let rows = f0.len();
    Ok((rows, (cfg.scheme == FdScheme::Forward).then_some(f0)))
}

/// Dense finite-difference Jacobian of `residual` at `u`, one residual
/// evaluation (forward) or two (central) per column.
pub fn fd_jacobian<F>(residual: &F, u: &[f64], cfg: &FdConfig) -> Result<OperatorMatrix>
where
    F: Fn(&[f64]) -> Result<GridFunction> + ?Sized,
{
    let (rows, f0) = base_residual(residual, u, cfg)?;
    let mut out = DenseMatrix::zeros(rows, u.len());
    for j in 0..u.len() {
        let col = column(residual, u, f0.as_deref(), j, cfg)?;
        for (i, v) in col.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(OperatorMatrix::Dense(out))
}

/// As [`fd_jacobian`], spreading columns over `threads` workers. The result
/// is identical to the sequential one.
pub fn fd_jacobian_parallel<F>(residual: &F, u: &[f64], cfg: &FdConfig, threads: usize) -> Result<OperatorMatrix>
where
    F: Fn(&[f64]) -> Result<GridFunction> + Sync + ?Sized,
{
    let (rows, f0) = base_residual(residual, u, cfg)?;
    let n = u.len();
    let threads = threads.clamp(1, n.max(1));
    let chunk = n.div_ceil(threads);
    let columns: Vec<Result<Vec<(usize, Vec<f64>)>>> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let f0 = f0.as_deref();
                s.spawn(move || {
                    (t * chunk..((t + 1) * chunk).min(n))
                        .map(|j| Ok((j, column(residual, u, f0, j, cfg)?)))
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = DenseMatrix::zeros(rows, n);
    for part in columns {
        for (j, col) in part? {
            for (i, v) in col.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
    }
    Ok(OperatorMatrix::Dense(out))
}

/// Worst entry of a Jacobian comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstEntry {
    pub row: usize,
    pub col: usize,
    pub analytic: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    /// `max |J_a - J_fd| / max(1, max |J_a|)`.
    pub max_rel_error: f64,
    pub worst: WorstEntry,
}

/// Compare an analytical Jacobian against a finite-difference one.
pub fn compare_jacobians(analytic: &OperatorMatrix, numeric: &OperatorMatrix) -> Result<Comparison> {
    crate::matrix::check_len("compared Jacobian rows", analytic.rows(), numeric.rows())?;
    crate::matrix::check_len("compared Jacobian cols", analytic.cols(), numeric.cols())?;
    compare_dense(&analytic.to_dense(), &numeric.to_dense(), 0..analytic.rows(), 0..analytic.cols())
}

fn compare_dense(
    a: &DenseMatrix,
    b: &DenseMatrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Result<Comparison> {
    let mut scale: f64 = 1.0;
    let mut worst = WorstEntry {
        row: rows.start,
        col: cols.start,
        analytic: 0.0,
        numeric: 0.0,
    };
    let mut max_diff = -1.0;
    for i in rows.clone() {
        for j in cols.clone() {
            let (x, y) = (a.get(i, j), b.get(i, j));
            scale = scale.max(x.abs());
            let d = (x - y).abs();
            if d > max_diff || d.is_nan() {
                max_diff = if d.is_nan() { f64::INFINITY } else { d };
                worst = WorstEntry {
                    row: i,
                    col: j,
                    analytic: x,
                    numeric: y,
                };
            }
        }
    }
    Ok(Comparison {
        max_rel_error: max_diff.max(0.0) / scale,
        worst,
    })
}

/// Per-block result of [`compare_blocks`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockComparison {
    pub row_block: String,
    pub col_block: String,
    #[serde(flatten)]
    pub comparison: Comparison,
}

/// Compare two Jacobians block by block. Each block's error is relative to
/// `max(1, max |J_a|)` over the whole matrix, so small blocks are not
/// judged against their own (possibly tiny) scale.
pub fn compare_blocks(
    analytic: &OperatorMatrix,
    numeric: &OperatorMatrix,
    row_blocks: &[(String, usize)],
    col_blocks: &[(String, usize)],
) -> Result<Vec<BlockComparison>> {
    let total_rows: usize = row_blocks.iter().map(|b| b.1).sum();
    let total_cols: usize = col_blocks.iter().map(|b| b.1).sum();
    crate::matrix::check_len("block layout rows", analytic.rows(), total_rows)?;
    crate::matrix::check_len("block layout cols", analytic.cols(), total_cols)?;
    crate::matrix::check_len("compared Jacobian rows", analytic.rows(), numeric.rows())?;
    crate::matrix::check_len("compared Jacobian cols", analytic.cols(), numeric.cols())?;
    let (a, b) = (analytic.to_dense(), numeric.to_dense());
    let global = 1f64.max(a.max_abs());
    let mut out = Vec::new();
    let mut r0 = 0;
    for (rname, rn) in row_blocks {
        let mut c0 = 0;
        for (cname, cn) in col_blocks {
            let mut cmp = compare_dense(&a, &b, r0..r0 + rn, c0..c0 + cn)?;
            // rescale from the block-local to the global denominator
            let local = 1f64.max(
                (r0..r0 + rn)
                    .flat_map(|i| (c0..c0 + cn).map(move |j| (i, j)))
                    .map(|(i, j)| a.get(i, j).abs())
                    .fold(0.0, f64::max),
            );
            cmp.max_rel_error *= local / global;
            out.push(BlockComparison {
                row_block: rname.clone(),
                col_block: cname.clone(),
                comparison: cmp,
            });
            c0 += cn;
        }
        r0 += rn;
    }
    Ok(out)
}
