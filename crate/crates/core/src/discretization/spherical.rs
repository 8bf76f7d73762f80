use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::{
    diag, kron, restrict_operator, scale_cols, scale_rows, DenseMatrix, IndexSubset,
    OperatorMatrix,
};

use super::chebyshev::chebyshev;

/// Pole-free polar-angle grid `θ_k = (2k-1)π / (2 n_t)`.
#[derive(Debug, Clone)]
pub struct PolarGrid {
    pub theta: Vec<f64>,
    pub d_theta: OperatorMatrix,
}

/// Polar grid and its derivative matrix.
///
/// The matrix differentiates the polynomial in `cos θ` interpolating the
/// samples (the θ_k are the Gauss-Chebyshev nodes in `cos θ`): off-diagonal
/// entries `(-1)^(i+j) sin θ_j / (cos θ_j - cos θ_i)`, diagonal `-cot(θ_i)/2`, taken as
/// the negative off-diagonal row sum.
pub fn polar_grid(n_t: usize) -> Result<PolarGrid> {
    if n_t < 2 {
        return Err(Error::InvalidArgument(format!(
            "polar grid needs at least 2 points, got {n_t}"
        )));
    }
    let theta: Vec<f64> = (1..=n_t)
        .map(|k| (2 * k - 1) as f64 * PI / (2.0 * n_t as f64))
        .collect();
    let mut d = DenseMatrix::from_fn(n_t, n_t, |i, j| {
        if i == j {
            0.0
        } else {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            // cos θ_j - cos θ_i
            let denom = 2.0 * ((theta[i] + theta[j]) / 2.0).sin() * ((theta[i] - theta[j]) / 2.0).sin();
            sign * theta[j].sin() / denom
        }
    });
    // rows of an exact derivative sum to zero; this equals -cot(θ_i)/2 up to roundoff
    for i in 0..n_t {
        let s: f64 = d.row(i).iter().sum();
        d.set(i, i, -s);
    }
    Ok(PolarGrid {
        theta,
        d_theta: OperatorMatrix::Dense(d),
    })
}

/// Shifted semi-infinite rational Chebyshev grid `r = L (1+y)/(1-y) + 1`.
///
/// Index 0 is the point at infinity (`y = 1`); the last index is the sphere
/// surface `r = 1` (`y = -1`).
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub scale: f64,
    pub y: Vec<f64>,
    pub r: Vec<f64>,
    /// `(1/(2L)) diag((1-y)²) D_y`; the row at infinity vanishes.
    pub d_r: OperatorMatrix,
}

impl RadialGrid {
    /// Number of points including the point at infinity.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `1/r`, taking the value 0 at infinity.
    pub fn inverse_r(&self) -> Vec<f64> {
        self.r
            .iter()
            .map(|&r| if r.is_infinite() { 0.0 } else { 1.0 / r })
            .collect()
    }
}

/// Radial grid with `n_r` finite points plus the point at infinity.
pub fn rational_radial_grid(n_r: usize, scale: f64) -> Result<RadialGrid> {
    if n_r < 2 {
        return Err(Error::InvalidArgument(format!(
            "radial grid needs at least 2 finite points, got {n_r}"
        )));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radial scale must be positive, got {scale}"
        )));
    }
    let cheb = chebyshev(n_r + 1)?;
    let y = cheb.points;
    let r = y
        .iter()
        .map(|&y| {
            if y == 1.0 {
                f64::INFINITY
            } else {
                scale * (1.0 + y) / (1.0 - y) + 1.0
            }
        })
        .collect();
    let factor: Vec<f64> = y.iter().map(|&y| (1.0 - y).powi(2) / (2.0 * scale)).collect();
    let d_r = scale_rows(&factor, &cheb.d)?;
    Ok(RadialGrid { scale, y, r, d_r })
}

/// Spherical (r, θ) tensor grid with azimuthal symmetry and the operator
/// bundle used by the colloid problem.
///
/// Grid functions are flattened with θ as the slow index and r as the fast
/// one: full index `k (n_r + 1) + i`, finite index `k n_r + (i - 1)`.
/// Within each radial line the first full entry is the point at infinity and
/// the last entry is the surface point.
///
/// Operators without a suffix act on the full grid; `_f` and `_inf` blocks
/// read from finite and infinite points respectively. Divergence and
/// Laplacian blocks write to interior (finite, off-surface) points, gradient
/// blocks write to all finite points, and normal-derivative blocks write to
/// surface points.
#[derive(Debug, Clone)]
pub struct SphericalGrid {
    pub n_r: usize,
    pub n_t: usize,
    pub radial: RadialGrid,
    pub polar: PolarGrid,

    pub div_r: OperatorMatrix,
    pub div_theta: OperatorMatrix,
    pub grad_r: OperatorMatrix,
    pub grad_theta: OperatorMatrix,
    pub laplacian: OperatorMatrix,
    /// Normal derivative at the surface, `-(I ⊗ d_r[surface row])`.
    pub normal: OperatorMatrix,
    /// Surface divergence `diag(1/sin θ) d_θ diag(sin θ) / r_s`.
    pub div_s: OperatorMatrix,
    /// Surface gradient `d_θ / r_s`.
    pub grad_s: OperatorMatrix,

    /// Finite points within the full grid.
    pub finite: IndexSubset,
    /// Interior points within the full grid.
    pub interior: IndexSubset,
    /// Points at infinity within the full grid.
    pub infinity: IndexSubset,
    /// Surface points within the finite grid.
    pub surface: IndexSubset,
    /// Interior points within the finite grid.
    pub interior_f: IndexSubset,

    pub grad_r_f: OperatorMatrix,
    pub grad_theta_f: OperatorMatrix,
    pub div_r_f: OperatorMatrix,
    pub div_theta_f: OperatorMatrix,
    pub div_r_inf: OperatorMatrix,
    pub div_theta_inf: OperatorMatrix,
    pub lap_f: OperatorMatrix,
    pub lap_inf: OperatorMatrix,
    pub normal_f: OperatorMatrix,
    pub normal_inf: OperatorMatrix,
    /// Normal derivative columns belonging to surface unknowns.
    pub normal_s: OperatorMatrix,
    /// Normal derivative columns belonging to interior unknowns.
    pub normal_i: OperatorMatrix,

    pub cos_theta: Vec<f64>,
    pub sin_theta: Vec<f64>,
    /// `cos θ` at every finite point.
    pub cos_theta_f: Vec<f64>,
    /// `sin θ` at every finite point.
    pub sin_theta_f: Vec<f64>,
}

impl SphericalGrid {
    pub fn full_len(&self) -> usize {
        self.n_t * (self.n_r + 1)
    }

    pub fn finite_len(&self) -> usize {
        self.n_t * self.n_r
    }

    pub fn interior_len(&self) -> usize {
        self.n_t * (self.n_r - 1)
    }

    /// `(r, θ)` of every finite point in finite-vector order.
    pub fn finite_coordinates(&self) -> Vec<(f64, f64)> {
        self.finite
            .indices()
            .iter()
            .map(|&idx| {
                let (k, i) = (idx / (self.n_r + 1), idx % (self.n_r + 1));
                (self.radial.r[i], self.polar.theta[k])
            })
            .collect()
    }
}

/// Reset the diagonal so every row sums to zero, as it does exactly for an
/// operator that annihilates constants.
fn zero_row_sums(a: OperatorMatrix) -> OperatorMatrix {
    let mut m = a.to_dense();
    for i in 0..m.rows() {
        let off: f64 = m.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).sum();
        m.set(i, i, -off);
    }
    OperatorMatrix::Dense(m)
}

pub fn spherical_operators(n_r: usize, n_t: usize, scale: f64) -> Result<SphericalGrid> {
    let radial = rational_radial_grid(n_r, scale)?;
    let polar = polar_grid(n_t)?;
    let nr1 = n_r + 1;
    let full = n_t * nr1;

    let inv_r = radial.inverse_r();
    let two_over_r: Vec<f64> = inv_r.iter().map(|v| 2.0 * v).collect();
    let inv_r2: Vec<f64> = inv_r.iter().map(|v| v * v).collect();
    let sin_t: Vec<f64> = polar.theta.iter().map(|t| t.sin()).collect();
    let cos_t: Vec<f64> = polar.theta.iter().map(|t| t.cos()).collect();
    let inv_sin: Vec<f64> = sin_t.iter().map(|s| 1.0 / s).collect();

    let eye_t = OperatorMatrix::identity(n_t);
    let d_r = &radial.d_r;
    let d_t = &polar.d_theta;
    // diag(1/sin θ) d_θ diag(sin θ)
    let sin_div = scale_rows(&inv_sin, &scale_cols(d_t, &sin_t)?)?;

    let div_r = kron(&eye_t, &diag(&two_over_r).add(d_r)?)?;
    let div_theta = kron(&sin_div, &diag(&inv_r))?;
    let grad_r = kron(&eye_t, d_r)?;
    let grad_theta = kron(d_t, &diag(&inv_r))?;
    let radial_lap = zero_row_sums(scale_rows(&two_over_r, d_r)?.add(&d_r.matmul(d_r)?)?);
    let polar_lap = zero_row_sums(sin_div.matmul(d_t)?);
    let laplacian = kron(&eye_t, &radial_lap)?.add(&kron(&polar_lap, &diag(&inv_r2))?)?;

    let surface_row = OperatorMatrix::Dense(DenseMatrix::new(1, nr1, d_r.row_dense(n_r))?);
    let normal = kron(&eye_t, &surface_row)?.scaled(-1.0);
    let r_s = radial.r[n_r];
    let div_s = sin_div.scaled(1.0 / r_s);
    let grad_s = d_t.scaled(1.0 / r_s);

    let finite = IndexSubset::new(
        (0..n_t).flat_map(|k| (1..=n_r).map(move |i| k * nr1 + i)).collect(),
        full,
    )?;
    let interior = IndexSubset::new(
        (0..n_t).flat_map(|k| (1..n_r).map(move |i| k * nr1 + i)).collect(),
        full,
    )?;
    let infinity = IndexSubset::new((0..n_t).map(|k| k * nr1).collect(), full)?;
    let surface = IndexSubset::new((0..n_t).map(|k| k * n_r + n_r - 1).collect(), n_t * n_r)?;
    let interior_f = IndexSubset::new(
        (0..n_t).flat_map(|k| (0..n_r - 1).map(move |i| k * n_r + i)).collect(),
        n_t * n_r,
    )?;
    let all_t = IndexSubset::full(n_t);

    let normal_f = restrict_operator(&normal, &finite, &all_t)?;
    let normal_inf = restrict_operator(&normal, &infinity, &all_t)?;
    let normal_s = restrict_operator(&normal_f, &surface, &all_t)?;
    let normal_i = restrict_operator(&normal_f, &interior_f, &all_t)?;

    Ok(SphericalGrid {
        n_r,
        n_t,
        grad_r_f: restrict_operator(&grad_r, &finite, &finite)?,
        grad_theta_f: restrict_operator(&grad_theta, &finite, &finite)?,
        div_r_f: restrict_operator(&div_r, &finite, &interior)?,
        div_theta_f: restrict_operator(&div_theta, &finite, &interior)?,
        div_r_inf: restrict_operator(&div_r, &infinity, &interior)?,
        div_theta_inf: restrict_operator(&div_theta, &infinity, &interior)?,
        lap_f: restrict_operator(&laplacian, &finite, &interior)?,
        lap_inf: restrict_operator(&laplacian, &infinity, &interior)?,
        normal_f,
        normal_inf,
        normal_s,
        normal_i,
        cos_theta_f: cos_t.iter().flat_map(|&c| std::iter::repeat(c).take(n_r)).collect(),
        sin_theta_f: sin_t.iter().flat_map(|&s| std::iter::repeat(s).take(n_r)).collect(),
        cos_theta: cos_t,
        sin_theta: sin_t,
        radial,
        polar,
        div_r,
        div_theta,
        grad_r,
        grad_theta,
        laplacian,
        normal,
        div_s,
        grad_s,
        finite,
        interior,
        infinity,
        surface,
        interior_f,
    })
}
