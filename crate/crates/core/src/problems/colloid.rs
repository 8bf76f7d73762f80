use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::discretization::{spherical_operators, SphericalGrid};
use crate::error::{Error, Result};
use crate::matrix::{
    block_matrix, check_len, scale_cols, scale_rows, CsrMatrix, DenseMatrix, GridFunction,
    OperatorMatrix,
};
use crate::newton::{Continuable, ProblemDef};

use super::zeta::{zeta_sensitivities, zeta_solve, ZetaTolerances};

/// Parameters of the double-layer charging problem for a metal sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColloidConfig {
    /// Finite radial points per line (the point at infinity is extra).
    pub n_r: usize,
    pub n_t: usize,
    pub l_r: f64,
    /// Applied field strength.
    pub e_applied: f64,
    /// Colloid potential.
    pub v: f64,
    pub epsilon: f64,
    /// Stern-layer capacitance parameter.
    pub delta: f64,
    pub c_infinity: f64,
    pub zeta: ZetaTolerances,
}

impl Default for ColloidConfig {
    fn default() -> Self {
        Self {
            n_r: 30,
            n_t: 30,
            l_r: 0.5,
            e_applied: 10.0,
            v: 0.0,
            epsilon: 0.01,
            delta: 1.0,
            c_infinity: 1.0,
            zeta: ZetaTolerances::default(),
        }
    }
}

impl ColloidConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n_r < 3 || self.n_t < 2 {
            return bad(format!("colloid grid needs n_r ≥ 3 and n_t ≥ 2, got {} x {}", self.n_r, self.n_t));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.delta >= 0.0) {
            return bad(format!("delta must be non-negative, got {}", self.delta));
        }
        if !(self.c_infinity > 0.0) {
            return bad(format!("c_infinity must be positive, got {}", self.c_infinity));
        }
        if !(self.l_r > 0.0) {
            return bad(format!("radial scale must be positive, got {}", self.l_r));
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Operators {
    grid: SphericalGrid,
    /// `-D_r^∞ cos θ + D_θ^∞ sin θ`, to be scaled by `E c_∞`.
    div_inf_field: Vec<f64>,
    /// `G_n^∞ 1`
    normal_inf_ones: Vec<f64>,
}

/// Electroneutral bulk transport around a metal sphere in an applied field,
/// closed by double-layer surface conditions.
///
/// Unknowns are `[c; ψ]` over the finite grid points (θ slow, r fast, the
/// surface point last on every radial line). Residual rows are
/// `[F1; F2; H1; H2]`: bulk equations at interior points, then the two
/// surface conditions.
#[derive(Debug, Clone)]
pub struct Colloid {
    cfg: ColloidConfig,
    ops: Arc<Operators>,
}

/// Surface quantities at a state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColloidState {
    pub c_f: Vec<f64>,
    pub psi_f: Vec<f64>,
    pub c_s: Vec<f64>,
    pub psi_s: Vec<f64>,
    /// `ψ_s - E cos θ`
    pub phi_s: Vec<f64>,
    pub zeta: Vec<f64>,
    /// Excess charge `-2√c sinh(ζ/2)`.
    pub q: Vec<f64>,
    /// Excess concentration `4√c sinh²(ζ/4)`.
    pub w: Vec<f64>,
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl Colloid {
    pub fn new(cfg: ColloidConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = spherical_operators(cfg.n_r, cfg.n_t, cfg.l_r)?;
        let ones_t = vec![1.0; cfg.n_t];
        let minus_cos: Vec<f64> = grid.cos_theta.iter().map(|c| -c).collect();
        let div_inf_field = add(
            &grid.div_r_inf.apply(&minus_cos)?,
            &grid.div_theta_inf.apply(&grid.sin_theta)?,
        );
        let normal_inf_ones = grid.normal_inf.apply(&ones_t)?.into_vec();
        Ok(Self {
            cfg,
            ops: Arc::new(Operators {
                grid,
                div_inf_field,
                normal_inf_ones,
            }),
        })
    }

    pub fn config(&self) -> &ColloidConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &SphericalGrid {
        &self.ops.grid
    }

    /// Quiescent start: `c = c_∞`, `ψ = 0`.
    pub fn initial_iterate(&self) -> GridFunction {
        let nf = self.ops.grid.finite_len();
        let mut u = vec![self.cfg.c_infinity; nf];
        u.extend(std::iter::repeat(0.0).take(nf));
        u.into()
    }

    fn split<'a>(&self, u: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
        check_len("colloid state", self.dim(), u.len())?;
        Ok(u.split_at(self.ops.grid.finite_len()))
    }

    pub fn state(&self, u: &[f64]) -> Result<ColloidState> {
        let (c, psi) = self.split(u)?;
        let g = &self.ops.grid;
        let e = self.cfg.e_applied;
        let c_s = g.surface.gather(c);
        if let Some((index, &value)) = c_s.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(Error::NonPositiveConcentration { index, value });
        }
        let psi_s = g.surface.gather(psi);
        let phi_s: Vec<f64> = psi_s.iter().zip(&g.cos_theta).map(|(p, ct)| p - e * ct).collect();
        let drive: Vec<f64> = phi_s.iter().map(|p| self.cfg.v - p).collect();
        let zeta = zeta_solve(&drive, &c_s, self.cfg.delta, &self.cfg.zeta)?;
        let q = zeta
            .iter()
            .zip(&c_s)
            .map(|(z, c)| -2.0 * c.sqrt() * (z / 2.0).sinh())
            .collect();
        let w = zeta
            .iter()
            .zip(&c_s)
            .map(|(z, c)| 4.0 * c.sqrt() * (z / 4.0).sinh().powi(2))
            .collect();
        Ok(ColloidState {
            c_f: c.to_vec(),
            psi_f: psi.to_vec(),
            c_s,
            psi_s,
            phi_s,
            zeta,
            q,
            w,
        })
    }

    /// Full-grid fields (finite points plus the Dirichlet values at infinity),
    /// in full-grid order.
    pub fn full_fields(&self, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (c, psi) = self.split(u)?;
        let g = &self.ops.grid;
        let mut c_full = vec![self.cfg.c_infinity; g.full_len()];
        let mut psi_full = vec![0.0; g.full_len()];
        g.finite.scatter(c, &mut c_full);
        g.finite.scatter(psi, &mut psi_full);
        Ok((c_full, psi_full))
    }

    /// Place an `n_t × n_t` block acting on surface values at the surface
    /// columns of the finite grid, i.e. `M R_s`.
    fn on_surface_columns(&self, m: &DenseMatrix) -> Result<OperatorMatrix> {
        let g = &self.ops.grid;
        let surf = g.surface.indices();
        let mut trips = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for (k, &v) in m.row(i).iter().enumerate() {
                if v != 0.0 {
                    trips.push((i, surf[k], v));
                }
            }
        }
        Ok(OperatorMatrix::Sparse(CsrMatrix::from_triplets(m.rows(), g.finite_len(), trips)?))
    }

    /// `ε D_s (diag(a) + diag(b) G_s diag(s))`, the common shape of every
    /// surface block (the `diag(s)` factor is skipped when `s` is `None`).
    fn surface_block(&self, a: &[f64], b: &[f64], s: Option<&[f64]>) -> Result<DenseMatrix> {
        let g = &self.ops.grid;
        let mut inner = scale_rows(b, &g.grad_s)?;
        if let Some(s) = s {
            inner = scale_cols(&inner, s)?;
        }
        let mut inner = inner.to_dense();
        for (i, v) in a.iter().enumerate() {
            inner.add_at(i, i, *v);
        }
        let mut out = g.div_s.to_dense().matmul(&inner);
        out.scale_in_place(self.cfg.epsilon);
        Ok(out)
    }
}

impl ProblemDef for Colloid {
    fn name(&self) -> &str {
        "colloid"
    }

    fn dim(&self) -> usize {
        2 * self.ops.grid.finite_len()
    }

    fn residual(&self, u: &[f64]) -> Result<GridFunction> {
        let st = self.state(u)?;
        let (o, g) = (&self.ops, &self.ops.grid);
        let (e, c_inf, eps) = (self.cfg.e_applied, self.cfg.c_infinity, self.cfg.epsilon);
        let (c, psi) = (&st.c_f, &st.psi_f);

        // L^f c + c_∞ L^∞ 1, written as L^f (c - c_∞) since the Laplacian
        // annihilates constants; the quiescent state then gives exactly zero
        let dev: Vec<f64> = c.iter().map(|v| v - c_inf).collect();
        let f1 = g.lap_f.apply(&dev)?;

        let flux_r: Vec<f64> = g
            .grad_r_f
            .apply(psi)?
            .iter()
            .zip(&g.cos_theta_f)
            .zip(c)
            .map(|((gp, ct), c)| c * (gp - e * ct))
            .collect();
        let flux_t: Vec<f64> = g
            .grad_theta_f
            .apply(psi)?
            .iter()
            .zip(&g.sin_theta_f)
            .zip(c)
            .map(|((gp, st), c)| c * (gp + e * st))
            .collect();
        let f2 = g
            .div_r_f
            .apply(&flux_r)?
            .axpy(1.0, &g.div_theta_f.apply(&flux_t)?)?
            .axpy(e * c_inf, &o.div_inf_field)?;

        let ln_c: Vec<f64> = st.c_s.iter().map(|c| c.ln()).collect();
        let g_ln = g.grad_s.apply(&ln_c)?;
        let g_phi = g.grad_s.apply(&st.phi_s)?;
        let gn_psi = g.normal_f.apply(psi)?;
        let h1_flux = add(&mul(&st.q, &g_ln), &mul(&st.w, &g_phi));
        let h1: Vec<f64> = g
            .div_s
            .apply(&h1_flux)?
            .iter()
            .enumerate()
            .map(|(k, d)| eps * d - st.c_s[k] * (gn_psi[k] + e * g.cos_theta[k]))
            .collect();
        let h2_flux = add(&mul(&st.w, &g_ln), &mul(&st.q, &g_phi));
        let gn_c = g.normal_f.apply(c)?;
        let h2: Vec<f64> = g
            .div_s
            .apply(&h2_flux)?
            .iter()
            .enumerate()
            .map(|(k, d)| eps * d - gn_c[k] - c_inf * o.normal_inf_ones[k])
            .collect();

        Ok(GridFunction::stack(&[&f1, &f2, &h1, &h2]))
    }

    fn jacobian(&self, u: &[f64]) -> Result<OperatorMatrix> {
        let st = self.state(u)?;
        let g = &self.ops.grid;
        let (e, delta) = (self.cfg.e_applied, self.cfg.delta);
        let (c, psi) = (&st.c_f, &st.psi_f);
        let (ni, nf) = (g.interior_len(), g.finite_len());

        // bulk blocks
        let a_r: Vec<f64> = g
            .grad_r_f
            .apply(psi)?
            .iter()
            .zip(&g.cos_theta_f)
            .map(|(gp, ct)| gp - e * ct)
            .collect();
        let a_t: Vec<f64> = g
            .grad_theta_f
            .apply(psi)?
            .iter()
            .zip(&g.sin_theta_f)
            .map(|(gp, s)| gp + e * s)
            .collect();
        let df2_dc = scale_cols(&g.div_r_f, &a_r)?.add(&scale_cols(&g.div_theta_f, &a_t)?)?;
        let df2_dpsi = g
            .div_r_f
            .matmul(&scale_rows(c, &g.grad_r_f)?)?
            .add(&g.div_theta_f.matmul(&scale_rows(c, &g.grad_theta_f)?)?)?;

        // surface blocks
        let (dz_dpsi, dz_dc) = zeta_sensitivities(&st.zeta, &st.c_s, delta)?;
        let ln_c: Vec<f64> = st.c_s.iter().map(|c| c.ln()).collect();
        let g_ln = g.grad_s.apply(&ln_c)?;
        let g_phi = g.grad_s.apply(&st.phi_s)?;
        let gn_psi = g.normal_f.apply(psi)?;
        let nt = st.c_s.len();
        let sq: Vec<f64> = st.c_s.iter().map(|c| c.sqrt()).collect();
        let ch: Vec<f64> = st.zeta.iter().map(|z| (z / 2.0).cosh()).collect();
        let sh: Vec<f64> = st.zeta.iter().map(|z| (z / 2.0).sinh()).collect();
        let inv_c: Vec<f64> = st.c_s.iter().map(|c| 1.0 / c).collect();
        // ∂q/∂c_s, ∂w/∂c_s, ∂q/∂ψ_s, ∂w/∂ψ_s
        let dq_dc: Vec<f64> = (0..nt).map(|k| 0.5 * st.q[k] * inv_c[k] - sq[k] * ch[k] * dz_dc[k]).collect();
        let dw_dc: Vec<f64> = (0..nt).map(|k| 0.5 * st.w[k] * inv_c[k] + sq[k] * sh[k] * dz_dc[k]).collect();
        let dq_dpsi: Vec<f64> = (0..nt).map(|k| -sq[k] * ch[k] * dz_dpsi[k]).collect();
        let dw_dpsi: Vec<f64> = (0..nt).map(|k| sq[k] * sh[k] * dz_dpsi[k]).collect();

        let h1_c_diag = add(&mul(&dq_dc, &g_ln), &mul(&dw_dc, &g_phi));
        let h1_c = self.surface_block(&h1_c_diag, &st.q, Some(&inv_c))?;
        let mut h1_c_local = h1_c;
        for k in 0..nt {
            h1_c_local.add_at(k, k, -(gn_psi[k] + e * g.cos_theta[k]));
        }
        let dh1_dc = self.on_surface_columns(&h1_c_local)?;

        let h1_psi_diag = add(&mul(&dq_dpsi, &g_ln), &mul(&dw_dpsi, &g_phi));
        let dh1_dpsi = self
            .on_surface_columns(&self.surface_block(&h1_psi_diag, &st.w, None)?)?
            .sub(&scale_rows(&st.c_s, &g.normal_f)?)?;

        let h2_c_diag = add(&mul(&dw_dc, &g_ln), &mul(&dq_dc, &g_phi));
        let dh2_dc = self
            .on_surface_columns(&self.surface_block(&h2_c_diag, &st.w, Some(&inv_c))?)?
            .sub(&g.normal_f)?;

        let h2_psi_diag = add(&mul(&dw_dpsi, &g_ln), &mul(&dq_dpsi, &g_phi));
        let dh2_dpsi = self.on_surface_columns(&self.surface_block(&h2_psi_diag, &st.q, None)?)?;

        block_matrix(&[
            vec![g.lap_f.clone(), OperatorMatrix::zeros(ni, nf)],
            vec![df2_dc, df2_dpsi],
            vec![dh1_dc, dh1_dpsi],
            vec![dh2_dc, dh2_dpsi],
        ])
    }

    fn row_blocks(&self) -> Vec<(String, usize)> {
        let (ni, nt) = (self.ops.grid.interior_len(), self.cfg.n_t);
        vec![("F1".into(), ni), ("F2".into(), ni), ("H1".into(), nt), ("H2".into(), nt)]
    }

    fn col_blocks(&self) -> Vec<(String, usize)> {
        let nf = self.ops.grid.finite_len();
        vec![("c".into(), nf), ("psi".into(), nf)]
    }
}

impl Continuable for Colloid {
    fn parameter_name(&self) -> &str {
        "E"
    }

    fn parameter(&self) -> f64 {
        self.cfg.e_applied
    }

    fn with_parameter(&self, value: f64) -> Self {
        Self {
            cfg: ColloidConfig {
                e_applied: value,
                ..self.cfg
            },
            ops: self.ops.clone(),
        }
    }
}
