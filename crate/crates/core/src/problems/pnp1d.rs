use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::discretization::chebyshev;
use crate::error::{Error, Result};
use crate::matrix::{
    block_matrix, check_len, factorize, scale_cols, scale_rows, DenseMatrix, Factorization, GridFunction,
    IndexSubset, OperatorMatrix,
};
use crate::newton::ProblemDef;
use crate::opexpr::{jacobian_blocks, Environment, Expr};

/// One backward-Euler step of the 1D Poisson-Nernst-Planck system with
/// Dirichlet data at both ends (`x = 1` first).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PnpConfig {
    pub n: usize,
    pub epsilon: f64,
    pub dt: f64,
    /// `φ` at `x = 1` and `x = -1`.
    pub phi_bc: (f64, f64),
    pub c_plus_bc: (f64, f64),
    pub c_minus_bc: (f64, f64),
}

impl Default for PnpConfig {
    fn default() -> Self {
        Self {
            n: 32,
            epsilon: 0.1,
            dt: 0.01,
            phi_bc: (1.0, 0.0),
            c_plus_bc: (1.0, 1.0),
            c_minus_bc: (1.0, 1.0),
        }
    }
}

impl PnpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidArgument(format!("PNP needs n ≥ 4, got {}", self.n)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        // dt = 0 is allowed as the degenerate step
        if !(self.dt >= 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be non-negative, got {}", self.dt)));
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Operators {
    x: Vec<f64>,
    d: OperatorMatrix,
    d2: OperatorMatrix,
    interior: IndexSubset,
    /// `(D²)_int`, factorized once.
    d2_int: Factorization,
    /// Interior rows of `D²` restricted to the two boundary columns.
    d2_int_bnd: [Vec<f64>; 2],
}

/// Residual of one implicit time step in the unknowns `[c₊; c₋]`; the
/// potential is eliminated through the interior Poisson solve.
#[derive(Debug, Clone)]
pub struct Pnp1d {
    cfg: PnpConfig,
    ops: Arc<Operators>,
    prev: Arc<(Vec<f64>, Vec<f64>)>,
}

impl Pnp1d {
    /// A step starting from `(c₊, c₋)` at the current time.
    pub fn new(cfg: PnpConfig, c_plus_prev: Vec<f64>, c_minus_prev: Vec<f64>) -> Result<Self> {
        cfg.validate()?;
        check_len("previous c+", cfg.n, c_plus_prev.len())?;
        check_len("previous c-", cfg.n, c_minus_prev.len())?;
        let grid = chebyshev(cfg.n)?;
        let d2 = grid.second_derivative();
        let n = cfg.n;
        let interior = IndexSubset::new((1..n - 1).collect(), n)?;
        let d2_int = DenseMatrix::from_fn(n - 2, n - 2, |i, j| d2.get(i + 1, j + 1));
        let d2_int = factorize(&d2_int.into())?;
        let d2_int_bnd = [
            (1..n - 1).map(|i| d2.get(i, 0)).collect(),
            (1..n - 1).map(|i| d2.get(i, n - 1)).collect(),
        ];
        Ok(Self {
            cfg,
            ops: Arc::new(Operators {
                x: grid.points,
                d: grid.d,
                d2,
                interior,
                d2_int,
                d2_int_bnd,
            }),
            prev: Arc::new((c_plus_prev, c_minus_prev)),
        })
    }

    /// The default smooth charge perturbation around a uniform state, with
    /// values matching the boundary data.
    pub fn perturbed(cfg: PnpConfig, amplitude: f64) -> Result<Self> {
        let x = chebyshev(cfg.n)?.points;
        let lerp = |(a, b): (f64, f64), x: f64| 0.5 * (1.0 + x) * a + 0.5 * (1.0 - x) * b;
        let bump = |x: f64| amplitude * (1.0 - x * x) * (1.0 + 0.5 * x);
        let cp = x.iter().map(|&x| lerp(cfg.c_plus_bc, x) + bump(x)).collect();
        let cm = x.iter().map(|&x| lerp(cfg.c_minus_bc, x) - bump(x)).collect();
        Self::new(cfg, cp, cm)
    }

    pub fn config(&self) -> &PnpConfig {
        &self.cfg
    }

    pub fn x(&self) -> &[f64] {
        &self.ops.x
    }

    pub fn previous(&self) -> (&[f64], &[f64]) {
        (&self.prev.0, &self.prev.1)
    }

    /// Initial iterate for the step: the previous state.
    pub fn initial_iterate(&self) -> GridFunction {
        GridFunction::stack(&[&self.prev.0, &self.prev.1])
    }

    /// The next step, starting from `u = [c₊; c₋]`.
    pub fn advanced(&self, u: &[f64]) -> Result<Self> {
        let (cp, cm) = self.split(u)?;
        Ok(Self {
            cfg: self.cfg,
            ops: self.ops.clone(),
            prev: Arc::new((cp.to_vec(), cm.to_vec())),
        })
    }

    fn split<'a>(&self, u: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
        check_len("PNP state", 2 * self.cfg.n, u.len())?;
        Ok(u.split_at(self.cfg.n))
    }

    /// `φ` from `ε D² φ + (c₊ - c₋) = 0` at interior points with the
    /// Dirichlet values at both ends.
    pub fn potential(&self, c_plus: &[f64], c_minus: &[f64]) -> Result<Vec<f64>> {
        let n = self.cfg.n;
        check_len("c+", n, c_plus.len())?;
        check_len("c-", n, c_minus.len())?;
        let (pl, pr) = self.cfg.phi_bc;
        let [bl, br] = &self.ops.d2_int_bnd;
        let rhs: Vec<f64> = (0..n - 2)
            .map(|i| -(c_plus[i + 1] - c_minus[i + 1]) / self.cfg.epsilon - bl[i] * pl - br[i] * pr)
            .collect();
        let inner = self.ops.d2_int.solve(&rhs)?;
        let mut phi = vec![pl; n];
        phi[n - 1] = pr;
        self.ops.interior.scatter(&inner, &mut phi);
        Ok(phi)
    }

    /// `∂φ/∂c₊`: zero boundary rows and columns around `-(1/ε)(D²)_int⁻¹`.
    /// `∂φ/∂c₋` is its negative.
    pub fn potential_sensitivity(&self) -> Result<DenseMatrix> {
        let n = self.cfg.n;
        let inv = self.ops.d2_int.solve_columns(&DenseMatrix::identity(n - 2))?;
        let k = -1.0 / self.cfg.epsilon;
        Ok(DenseMatrix::from_fn(n, n, |i, j| {
            if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                0.0
            } else {
                k * inv.get(i - 1, j - 1)
            }
        }))
    }

    /// Backward-Euler residuals as expressions in `cp`, `cm` and `phi`, with
    /// `phi` left as an independent variable.
    pub fn step_exprs(&self) -> [Expr; 2] {
        let o = &self.ops;
        let d = Arc::new(o.d.clone());
        let d2 = Arc::new(o.d2.clone());
        let dphi = || Expr::matvec("D", d.clone(), Expr::var("phi"));
        let species = |name: &str, sign: f64, prev: &[f64]| {
            let c = Expr::var(name);
            let drift = Expr::matvec("D", d.clone(), c.clone() * dphi());
            Expr::lincomb(vec![
                (1.0, c.clone()),
                (-self.cfg.dt, Expr::matvec("D2", d2.clone(), c)),
                (-self.cfg.dt * sign, drift),
            ])
            .shift(prev.iter().map(|v| -v).collect::<Vec<_>>())
        };
        [species("cp", 1.0, &self.prev.0), species("cm", -1.0, &self.prev.1)]
    }

    /// The Jacobian assembled from the expression engine's blocks in
    /// `(cp, cm, phi)` and the eliminated potential sensitivity.
    pub fn jacobian_via_engine(&self, u: &[f64]) -> Result<OperatorMatrix> {
        let (cp, cm) = self.split(u)?;
        let phi = self.potential(cp, cm)?;
        let env = Environment::new()
            .with("cp", cp.to_vec())
            .with("cm", cm.to_vec())
            .with("phi", phi);
        let jb = jacobian_blocks(&self.step_exprs(), &["cp", "cm", "phi"], &env)?;
        let p: OperatorMatrix = self.potential_sensitivity()?.into();
        let mut rows = Vec::new();
        for i in 0..2 {
            let through_phi = jb.block(i, 2).matmul(&p)?;
            rows.push(vec![
                jb.block(i, 0).add(&through_phi)?,
                jb.block(i, 1).sub(&through_phi)?,
            ]);
        }
        let j = block_matrix(&rows)?.to_dense();
        Ok(self.with_dirichlet_rows(j).into())
    }

    fn with_dirichlet_rows(&self, mut j: DenseMatrix) -> DenseMatrix {
        let n = self.cfg.n;
        for r in [0, n - 1, n, 2 * n - 1] {
            j.row_mut(r).fill(0.0);
            j.set(r, r, 1.0);
        }
        j
    }
}

impl ProblemDef for Pnp1d {
    fn name(&self) -> &str {
        "pnp1d"
    }

    fn dim(&self) -> usize {
        2 * self.cfg.n
    }

    fn residual(&self, u: &[f64]) -> Result<GridFunction> {
        let (cp, cm) = self.split(u)?;
        let n = self.cfg.n;
        let (o, dt) = (&self.ops, self.cfg.dt);
        let phi = self.potential(cp, cm)?;
        let dphi = o.d.apply(&phi)?;
        let species = |c: &[f64], sign: f64, prev: &[f64], bc: (f64, f64)| -> Result<Vec<f64>> {
            let flux: Vec<f64> = c.iter().zip(dphi.iter()).map(|(c, g)| c * g).collect();
            let diff = o.d2.apply(c)?;
            let drift = o.d.apply(&flux)?;
            let mut r: Vec<f64> = (0..n)
                .map(|i| c[i] - dt * (diff[i] + sign * drift[i]) - prev[i])
                .collect();
            r[0] = c[0] - bc.0;
            r[n - 1] = c[n - 1] - bc.1;
            Ok(r)
        };
        let rp = species(cp, 1.0, &self.prev.0, self.cfg.c_plus_bc)?;
        let rm = species(cm, -1.0, &self.prev.1, self.cfg.c_minus_bc)?;
        Ok(GridFunction::stack(&[&rp, &rm]))
    }

    fn jacobian(&self, u: &[f64]) -> Result<OperatorMatrix> {
        let (cp, cm) = self.split(u)?;
        let (o, dt) = (&self.ops, self.cfg.dt);
        let phi = self.potential(cp, cm)?;
        let dphi = o.d.apply(&phi)?;
        // D ∂φ/∂c₊, shared by all four blocks
        let dp = o.d.matmul(&self.potential_sensitivity()?.into())?;
        let ident = OperatorMatrix::identity(self.cfg.n);
        let local = |sign: f64| -> Result<OperatorMatrix> {
            let diag_part = scale_cols(&o.d, &dphi)?;
            ident.linear_combination(1.0, &o.d2.linear_combination(1.0, &diag_part, sign)?, -dt)
        };
        // D diag(c±) D ∂φ/∂c₊
        let coupling = |c: &[f64]| o.d.matmul(&scale_rows(c, &dp)?);
        let kp = coupling(cp)?;
        let km = coupling(cm)?;
        let j = block_matrix(&[
            vec![local(1.0)?.linear_combination(1.0, &kp, -dt)?, kp.scaled(dt)],
            vec![km.scaled(dt), local(-1.0)?.linear_combination(1.0, &km, -dt)?],
        ])?;
        Ok(self.with_dirichlet_rows(j.to_dense()).into())
    }

    fn row_blocks(&self) -> Vec<(String, usize)> {
        vec![("R+".into(), self.cfg.n), ("R-".into(), self.cfg.n)]
    }

    fn col_blocks(&self) -> Vec<(String, usize)> {
        vec![("c+".into(), self.cfg.n), ("c-".into(), self.cfg.n)]
    }
}
