use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::discretization::{chebyshev, chebyshev_coefficients, mapped_thinfilm_grid};
use crate::error::{Error, Result};
use crate::matrix::{check_len, scale_cols, DenseMatrix, GridFunction, OperatorMatrix};
use crate::newton::{Continuable, ProblemDef};
use crate::opexpr::Expr;

/// Parameters of the electrochemical thin-film problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThinFilmConfig {
    pub n: usize,
    pub epsilon: f64,
    pub k_c: f64,
    pub j_r: f64,
    /// Current density.
    pub j: f64,
    /// Mapping parameter; `None` uses the plain Chebyshev grid.
    pub beta: Option<f64>,
}

impl Default for ThinFilmConfig {
    fn default() -> Self {
        Self {
            n: 100,
            epsilon: 0.01,
            k_c: 10.0,
            j_r: 10.0,
            j: 1.5,
            beta: None,
        }
    }
}

impl ThinFilmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidArgument(format!("thin film needs n ≥ 4, got {}", self.n)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidArgument(format!("beta must lie in (0, 1), got {b}")));
            }
        }
        Ok(())
    }
}

/// Grid data shared by every member of a continuation family.
#[derive(Debug)]
struct Operators {
    /// Physical coordinates.
    x: Vec<f64>,
    /// `dy/dx`; all ones on the plain grid.
    gamma: Vec<f64>,
    /// Clenshaw-Curtis weights in the computational coordinate.
    w: Vec<f64>,
    /// Computational derivative `D`.
    d: OperatorMatrix,
    /// `L diag(γ)` with `L` the second derivative in `x`.
    lap_g: DenseMatrix,
    /// First and last rows of `D diag(γ)`.
    d_first: Vec<f64>,
    d_last: Vec<f64>,
}

/// The thin-film boundary-value problem for the electric field.
///
/// Unknowns are `E` at the Chebyshev points (`x_1 = 1` first). With a mapping
/// the unknown is the computational field and the physical field is `γ .* E`.
#[derive(Debug, Clone)]
pub struct ThinFilm {
    cfg: ThinFilmConfig,
    ops: Arc<Operators>,
}

/// Derived quantities at a solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinFilmState {
    pub x: Vec<f64>,
    /// Physical electric field.
    pub e: Vec<f64>,
    pub c0: f64,
    /// Average concentration `c0 + j(x+1) + 2ε²E²`.
    pub c: Vec<f64>,
    /// Charge density `4ε² dE/dx`.
    pub rho: Vec<f64>,
}

impl ThinFilm {
    pub fn new(cfg: ThinFilmConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n;
        let (x, gamma, w, d, lap) = match cfg.beta {
            None => {
                let g = chebyshev(n)?;
                let lap = g.second_derivative();
                let w = g.weights.clone().expect("Chebyshev grids carry weights");
                (g.points, vec![1.0; n], w, g.d, lap)
            }
            Some(beta) => {
                let g = mapped_thinfilm_grid(n, beta)?;
                (g.x, g.gamma, g.weights, g.d, g.l_mapped)
            }
        };
        let lap_g = scale_cols(&lap, &gamma)?.to_dense();
        let d_first: Vec<f64> = d.row_dense(0).iter().zip(&gamma).map(|(a, g)| a * g).collect();
        let d_last: Vec<f64> = d.row_dense(n - 1).iter().zip(&gamma).map(|(a, g)| a * g).collect();
        Ok(Self {
            cfg,
            ops: Arc::new(Operators {
                x,
                gamma,
                w,
                d,
                lap_g,
                d_first,
                d_last,
            }),
        })
    }

    pub fn config(&self) -> &ThinFilmConfig {
        &self.cfg
    }

    pub fn x(&self) -> &[f64] {
        &self.ops.x
    }

    pub fn gamma(&self) -> &[f64] {
        &self.ops.gamma
    }

    pub fn weights(&self) -> &[f64] {
        &self.ops.w
    }

    /// Leading-order iterate `E = -2j / (j(x+1) + 1 - j)` used to start continuation.
    pub fn initial_iterate(&self) -> GridFunction {
        let j = self.cfg.j;
        let c0 = 1.0 - j;
        self.ops.x.iter().map(|x| -2.0 * j / (j * (x + 1.0) + c0)).collect()
    }

    /// The scalar `c0 = 1 - j + ε²(2γ₁E₁ - 2γ_N E_N - w·(γE²))`.
    pub fn c0(&self, e: &[f64]) -> f64 {
        let (o, eps2, n) = (&self.ops, self.cfg.epsilon.powi(2), e.len());
        let integral: f64 = o.w.iter().zip(&o.gamma).zip(e).map(|((w, g), e)| w * g * e * e).sum();
        1.0 - self.cfg.j + eps2 * (2.0 * o.gamma[0] * e[0] - 2.0 * o.gamma[n - 1] * e[n - 1] - integral)
    }

    /// Physical field `γ .* E`.
    pub fn physical_field(&self, e: &[f64]) -> Vec<f64> {
        self.ops.gamma.iter().zip(e).map(|(g, e)| g * e).collect()
    }

    pub fn state(&self, e: &[f64]) -> Result<ThinFilmState> {
        check_len("thin-film field", self.cfg.n, e.len())?;
        let (o, eps2, j) = (&self.ops, self.cfg.epsilon.powi(2), self.cfg.j);
        let c0 = self.c0(e);
        let ep = self.physical_field(e);
        let dep = o.d.apply(&ep)?;
        Ok(ThinFilmState {
            c: o.x.iter().zip(&ep).map(|(x, e)| c0 + j * (x + 1.0) + 2.0 * eps2 * e * e).collect(),
            rho: dep.iter().zip(&o.gamma).map(|(d, g)| 4.0 * eps2 * g * d).collect(),
            x: o.x.clone(),
            e: ep,
            c0,
        })
    }

    /// Chebyshev coefficient magnitudes of the unknown (computational) field.
    pub fn coefficients(&self, e: &[f64]) -> Result<Vec<f64>> {
        chebyshev_coefficients(e)
    }

    /// The interior residual as an operator expression in the variable `E`,
    /// with `Ĉ₀ = (1-j) + ε²(B E - Q (γ .* E.^2))` built from the boundary
    /// selector `B` (every row `[2γ₁, 0, …, 0, -2γ_N]`) and the quadrature
    /// matrix `Q`. Rows 1 and N of its value differ from the residual, which
    /// replaces them by boundary conditions.
    pub fn interior_expr(&self) -> Expr {
        let (o, n, eps2, j) = (&self.ops, self.cfg.n, self.cfg.epsilon.powi(2), self.cfg.j);
        let e = || Expr::var("E");
        let gamma = || Expr::constant(o.gamma.clone());
        let b = DenseMatrix::from_fn(n, n, |_, k| {
            if k == 0 {
                2.0 * o.gamma[0]
            } else if k == n - 1 {
                -2.0 * o.gamma[n - 1]
            } else {
                0.0
            }
        });
        let q = DenseMatrix::from_fn(n, n, |_, k| o.w[k]);
        let c0 = Expr::lincomb(vec![
            (eps2, Expr::matvec("B", Arc::new(b.into()), e())),
            (-eps2, Expr::matvec("Q", Arc::new(q.into()), gamma() * e().powi(2))),
        ])
        .shift(vec![1.0 - j; n]);
        let xj: Vec<f64> = o.x.iter().map(|x| j * (x + 1.0)).collect();
        let lap = Expr::matvec("L", Arc::new(o.lap_g.clone().into()), e());
        let cubic = gamma().powi(3) * e().powi(3);
        Expr::lincomb(vec![
            (eps2, lap),
            (-0.5 * eps2, cubic),
            (-0.25, c0.shift(xj) * gamma() * e()),
        ])
        .shift(vec![-0.25 * j; n])
    }
}

impl ProblemDef for ThinFilm {
    fn name(&self) -> &str {
        if self.cfg.beta.is_some() {
            "thinfilm-mapped"
        } else {
            "thinfilm"
        }
    }

    fn dim(&self) -> usize {
        self.cfg.n
    }

    fn residual(&self, e: &[f64]) -> Result<GridFunction> {
        check_len("thin-film field", self.cfg.n, e.len())?;
        let (o, n) = (&self.ops, self.cfg.n);
        let (eps2, j, k_c, j_r) = (self.cfg.epsilon.powi(2), self.cfg.j, self.cfg.k_c, self.cfg.j_r);
        let c0 = self.c0(e);
        let mut lap = vec![0.0; n];
        o.lap_g.matvec_into(e, &mut lap);
        let mut res: Vec<f64> = (0..n)
            .map(|i| {
                let g = o.gamma[i];
                eps2 * (lap[i] - 0.5 * g.powi(3) * e[i].powi(3))
                    - 0.25 * (c0 + j * (o.x[i] + 1.0)) * g * e[i]
                    - 0.25 * j
            })
            .collect();
        let dot = |row: &[f64]| row.iter().zip(e).map(|(a, b)| a * b).sum::<f64>();
        let (g1, gn) = (o.gamma[0], o.gamma[n - 1]);
        res[0] = -k_c * (c0 + 2.0 * j + eps2 * (2.0 * (g1 * e[0]).powi(2) + 4.0 * g1 * dot(&o.d_first)))
            + j_r
            - j;
        res[n - 1] = k_c * (c0 + eps2 * (2.0 * (gn * e[n - 1]).powi(2) + 4.0 * gn * dot(&o.d_last)))
            - j_r
            - j;
        Ok(res.into())
    }

    /// Dense Jacobian assembled row by row: `ε² L diag(γ)` minus a diagonal
    /// minus the rank-one `c0` coupling, with the two boundary rows replaced.
    fn jacobian(&self, e: &[f64]) -> Result<OperatorMatrix> {
        check_len("thin-film field", self.cfg.n, e.len())?;
        let (o, n) = (&self.ops, self.cfg.n);
        let (eps2, j, k_c) = (self.cfg.epsilon.powi(2), self.cfg.j, self.cfg.k_c);
        let c0 = self.c0(e);
        let mut dc0: Vec<f64> = (0..n).map(|k| -2.0 * eps2 * o.w[k] * o.gamma[k] * e[k]).collect();
        dc0[0] += 2.0 * eps2 * o.gamma[0];
        dc0[n - 1] -= 2.0 * eps2 * o.gamma[n - 1];

        let mut jac = DenseMatrix::zeros(n, n);
        for i in 1..n - 1 {
            let g = o.gamma[i];
            let ge = 0.25 * g * e[i];
            let row = jac.row_mut(i);
            for (k, r) in row.iter_mut().enumerate() {
                *r = eps2 * o.lap_g.get(i, k) - ge * dc0[k];
            }
            row[i] -= 1.5 * eps2 * g.powi(3) * e[i] * e[i] + 0.25 * g * (c0 + j * (o.x[i] + 1.0));
        }
        let (g1, gn) = (o.gamma[0], o.gamma[n - 1]);
        for (k, r) in jac.row_mut(0).iter_mut().enumerate() {
            *r = -k_c * (dc0[k] + 4.0 * eps2 * g1 * o.d_first[k]);
        }
        jac.add_at(0, 0, -4.0 * k_c * eps2 * g1 * g1 * e[0]);
        for (k, r) in jac.row_mut(n - 1).iter_mut().enumerate() {
            *r = k_c * (dc0[k] + 4.0 * eps2 * gn * o.d_last[k]);
        }
        jac.add_at(n - 1, n - 1, 4.0 * k_c * eps2 * gn * gn * e[n - 1]);
        Ok(OperatorMatrix::Dense(jac))
    }
}

impl Continuable for ThinFilm {
    fn parameter_name(&self) -> &str {
        "j"
    }

    fn parameter(&self) -> f64 {
        self.cfg.j
    }

    fn with_parameter(&self, value: f64) -> Self {
        Self {
            cfg: ThinFilmConfig { j: value, ..self.cfg },
            ops: self.ops.clone(),
        }
    }
}
