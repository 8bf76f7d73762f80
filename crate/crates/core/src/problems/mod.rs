//! The worked systems: thin film (plain and mapped), the metal colloid
//! sphere and one PNP time step.

mod colloid;
mod pnp1d;
mod thinfilm;
mod zeta;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::GridFunction;
use crate::newton::ProblemDef;

pub use colloid::{Colloid, ColloidConfig, ColloidState};
pub use pnp1d::{Pnp1d, PnpConfig};
pub use thinfilm::{ThinFilm, ThinFilmConfig, ThinFilmState};
pub use zeta::{zeta_sensitivities, zeta_solve, ZetaTolerances};

/// Registered problem names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    ThinFilm,
    ThinFilmMapped,
    Colloid,
    Pnp1d,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] = [Self::ThinFilm, Self::ThinFilmMapped, Self::Colloid, Self::Pnp1d];

    pub fn name(self) -> &'static str {
        match self {
            Self::ThinFilm => "thinfilm",
            Self::ThinFilmMapped => "thinfilm-mapped",
            Self::Colloid => "colloid",
            Self::Pnp1d => "pnp1d",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidArgument(format!("unknown problem `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// Smooth deterministic perturbations `base + amp·sin(kπt + k)` of a base
/// state, `t` running over `[0, 1]` along the vector, for Jacobian checks.
pub fn perturbed_states(base: &[f64], amplitude: f64, count: usize) -> Vec<GridFunction> {
    let n = base.len().max(2) as f64;
    (1..=count)
        .map(|k| {
            let k = k as f64;
            base.iter()
                .enumerate()
                .map(|(i, b)| {
                    let t = i as f64 / (n - 1.0);
                    b + amplitude * (k * std::f64::consts::PI * t + k).sin()
                })
                .collect()
        })
        .collect()
}

impl ThinFilm {
    /// The initial iterate and two perturbations of it.
    pub fn test_states(&self) -> Vec<GridFunction> {
        let u0 = self.initial_iterate();
        let scale = 0.1 * u0.norm_inf().max(1.0);
        let mut out = vec![u0.clone()];
        out.extend(perturbed_states(&u0, scale, 2));
        out
    }
}

impl Colloid {
    /// Positive concentrations and non-trivial potentials around the quiescent state.
    pub fn test_states(&self) -> Vec<GridFunction> {
        let nf = self.grid().finite_len();
        let u0 = self.initial_iterate();
        perturbed_states(&u0, 0.3, 3)
            .into_iter()
            .enumerate()
            .map(|(k, mut u)| {
                for (i, v) in u[nf..].iter_mut().enumerate() {
                    *v += 0.2 * ((k + 2) as f64 * 0.37 * i as f64).cos();
                }
                u
            })
            .collect()
    }
}

impl Pnp1d {
    /// The start of the step and two perturbations of it.
    pub fn test_states(&self) -> Vec<GridFunction> {
        let u0 = self.initial_iterate();
        let mut out = vec![u0.clone()];
        out.extend(perturbed_states(&u0, 0.1, 2));
        out
    }
}

/// Any registered problem behind one type, for dispatch by name.
#[derive(Debug, Clone)]
pub enum AnyProblem {
    ThinFilm(ThinFilm),
    Colloid(Colloid),
    Pnp1d(Pnp1d),
}

impl AnyProblem {
    fn inner(&self) -> &dyn ProblemDef {
        match self {
            Self::ThinFilm(p) => p,
            Self::Colloid(p) => p,
            Self::Pnp1d(p) => p,
        }
    }

    pub fn test_states(&self) -> Vec<GridFunction> {
        match self {
            Self::ThinFilm(p) => p.test_states(),
            Self::Colloid(p) => p.test_states(),
            Self::Pnp1d(p) => p.test_states(),
        }
    }

    pub fn initial_iterate(&self) -> GridFunction {
        match self {
            Self::ThinFilm(p) => p.initial_iterate(),
            Self::Colloid(p) => p.initial_iterate(),
            Self::Pnp1d(p) => p.initial_iterate(),
        }
    }
}

impl ProblemDef for AnyProblem {
    fn name(&self) -> &str {
        self.inner().name()
    }

    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn residual(&self, u: &[f64]) -> Result<GridFunction> {
        self.inner().residual(u)
    }

    fn jacobian(&self, u: &[f64]) -> Result<crate::matrix::OperatorMatrix> {
        self.inner().jacobian(u)
    }

    fn row_blocks(&self) -> Vec<(String, usize)> {
        self.inner().row_blocks()
    }

    fn col_blocks(&self) -> Vec<(String, usize)> {
        self.inner().col_blocks()
    }
}
