use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A user-supplied component-wise function with its derivative.
///
/// Nothing checks that `df` is the derivative of `f`.
pub struct CustomFn {
    pub name: String,
    pub f: Box<ScalarFn>,
    pub df: Box<ScalarFn>,
}

/// Component-wise functions with analytical derivatives.
#[derive(Clone)]
pub enum CwiseFn {
    Exp,
    Ln,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
    PowI(i32),
    PowF(f64),
    /// `scale * x + shift`
    Affine { scale: f64, shift: f64 },
    Custom(Arc<CustomFn>),
}

impl CwiseFn {
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CwiseFn::Custom(Arc::new(CustomFn {
            name: name.into(),
            f: Box::new(f),
            df: Box::new(df),
        }))
    }

    pub fn name(&self) -> &str {
        match self {
            CwiseFn::Exp => "exp",
            CwiseFn::Ln => "ln",
            CwiseFn::Sin => "sin",
            CwiseFn::Cos => "cos",
            CwiseFn::Sinh => "sinh",
            CwiseFn::Cosh => "cosh",
            CwiseFn::Sqrt => "sqrt",
            CwiseFn::PowI(_) => "powi",
            CwiseFn::PowF(_) => "powf",
            CwiseFn::Affine { .. } => "affine",
            CwiseFn::Custom(c) => &c.name,
        }
    }

    fn check_domain(&self, index: usize, x: f64) -> Result<()> {
        let ok = match self {
            CwiseFn::Ln | CwiseFn::Sqrt => x > 0.0,
            CwiseFn::PowF(p) => x > 0.0 || (x == 0.0 && *p >= 1.0),
            CwiseFn::PowI(n) => *n >= 0 || x != 0.0,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain {
                func: match self {
                    CwiseFn::Ln => "ln",
                    CwiseFn::Sqrt => "sqrt",
                    CwiseFn::PowF(_) => "powf",
                    _ => "powi",
                },
                index,
                value: x,
            })
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            CwiseFn::Exp => x.exp(),
            CwiseFn::Ln => x.ln(),
            CwiseFn::Sin => x.sin(),
            CwiseFn::Cos => x.cos(),
            CwiseFn::Sinh => x.sinh(),
            CwiseFn::Cosh => x.cosh(),
            CwiseFn::Sqrt => x.sqrt(),
            CwiseFn::PowI(n) => x.powi(*n),
            CwiseFn::PowF(p) => x.powf(*p),
            CwiseFn::Affine { scale, shift } => scale * x + shift,
            CwiseFn::Custom(c) => (c.f)(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            CwiseFn::Exp => x.exp(),
            CwiseFn::Ln => 1.0 / x,
            CwiseFn::Sin => x.cos(),
            CwiseFn::Cos => -x.sin(),
            CwiseFn::Sinh => x.cosh(),
            CwiseFn::Cosh => x.sinh(),
            CwiseFn::Sqrt => 0.5 / x.sqrt(),
            CwiseFn::PowI(0) => 0.0,
            CwiseFn::PowI(n) => *n as f64 * x.powi(n - 1),
            CwiseFn::PowF(p) => p * x.powf(p - 1.0),
            CwiseFn::Affine { scale, .. } => *scale,
            CwiseFn::Custom(c) => (c.df)(x),
        }
    }

    /// `f` applied to every component, with domain checks.
    pub fn apply(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter()
            .enumerate()
            .map(|(i, &x)| self.check_domain(i, x).map(|_| self.value(x)))
            .collect()
    }

    /// `f'` applied to every component, with domain checks.
    pub fn apply_derivative(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter()
            .enumerate()
            .map(|(i, &x)| self.check_domain(i, x).map(|_| self.derivative(x)))
            .collect()
    }
}

impl fmt::Display for CwiseFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CwiseFn::PowI(n) => write!(f, "pow{n}"),
            CwiseFn::PowF(p) => write!(f, "pow{p}"),
            CwiseFn::Affine { scale, shift } => write!(f, "affine[{scale},{shift}]"),
            other => f.write_str(other.name()),
        }
    }
}

impl fmt::Debug for CwiseFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
