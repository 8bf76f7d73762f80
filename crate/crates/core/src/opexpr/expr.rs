use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{GridFunction, OperatorMatrix};

use super::cwise::CwiseFn;

/// A node of an operator-expression tree.
///
/// Children are reference counted, so cloning an expression or reusing a
/// subexpression in several places is cheap.
#[derive(Clone, Debug)]
pub enum Expr {
    Var(String),
    Const(GridFunction),
    /// `op * child`; `label` names the matrix in the debug rendering.
    MatVec {
        label: String,
        op: Arc<OperatorMatrix>,
        child: Arc<Expr>,
    },
    Cwise(CwiseFn, Arc<Expr>),
    Hadamard(Arc<Expr>, Arc<Expr>),
    LinComb(Vec<(f64, Expr)>),
    /// `child + c` for a constant grid function `c`.
    AffineShift(Arc<Expr>, GridFunction),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn constant(v: impl Into<GridFunction>) -> Self {
        Expr::Const(v.into())
    }

    pub fn matvec(label: impl Into<String>, op: Arc<OperatorMatrix>, child: Expr) -> Self {
        Expr::MatVec {
            label: label.into(),
            op,
            child: Arc::new(child),
        }
    }

    pub fn map(self, f: CwiseFn) -> Self {
        Expr::Cwise(f, Arc::new(self))
    }

    pub fn exp(self) -> Self {
        self.map(CwiseFn::Exp)
    }

    pub fn ln(self) -> Self {
        self.map(CwiseFn::Ln)
    }

    pub fn sin(self) -> Self {
        self.map(CwiseFn::Sin)
    }

    pub fn cos(self) -> Self {
        self.map(CwiseFn::Cos)
    }

    pub fn sinh(self) -> Self {
        self.map(CwiseFn::Sinh)
    }

    pub fn cosh(self) -> Self {
        self.map(CwiseFn::Cosh)
    }

    pub fn sqrt(self) -> Self {
        self.map(CwiseFn::Sqrt)
    }

    pub fn powi(self, n: i32) -> Self {
        self.map(CwiseFn::PowI(n))
    }

    pub fn powf(self, p: f64) -> Self {
        self.map(CwiseFn::PowF(p))
    }

    pub fn affine(self, scale: f64, shift: f64) -> Self {
        self.map(CwiseFn::Affine { scale, shift })
    }

    pub fn hadamard(self, other: Expr) -> Self {
        Expr::Hadamard(Arc::new(self), Arc::new(other))
    }

    pub fn shift(self, c: impl Into<GridFunction>) -> Self {
        Expr::AffineShift(Arc::new(self), c.into())
    }

    pub fn lincomb(terms: Vec<(f64, Expr)>) -> Self {
        Expr::LinComb(terms)
    }

    /// Names of the variables appearing in the tree, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(name) => {
                out.insert(name.clone());
            }
            Expr::Const(_) => {}
            Expr::MatVec { child, .. } | Expr::Cwise(_, child) | Expr::AffineShift(child, _) => {
                child.collect_vars(out)
            }
            Expr::Hadamard(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::LinComb(terms) => terms.iter().for_each(|(_, e)| e.collect_vars(out)),
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Expr::Var(v) => v == name,
            Expr::Const(_) => false,
            Expr::MatVec { child, .. } | Expr::Cwise(_, child) | Expr::AffineShift(child, _) => {
                child.contains_var(name)
            }
            Expr::Hadamard(a, b) => a.contains_var(name) || b.contains_var(name),
            Expr::LinComb(terms) => terms.iter().any(|(_, e)| e.contains_var(name)),
        }
    }
}

impl fmt::Display for Expr {
    /// Prefix rendering, e.g. `(* (exp (lin 2*u)) (D u))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(name) => f.write_str(name),
            Expr::Const(c) => write!(f, "const[{}]", c.len()),
            Expr::MatVec { label, child, .. } => write!(f, "({label} {child})"),
            Expr::Cwise(func, child) => write!(f, "({func} {child})"),
            Expr::Hadamard(a, b) => write!(f, "(* {a} {b})"),
            Expr::LinComb(terms) => {
                f.write_str("(lin")?;
                for (k, e) in terms {
                    write!(f, " {k}*{e}")?;
                }
                f.write_str(")")
            }
            Expr::AffineShift(child, c) => write!(f, "(+ {child} const[{}])", c.len()),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::LinComb(vec![(1.0, self), (1.0, rhs)])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::LinComb(vec![(1.0, self), (-1.0, rhs)])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::LinComb(vec![(-1.0, self)])
    }
}

impl Mul<Expr> for f64 {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::LinComb(vec![(self, rhs)])
    }
}

/// Component-wise product.
impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        self.hadamard(rhs)
    }
}

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    vars: HashMap<String, GridFunction>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, value: impl Into<GridFunction>) -> &mut Self {
        self.vars.insert(name.into(), value.into());
        self
    }

    pub fn with(mut self, name: impl Into<String>, value: impl Into<GridFunction>) -> Self {
        self.bind(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Result<&GridFunction> {
        self.vars
            .get(name)
            .ok_or_else(|| Error::UnboundVariable(name.to_string()))
    }
}
