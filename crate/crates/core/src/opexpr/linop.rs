use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{check_len, diag, scale_cols, scale_rows, GridFunction, OperatorMatrix};

/// A Jacobian kept in factored form.
///
/// Diagonal factors are folded into their neighbours as they are composed;
/// products of two general matrices stay lazy until [`LinOp::materialize`].
#[derive(Debug, Clone)]
pub enum LinOp {
    Zero { rows: usize, cols: usize },
    Identity(usize),
    Diag(Vec<f64>),
    Matrix(Arc<OperatorMatrix>),
    /// Factors listed left to right.
    Product(Vec<LinOp>),
    Sum(Vec<(f64, LinOp)>),
}

impl LinOp {
    pub fn rows(&self) -> usize {
        match self {
            LinOp::Zero { rows, .. } => *rows,
            LinOp::Identity(n) => *n,
            LinOp::Diag(d) => d.len(),
            LinOp::Matrix(m) => m.rows(),
            LinOp::Product(f) => f[0].rows(),
            LinOp::Sum(t) => t[0].1.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            LinOp::Zero { cols, .. } => *cols,
            LinOp::Identity(n) => *n,
            LinOp::Diag(d) => d.len(),
            LinOp::Matrix(m) => m.cols(),
            LinOp::Product(f) => f[f.len() - 1].cols(),
            LinOp::Sum(t) => t[0].1.cols(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LinOp::Zero { .. })
    }

    /// `self * rhs` with diagonal folding and zero/identity elimination.
    pub fn compose(self, rhs: LinOp) -> Result<LinOp> {
        check_len("operator composition", self.cols(), rhs.rows())?;
        let (rows, cols) = (self.rows(), rhs.cols());
        Ok(match (self, rhs) {
            (LinOp::Zero { .. }, _) | (_, LinOp::Zero { .. }) => LinOp::Zero { rows, cols },
            (LinOp::Identity(_), r) => r,
            (l, LinOp::Identity(_)) => l,
            (LinOp::Diag(a), LinOp::Diag(b)) => {
                LinOp::Diag(a.iter().zip(&b).map(|(x, y)| x * y).collect())
            }
            (LinOp::Diag(a), LinOp::Matrix(m)) => LinOp::Matrix(Arc::new(scale_rows(&a, &m)?)),
            (LinOp::Matrix(m), LinOp::Diag(b)) => LinOp::Matrix(Arc::new(scale_cols(&m, &b)?)),
            (LinOp::Diag(a), LinOp::Product(mut fs)) => {
                let first = fs.remove(0);
                let head = LinOp::Diag(a).compose(first)?;
                prepend(head, fs)
            }
            (LinOp::Product(mut fs), LinOp::Diag(b)) => {
                let last = fs.pop().expect("non-empty product");
                let tail = last.compose(LinOp::Diag(b))?;
                fs.push(tail);
                LinOp::Product(fs)
            }
            (LinOp::Diag(a), LinOp::Sum(terms)) => LinOp::Sum(
                terms
                    .into_iter()
                    .map(|(k, t)| Ok((k, LinOp::Diag(a.clone()).compose(t)?)))
                    .collect::<Result<_>>()?,
            ),
            (LinOp::Product(mut l), LinOp::Product(r)) => {
                l.extend(r);
                LinOp::Product(l)
            }
            (LinOp::Product(mut l), r) => {
                l.push(r);
                LinOp::Product(l)
            }
            (l, LinOp::Product(r)) => prepend(l, r),
            (l, r) => LinOp::Product(vec![l, r]),
        })
    }

    /// `k * self`.
    pub fn scale(self, k: f64) -> LinOp {
        if k == 1.0 {
            return self;
        }
        match self {
            z @ LinOp::Zero { .. } => z,
            LinOp::Identity(n) => LinOp::Diag(vec![k; n]),
            LinOp::Diag(d) => LinOp::Diag(d.into_iter().map(|v| k * v).collect()),
            LinOp::Matrix(m) => LinOp::Matrix(Arc::new(m.scaled(k))),
            LinOp::Sum(t) => LinOp::Sum(t.into_iter().map(|(c, op)| (k * c, op)).collect()),
            p @ LinOp::Product(_) => LinOp::Sum(vec![(k, p)]),
        }
    }

    /// `Σ k_i A_i`, dropping zero terms.
    pub fn sum(terms: Vec<(f64, LinOp)>, rows: usize, cols: usize) -> Result<LinOp> {
        let mut kept: Vec<(f64, LinOp)> = Vec::with_capacity(terms.len());
        for (k, t) in terms {
            check_len("sum rows", rows, t.rows())?;
            check_len("sum cols", cols, t.cols())?;
            if k != 0.0 && !t.is_zero() {
                kept.push((k, t));
            }
        }
        Ok(match kept.len() {
            0 => LinOp::Zero { rows, cols },
            1 => {
                let (k, t) = kept.pop().unwrap();
                t.scale(k)
            }
            _ => LinOp::Sum(kept),
        })
    }

    /// `self * x` without forming any matrix product.
    pub fn apply(&self, x: &[f64]) -> Result<GridFunction> {
        check_len("operator application", self.cols(), x.len())?;
        Ok(match self {
            LinOp::Zero { rows, .. } => GridFunction::zeros(*rows),
            LinOp::Identity(_) => GridFunction::from(x),
            LinOp::Diag(d) => d.iter().zip(x).map(|(a, b)| a * b).collect(),
            LinOp::Matrix(m) => m.apply(x)?,
            LinOp::Product(fs) => {
                let mut v = GridFunction::from(x);
                for f in fs.iter().rev() {
                    v = f.apply(&v)?;
                }
                v
            }
            LinOp::Sum(terms) => {
                let mut acc = GridFunction::zeros(self.rows());
                for (k, t) in terms {
                    acc = acc.axpy(*k, &t.apply(x)?)?;
                }
                acc
            }
        })
    }

    /// Explicit matrix. Lazy products are multiplied out right to left.
    pub fn materialize(&self) -> Result<OperatorMatrix> {
        Ok(match self {
            LinOp::Zero { rows, cols } => OperatorMatrix::zeros(*rows, *cols),
            LinOp::Identity(n) => OperatorMatrix::identity(*n),
            LinOp::Diag(d) => diag(d),
            LinOp::Matrix(m) => (**m).clone(),
            LinOp::Product(fs) => {
                let mut it = fs.iter().rev();
                let mut acc = it
                    .next()
                    .ok_or_else(|| Error::InvalidArgument("empty product".into()))?
                    .materialize()?;
                for f in it {
                    acc = match f {
                        LinOp::Diag(d) => scale_rows(d, &acc)?,
                        other => other.materialize()?.matmul(&acc)?,
                    };
                }
                acc
            }
            LinOp::Sum(terms) => {
                let mut acc = OperatorMatrix::zeros(self.rows(), self.cols());
                for (k, t) in terms {
                    acc = acc.linear_combination(1.0, &t.materialize()?, *k)?;
                }
                acc
            }
        })
    }
}

fn prepend(head: LinOp, rest: Vec<LinOp>) -> LinOp {
    if rest.is_empty() {
        return head;
    }
    let mut fs = match head {
        LinOp::Product(h) => h,
        h => vec![h],
    };
    fs.extend(rest);
    LinOp::Product(fs)
}
