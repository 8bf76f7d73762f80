use std::io::{self, Write};

use crate::error::{Error, Result};

use super::dense::DenseMatrix;
use super::grid_function::{check_len, GridFunction};
use super::sparse::CsrMatrix;
use super::subset::IndexSubset;

/// A discrete linear operator: differentiation, quadrature, restriction, or a
/// Jacobian block.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorMatrix {
    Dense(DenseMatrix),
    Sparse(CsrMatrix),
}

impl From<DenseMatrix> for OperatorMatrix {
    fn from(d: DenseMatrix) -> Self {
        Self::Dense(d)
    }
}

impl From<CsrMatrix> for OperatorMatrix {
    fn from(s: CsrMatrix) -> Self {
        Self::Sparse(s)
    }
}

impl OperatorMatrix {
    pub fn identity(n: usize) -> Self {
        Self::Sparse(CsrMatrix::identity(n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::Sparse(CsrMatrix::from_sorted_rows(cols, vec![Vec::new(); rows]))
    }

    pub fn rows(&self) -> usize {
        match self {
            Self::Dense(d) => d.rows(),
            Self::Sparse(s) => s.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Self::Dense(d) => d.cols(),
            Self::Sparse(s) => s.cols(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Self::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Self::Dense(d) => d.get(i, j),
            Self::Sparse(s) => s.get(i, j),
        }
    }

    /// Row `i` as a dense vector.
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        match self {
            Self::Dense(d) => d.row(i).to_vec(),
            Self::Sparse(s) => {
                let mut r = vec![0.0; s.cols()];
                let (cols, vals) = s.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    r[j] = v;
                }
                r
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<GridFunction> {
        check_len("matrix-vector product", self.cols(), x.len())?;
        let mut y = vec![0.0; self.rows()];
        match self {
            Self::Dense(d) => d.matvec_into(x, &mut y),
            Self::Sparse(s) => s.matvec_into(x, &mut y),
        }
        Ok(GridFunction::new(y))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Self::Dense(d) => d.clone(),
            Self::Sparse(s) => s.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        match self {
            Self::Dense(d) => CsrMatrix::from_dense(d),
            Self::Sparse(s) => s.clone(),
        }
    }

    pub fn transpose(&self) -> Self {
        match self {
            Self::Dense(d) => Self::Dense(d.transpose()),
            Self::Sparse(s) => Self::Sparse(s.transpose()),
        }
    }

    /// Explicit matrix-matrix product.
    ///
    /// Jacobian builders should not reach for this when one factor is
    /// diagonal; use [`scale_rows`] / [`scale_cols`] instead. Dense products
    /// are O(n^3) and dominate Jacobian construction time when misused.
    pub fn matmul(&self, other: &OperatorMatrix) -> Result<Self> {
        check_len("matrix-matrix product", self.cols(), other.rows())?;
        Ok(match (self, other) {
            (Self::Sparse(a), Self::Sparse(b)) => Self::Sparse(a.matmul(b)),
            (Self::Dense(a), Self::Dense(b)) => Self::Dense(a.matmul(b)),
            (Self::Sparse(a), Self::Dense(b)) => {
                let mut out = DenseMatrix::zeros(a.rows(), b.cols());
                for i in 0..a.rows() {
                    let (cols, vals) = a.row(i);
                    for (&k, &v) in cols.iter().zip(vals) {
                        for (o, bk) in out.row_mut(i).iter_mut().zip(b.row(k)) {
                            *o += v * bk;
                        }
                    }
                }
                Self::Dense(out)
            }
            (Self::Dense(a), Self::Sparse(b)) => {
                let mut out = DenseMatrix::zeros(a.rows(), b.cols());
                for i in 0..a.rows() {
                    for (k, &v) in a.row(i).iter().enumerate() {
                        if v == 0.0 {
                            continue;
                        }
                        let (cols, vals) = b.row(k);
                        for (&j, &bv) in cols.iter().zip(vals) {
                            out.add_at(i, j, v * bv);
                        }
                    }
                }
                Self::Dense(out)
            }
        })
    }

    /// `alpha * self + beta * other`; sparse only if both operands are sparse.
    pub fn linear_combination(&self, alpha: f64, other: &OperatorMatrix, beta: f64) -> Result<Self> {
        check_len("matrix sum (rows)", self.rows(), other.rows())?;
        check_len("matrix sum (cols)", self.cols(), other.cols())?;
        Ok(match (self, other) {
            (Self::Sparse(a), Self::Sparse(b)) => Self::Sparse(a.linear_combination(alpha, b, beta)),
            _ => {
                let mut out = self.to_dense();
                out.scale_in_place(alpha);
                match other {
                    Self::Dense(b) => out.axpy_in_place(beta, b),
                    Self::Sparse(b) => {
                        for (i, j, v) in b.triplets() {
                            out.add_at(i, j, beta * v);
                        }
                    }
                }
                Self::Dense(out)
            }
        })
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            Self::Dense(d) => d.scale_in_place(alpha),
            Self::Sparse(s) => s.scale_in_place(alpha),
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Self::Dense(d) => d.max_abs(),
            Self::Sparse(s) => s.max_abs(),
        }
    }

    /// Largest entrywise difference to `other` (dimensions must agree).
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        let diff = self
            .linear_combination(1.0, other, -1.0)
            .expect("max_abs_diff requires equal shapes");
        diff.max_abs()
    }

    /// Plain-text coordinate dump: one `row col value` line per stored entry,
    /// 1-based indices.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "% {} {}", self.rows(), self.cols())?;
        match self {
            Self::Dense(d) => {
                for i in 0..d.rows() {
                    for (j, v) in d.row(i).iter().enumerate() {
                        if *v != 0.0 {
                            writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
                        }
                    }
                }
            }
            Self::Sparse(s) => {
                for (i, j, v) in s.triplets() {
                    writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
                }
            }
        }
        Ok(())
    }
}

/// Kronecker product `a ⊗ b`; block `(i, j)` of the result is `a[i, j] * b`.
/// The result is sparse whenever either factor is sparse.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    let rows = a
        .rows()
        .checked_mul(b.rows())
        .ok_or(Error::DimensionOverflow { rows: a.rows(), cols: b.rows() })?;
    let cols = a
        .cols()
        .checked_mul(b.cols())
        .ok_or(Error::DimensionOverflow { rows: a.cols(), cols: b.cols() })?;
    let (br, bc) = b.shape();
    if let (OperatorMatrix::Dense(ad), OperatorMatrix::Dense(bd)) = (a, b) {
        return Ok(OperatorMatrix::Dense(DenseMatrix::from_fn(rows, cols, |i, j| {
            ad.get(i / br, j / bc) * bd.get(i % br, j % bc)
        })));
    }
    let sa = a.to_sparse();
    let sb = b.to_sparse();
    let mut out_rows = Vec::with_capacity(rows);
    for ia in 0..sa.rows() {
        let (acols, avals) = sa.row(ia);
        for ib in 0..br {
            let (bcols, bvals) = sb.row(ib);
            let mut row = Vec::with_capacity(acols.len() * bcols.len());
            for (&ja, &va) in acols.iter().zip(avals) {
                for (&jb, &vb) in bcols.iter().zip(bvals) {
                    row.push((ja * bc + jb, va * vb));
                }
            }
            out_rows.push(row);
        }
    }
    Ok(OperatorMatrix::Sparse(CsrMatrix::from_sorted_rows(cols, out_rows)))
}

/// Sparse diagonal matrix with `v` on the diagonal.
pub fn diag(v: &[f64]) -> OperatorMatrix {
    OperatorMatrix::Sparse(CsrMatrix::diagonal(v))
}

/// Zeroth-order restriction: an `m x n` matrix with a single one at `(k, i_k)`.
pub fn restriction(subset: &IndexSubset, n: usize) -> Result<OperatorMatrix> {
    check_len("restriction grid size", n, subset.grid_size())?;
    let rows = subset.indices().iter().map(|&i| vec![(i, 1.0)]).collect();
    Ok(OperatorMatrix::Sparse(CsrMatrix::from_sorted_rows(n, rows)))
}

/// Zeroth-order prolongation, the transpose of the restriction.
pub fn prolongation(subset: &IndexSubset, n: usize) -> Result<OperatorMatrix> {
    Ok(restriction(subset, n)?.transpose())
}

/// The block of `d` that reads from `from` and writes to `to`,
/// i.e. `R_to * d * R_from^T`, extracted without forming the products.
pub fn restrict_operator(
    d: &OperatorMatrix,
    from: &IndexSubset,
    to: &IndexSubset,
) -> Result<OperatorMatrix> {
    check_len("restricted operator (source grid)", d.cols(), from.grid_size())?;
    check_len("restricted operator (target grid)", d.rows(), to.grid_size())?;
    Ok(match d {
        OperatorMatrix::Dense(m) => OperatorMatrix::Dense(DenseMatrix::from_fn(
            to.len(),
            from.len(),
            |i, j| m.get(to.indices()[i], from.indices()[j]),
        )),
        OperatorMatrix::Sparse(s) => OperatorMatrix::Sparse(s.select(to.indices(), from.indices())),
    })
}

/// `diag(v) * a`, computed in O(nnz).
pub fn scale_rows(v: &[f64], a: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_len("row scaling", a.rows(), v.len())?;
    let mut out = a.clone();
    match &mut out {
        OperatorMatrix::Dense(d) => d.scale_rows_in_place(v),
        OperatorMatrix::Sparse(s) => s.scale_rows_in_place(v),
    }
    Ok(out)
}

/// `a * diag(v)`, computed in O(nnz).
pub fn scale_cols(a: &OperatorMatrix, v: &[f64]) -> Result<OperatorMatrix> {
    check_len("column scaling", a.cols(), v.len())?;
    let mut out = a.clone();
    match &mut out {
        OperatorMatrix::Dense(d) => d.scale_cols_in_place(v),
        OperatorMatrix::Sparse(s) => s.scale_cols_in_place(v),
    }
    Ok(out)
}

/// Dense rank-one matrix `u * v^T` (the Kronecker product of a column and a row).
pub fn outer(u: &[f64], v: &[f64]) -> OperatorMatrix {
    OperatorMatrix::Dense(DenseMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j]))
}

/// Assemble a block matrix. `blocks[r][c]` must share row counts along `r`
/// and column counts along `c`. The result is sparse unless some block is dense.
pub fn block_matrix(blocks: &[Vec<OperatorMatrix>]) -> Result<OperatorMatrix> {
    let nbr = blocks.len();
    if nbr == 0 || blocks[0].is_empty() {
        return Err(Error::InvalidArgument("empty block layout".into()));
    }
    let nbc = blocks[0].len();
    let row_sizes: Vec<usize> = blocks.iter().map(|r| r[0].rows()).collect();
    let col_sizes: Vec<usize> = blocks[0].iter().map(OperatorMatrix::cols).collect();
    for row in blocks {
        check_len("block row length", nbc, row.len())?;
    }
    for (r, row) in blocks.iter().enumerate() {
        for (c, b) in row.iter().enumerate() {
            check_len("block rows", row_sizes[r], b.rows())?;
            check_len("block cols", col_sizes[c], b.cols())?;
        }
    }
    let total_rows: usize = row_sizes.iter().sum();
    let total_cols: usize = col_sizes.iter().sum();
    let col_offsets: Vec<usize> = col_sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let any_dense = blocks.iter().flatten().any(|b| !b.is_sparse());
    if any_dense {
        let mut out = DenseMatrix::zeros(total_rows, total_cols);
        let mut row_off = 0;
        for (r, row) in blocks.iter().enumerate() {
            for (c, b) in row.iter().enumerate() {
                match b {
                    OperatorMatrix::Dense(d) => {
                        for i in 0..d.rows() {
                            out.row_mut(row_off + i)[col_offsets[c]..col_offsets[c] + d.cols()]
                                .copy_from_slice(d.row(i));
                        }
                    }
                    OperatorMatrix::Sparse(s) => {
                        for (i, j, v) in s.triplets() {
                            out.set(row_off + i, col_offsets[c] + j, v);
                        }
                    }
                }
            }
            row_off += row_sizes[r];
        }
        return Ok(OperatorMatrix::Dense(out));
    }
    let mut out_rows = Vec::with_capacity(total_rows);
    for row in blocks {
        let sparse: Vec<&CsrMatrix> = row
            .iter()
            .map(|b| match b {
                OperatorMatrix::Sparse(s) => s,
                OperatorMatrix::Dense(_) => unreachable!(),
            })
            .collect();
        for i in 0..sparse[0].rows() {
            let mut merged = Vec::new();
            for (c, s) in sparse.iter().enumerate() {
                let (cols, vals) = s.row(i);
                merged.extend(cols.iter().zip(vals).map(|(&j, &v)| (col_offsets[c] + j, v)));
            }
            out_rows.push(merged);
        }
    }
    Ok(OperatorMatrix::Sparse(CsrMatrix::from_sorted_rows(total_cols, out_rows)))
}
