use crate::error::{Error, Result};

use super::dense::DenseMatrix;

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from coordinate triplets; repeated `(row, col)` pairs are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows} x {cols}"
            )));
        }
        for &(i, j, _) in &triplets {
            if i >= rows {
                return Err(Error::IndexOutOfRange { index: i, len: rows });
            }
            if j >= cols {
                return Err(Error::IndexOutOfRange { index: j, len: cols });
            }
        }
        triplets.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            col_idx.push(j);
            values.push(v);
            row_ptr[i + 1] += 1;
            last = Some((i, j));
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assemble directly from rows of `(col, value)` pairs that are already sorted.
    pub(crate) fn from_sorted_rows(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for r in rows {
            for (j, v) in r {
                debug_assert!(j < cols);
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            rows: nrows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(v: &[f64]) -> Self {
        let n = v.len();
        Self {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: v.to_vec(),
        }
    }

    pub fn from_dense(d: &DenseMatrix) -> Self {
        let rows = (0..d.rows())
            .map(|i| {
                d.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| (j, v))
                    .collect()
            })
            .collect();
        Self::from_sorted_rows(d.cols(), rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values stored in row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, v)| v * x[j]).sum();
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let k = next[j];
                col_idx[k] = i;
                values[k] = v;
                next[j] += 1;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Sparse-sparse product (row-wise accumulation with a dense scratch row).
    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let mut acc = vec![0.0; other.cols];
        let mut marker = vec![usize::MAX; other.cols];
        let mut out_rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut pattern = Vec::new();
            let (acols, avals) = self.row(i);
            for (&k, &a) in acols.iter().zip(avals) {
                let (bcols, bvals) = other.row(k);
                for (&j, &b) in bcols.iter().zip(bvals) {
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = 0.0;
                        pattern.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            pattern.sort_unstable();
            out_rows.push(pattern.into_iter().map(|j| (j, acc[j])).collect());
        }
        Self::from_sorted_rows(other.cols, out_rows)
    }

    /// `alpha * self + beta * other`, merging sorted rows.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let rows = (0..self.rows)
            .map(|i| {
                let (ac, av) = self.row(i);
                let (bc, bv) = other.row(i);
                let mut out = Vec::with_capacity(ac.len() + bc.len());
                let (mut p, mut q) = (0, 0);
                while p < ac.len() || q < bc.len() {
                    let take_a = q >= bc.len() || (p < ac.len() && ac[p] < bc[q]);
                    let take_b = p >= ac.len() || (q < bc.len() && bc[q] < ac[p]);
                    if take_a {
                        out.push((ac[p], alpha * av[p]));
                        p += 1;
                    } else if take_b {
                        out.push((bc[q], beta * bv[q]));
                        q += 1;
                    } else {
                        out.push((ac[p], alpha * av[p] + beta * bv[q]));
                        p += 1;
                        q += 1;
                    }
                }
                out
            })
            .collect();
        Self::from_sorted_rows(self.cols, rows)
    }

    pub fn scale_rows_in_place(&mut self, v: &[f64]) {
        for (i, &s) in v.iter().enumerate() {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            self.values[a..b].iter_mut().for_each(|x| *x *= s);
        }
    }

    pub fn scale_cols_in_place(&mut self, v: &[f64]) {
        for (x, &j) in self.values.iter_mut().zip(&self.col_idx) {
            *x *= v[j];
        }
    }

    pub fn scale_in_place(&mut self, alpha: f64) {
        self.values.iter_mut().for_each(|x| *x *= alpha);
    }

    /// Sub-matrix picking rows `row_sel` and columns `col_sel` (in that order).
    pub fn select(&self, row_sel: &[usize], col_sel: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.cols];
        for (new, &old) in col_sel.iter().enumerate() {
            col_map[old] = new;
        }
        let rows = row_sel
            .iter()
            .map(|&i| {
                let (cols, vals) = self.row(i);
                let mut r: Vec<(usize, f64)> = cols
                    .iter()
                    .zip(vals)
                    .filter(|(&j, _)| col_map[j] != usize::MAX)
                    .map(|(&j, &v)| (col_map[j], v))
                    .collect();
                r.sort_unstable_by_key(|e| e.0);
                r
            })
            .collect();
        Self::from_sorted_rows(col_sel.len(), rows)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d.set(i, j, v);
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }
}
