use crate::error::{Error, Result};

/// Ordered, duplicate-free set of (0-based, flattened) grid positions in a grid of size `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSubset {
    indices: Vec<usize>,
    n: usize,
}

impl IndexSubset {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateIndex { index: i });
            }
        }
        Ok(Self { indices, n })
    }

    pub fn full(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
            n,
        }
    }

    /// Indices of the grid not contained in `self`, ascending.
    pub fn complement(&self) -> Self {
        let mut keep = vec![true; self.n];
        for &i in &self.indices {
            keep[i] = false;
        }
        Self {
            indices: (0..self.n).filter(|&i| keep[i]).collect(),
            n: self.n,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Size of the grid the subset lives in.
    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn gather(&self, v: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&i| v[i]).collect()
    }

    /// Write `values` into the subset positions of `target`.
    pub fn scatter(&self, values: &[f64], target: &mut [f64]) {
        for (&i, &v) in self.indices.iter().zip(values) {
            target[i] = v;
        }
    }
}
