use serde::{Deserialize, Serialize};

use crate::textfeat::BowVector;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn mul_sparse(&self, x: &SparseVec) -> Vec<f64> {
        debug_assert_eq!(x.dim, self.cols);
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                x.entries.iter().map(|&(j, v)| row[j] * v).sum()
            })
            .collect()
    }

    /// `selfᵀ y`
    pub fn t_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (o, &w) in out.iter_mut().zip(self.row(i)) {
                *o += w * yi;
            }
        }
        out
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sparse real vector used as network input. Indices strictly ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub dim: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseVec {
    pub fn zeros(dim: usize) -> Self {
        SparseVec {
            dim,
            entries: Vec::new(),
        }
    }

    /// Every coordinate stored, including zeros.
    pub fn dense(values: &[f64]) -> Self {
        SparseVec {
            dim: values.len(),
            entries: values.iter().copied().enumerate().collect(),
        }
    }

    pub fn from_bow(bow: &BowVector, binary: bool) -> Self {
        SparseVec {
            dim: bow.dim,
            entries: bow
                .entries
                .iter()
                .map(|&(i, c)| (i, if binary { 1.0 } else { c as f64 }))
                .collect(),
        }
    }

    /// Block concatenation `[a; b; ...]`.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let mut out = SparseVec::zeros(0);
        for p in parts {
            out.entries
                .extend(p.entries.iter().map(|&(i, v)| (i + out.dim, v)));
            out.dim += p.dim;
        }
        out
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &(i, x) in &self.entries {
            v[i] += x;
        }
        v
    }
}
