//! Coordinate-format sparse operators and their compressed-row form.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{JtdError, Result};

/// A sparse real matrix on a sector basis, stored as `(row, col, value)` triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
    pub hermitian: bool,
}

impl SparseOperator {
    pub fn new(dim: usize, hermitian: bool) -> Self {
        Self {
            dim,
            entries: Vec::new(),
            hermitian,
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.entries.push((row, col, value));
    }

    /// Checks the structural invariants: indices in range and, for hermitian
    /// operators, exact transpose symmetry of the summed entries.
    pub fn validate(&self) -> Result<()> {
        if let Some(&(r, c, _)) = self.entries.iter().find(|&&(r, c, _)| r >= self.dim || c >= self.dim) {
            return Err(JtdError::Numerical(format!(
                "entry ({r}, {c}) outside dimension {}",
                self.dim
            )));
        }
        if self.hermitian {
            let csr = self.to_csr();
            for row in 0..self.dim {
                for (col, value) in csr.row(row) {
                    if csr.get(col, row) != value {
                        return Err(JtdError::Numerical(format!(
                            "operator is not symmetric at ({row}, {col})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_csr(&self) -> Csr {
        Csr::from_triplets(self.dim, &self.entries)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for &(r, c, v) in &self.entries {
            if r == c {
                d[r] += v;
            }
        }
        d
    }
}

/// Compressed sparse rows with duplicate entries summed and columns sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    pub fn from_triplets(dim: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = entries.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(sorted.len());
        let mut vals: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *vals.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yr = acc;
        }
    }

    /// `y += scale * A x` for complex vectors (A real).
    pub fn matvec_add_complex(&self, scale: f64, x: &[Complex64], y: &mut [Complex64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[k]] * self.vals[k];
            }
            *yr += acc * scale;
        }
    }
}
