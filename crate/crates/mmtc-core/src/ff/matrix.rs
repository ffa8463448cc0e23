use alloc::format;
use alloc::vec::Vec;

use super::field::Field;
use crate::error::FfError;

/// Dense row-major matrix over a finite field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FfMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FfMatrix {
    pub fn new(field: Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self, FfError> {
        if data.len() != rows * cols {
            return Err(FfError::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        for &v in &data {
            field.check(v)?;
        }
        Ok(FfMatrix { field, rows, cols, data })
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FfMatrix { field, rows, cols, data: alloc::vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<u32>]) -> Result<Self, FfError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(FfError::Dimension("ragged rows".into()));
        }
        Self::new(field, rows.len(), cols, rows.concat())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.order());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Multiplies row `r` by `s`.
    pub fn scale_row(&mut self, r: usize, s: u32) {
        for c in 0..self.cols {
            let v = self.get(r, c);
            self.set(r, c, self.field.mul(v, s));
        }
    }

    /// `row[dst] -= s * row[src]` over columns `from..`.
    fn sub_scaled_row(&mut self, dst: usize, src: usize, s: u32, from: usize) {
        if s == 0 {
            return;
        }
        let n = self.cols;
        for c in from..n {
            let v = self.data[src * n + c];
            if v != 0 {
                let d = self.data[dst * n + c];
                self.data[dst * n + c] = self.field.sub(d, self.field.mul(s, v));
            }
        }
    }

    pub fn mul(&self, other: &FfMatrix) -> Result<FfMatrix, FfError> {
        if self.cols != other.rows || self.field != other.field {
            return Err(FfError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = FfMatrix::zeros(f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.data[i * other.cols + j] = v;
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form in place; returns pivot columns in row order.
    /// Only the first `ncols` columns are eligible as pivots, so an augmented
    /// block to the right is carried along.
    pub fn rref_in_place(&mut self, ncols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols.min(self.cols) {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.field.inv(self.get(r, c)).expect("pivot is nonzero");
            self.scale_row(r, inv);
            for i in 0..self.rows {
                if i != r {
                    let s = self.get(i, c);
                    self.sub_scaled_row(i, r, s, c);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (FfMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = m.rref_in_place(self.cols);
        (m, p)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Inverse of a square matrix; `None` when singular.
    pub fn inverse(&self) -> Option<FfMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = FfMatrix::zeros(self.field.clone(), n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j);
            }
            aug.data[i * 2 * n + n + i] = 1;
        }
        if aug.rref_in_place(n).len() < n {
            return None;
        }
        let mut out = FfMatrix::zeros(self.field.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = aug.get(i, n + j);
            }
        }
        Some(out)
    }
}
