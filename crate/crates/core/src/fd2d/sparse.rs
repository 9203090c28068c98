use crate::exec::{self, Execution};

/// Compressed-row matrix with at most five entries per row, plus its
/// right-hand side. Column indices within a row are increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSystem {
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl SparseSystem {
    /// Builds the matrix from per-row `(column, value)` lists.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>, rhs: Vec<f64>) -> Self {
        debug_assert_eq!(rows.len(), rhs.len());
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let nnz: usize = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            row_ptr,
            cols,
            vals,
            rhs,
        }
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(k, _)| k == c).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len()).map(|r| self.get(r, r)).collect()
    }

    pub fn max_row_nnz(&self) -> usize {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// `out = A x`
    pub fn apply_into(&self, exec: Execution, x: &[f64], out: &mut [f64]) {
        exec::for_each_chunk_mut(exec, out, |offset, chunk| {
            for (k, o) in chunk.iter_mut().enumerate() {
                *o = self.row(offset + k).map(|(c, v)| v * x[c]).sum();
            }
        });
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.apply_into(Execution::Sequential, x, &mut out);
        out
    }

    /// `‖b - A x‖₂ / ‖b‖₂` (absolute when `b = 0`).
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        let r: f64 = ax.iter().zip(&self.rhs).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt();
        let b: f64 = self.rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
        if b > 0.0 {
            r / b
        } else {
            r
        }
    }

    /// First `(row, col)` whose mirror entry differs by more than `rel_tol`
    /// times the largest entry.
    pub fn find_asymmetry(&self, rel_tol: f64) -> Option<(usize, usize)> {
        let scale = self.vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        (0..self.len()).find_map(|r| {
            self.row(r)
                .find(|&(c, v)| c != r && (v - self.get(c, r)).abs() > rel_tol * scale)
                .map(|(c, _)| (r, c))
        })
    }

    /// Largest `|a_rc - a_cr|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let worst = (0..self.len())
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max);
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }
}
