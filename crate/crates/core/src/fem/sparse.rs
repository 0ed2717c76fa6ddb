//! Compressed sparse row matrices sized for 2-D finite element work.

use crate::error::{Error, Result};

/// Symmetric-by-construction CSR matrix.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from (row, col, value) triplets, summing duplicates. The
    /// accumulation order is the sorted order of (row, col) with ties in
    /// input order, so assembly is deterministic.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&i| (triplets[i].0, triplets[i].1));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for &i in &order {
            let (r, c, v) = triplets[i];
            debug_assert!(r < n_rows && c < n_cols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n_rows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
    }

    /// x^T A y.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.n_rows {
            let mut row = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                row += self.values[k] * y[self.col_idx[k]];
            }
            acc += x[r] * row;
        }
        acc
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_rows];
        for r in 0..self.n_rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.col_idx[k] == r {
                    d[r] = self.values[k];
                }
            }
        }
        d
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        for k in self.row_ptr[r]..self.row_ptr[r + 1] {
            if self.col_idx[k] == c {
                return self.values[k];
            }
        }
        0.0
    }

    /// Sum of all entries (equals integral of 1 against 1 for mass matrices).
    pub fn entry_sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Restriction A[keep, keep] for an index subset given as a forward map
    /// `free_of[i] = Some(new index)` for kept dofs.
    pub fn restrict(&self, free_of: &[Option<usize>], n_free: usize) -> SparseMatrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.n_rows {
            let Some(rf) = free_of[r] else { continue };
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if let Some(cf) = free_of[self.col_idx[k]] {
                    triplets.push((rf, cf, self.values[k]));
                }
            }
        }
        SparseMatrix::from_triplets(n_free, n_free, &triplets)
    }

    /// Relative symmetry defect, for diagnostics.
    pub fn symmetry_defect(&self) -> Result<f64> {
        if self.n_rows != self.n_cols {
            return Err(Error::InvalidParameter("matrix not square".into()));
        }
        let mut max_diff = 0.0f64;
        let mut max_abs = 0.0f64;
        for r in 0..self.n_rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let v = self.values[k];
                max_abs = max_abs.max(v.abs());
                max_diff = max_diff.max((v - self.get(c, r)).abs());
            }
        }
        Ok(if max_abs == 0.0 { 0.0 } else { max_diff / max_abs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplet_assembly_sums_duplicates() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 1.0), (0, 1, 2.0), (0, 0, 3.0), (1, 1, 5.0)],
        );
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 0), 4.0);
        assert_eq!(a.get(0, 1), 2.0);
        assert_eq!(a.get(1, 0), 0.0);
        let y = a.matvec(&[1.0, 1.0]);
        assert_eq!(y, vec![6.0, 5.0]);
        assert_eq!(a.entry_sum(), 11.0);
    }

    #[test]
    fn restriction_drops_rows_and_columns() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            &[
                (0, 0, 2.0),
                (0, 2, 1.0),
                (1, 1, 3.0),
                (2, 0, 1.0),
                (2, 2, 4.0),
            ],
        );
        let free_of = vec![Some(0), None, Some(1)];
        let r = a.restrict(&free_of, 2);
        assert_eq!(r.get(0, 0), 2.0);
        assert_eq!(r.get(0, 1), 1.0);
        assert_eq!(r.get(1, 1), 4.0);
        assert_eq!(r.symmetry_defect().unwrap(), 0.0);
    }
}
