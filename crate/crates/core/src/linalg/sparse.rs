use crate::error::{check_len, Error, Result};

use super::dense::{CholeskyFactor, DenseMatrix};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row. Explicit zeros
/// are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(
        nrows: usize,
        ncols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        data: Vec<f64>,
    ) -> Result<Self> {
        check_len(nrows + 1, indptr.len())?;
        check_len(indices.len(), data.len())?;
        if indptr[0] != 0 || *indptr.last().unwrap() != indices.len() {
            return Err(Error::Argument("row offsets do not cover the index array".into()));
        }
        for r in 0..nrows {
            if indptr[r] > indptr[r + 1] {
                return Err(Error::Argument(format!("row offsets decrease at row {r}")));
            }
            let cols = &indices[indptr[r]..indptr[r + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Argument(format!(
                    "column indices not strictly increasing in row {r}"
                )));
            }
            if cols.last().is_some_and(|&c| c >= ncols) {
                return Err(Error::Argument(format!("column index out of range in row {r}")));
            }
        }
        Ok(Self { nrows, ncols, indptr, indices, data })
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::Argument(format!("triplet ({r}, {c}) out of range")));
            }
            rows[r].push((c, v));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if indices.len() > *indptr.last().unwrap() && *indices.last().unwrap() == c {
                    *data.last_mut().unwrap() += v;
                } else {
                    indices.push(c);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Ok(Self { nrows, ncols, indptr, indices, data })
    }

    /// Builds a matrix with a prescribed sparsity pattern and zero values.
    /// `pattern[r]` must be sorted and duplicate free.
    pub fn from_pattern(nrows: usize, ncols: usize, pattern: &[Vec<usize>]) -> Result<Self> {
        check_len(nrows, pattern.len())?;
        let mut indptr = Vec::with_capacity(nrows + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        for row in pattern {
            indices.extend_from_slice(row);
            indptr.push(indices.len());
        }
        let data = vec![0.0; indices.len()];
        Self::new(nrows, ncols, indptr, indices, data)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![1.0; n],
        }
    }

    /// Converts a dense matrix, dropping entries with `|a_ij| <= drop_tol`.
    pub fn from_dense(m: &DenseMatrix, drop_tol: f64) -> Self {
        let triplets = (0..m.nrows()).flat_map(|i| {
            (0..m.ncols()).filter_map(move |j| {
                let v = m[(i, j)];
                (v.abs() > drop_tol).then_some((i, j, v))
            })
        });
        Self::from_triplets(m.nrows(), m.ncols(), triplets).expect("indices in range")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                d[(r, c)] += v;
            }
        }
        d
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.data[span])
    }

    /// Entry `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |k| vals[k])
    }

    /// Adds `v` to a stored entry. Fails if `(r, c)` is not in the pattern.
    pub fn add_to(&mut self, r: usize, c: usize, v: f64) -> Result<()> {
        let start = self.indptr[r];
        let cols = &self.indices[start..self.indptr[r + 1]];
        match cols.binary_search(&c) {
            Ok(k) => {
                self.data[start + k] += v;
                Ok(())
            }
            Err(_) => Err(Error::Argument(format!("entry ({r}, {c}) not in sparsity pattern"))),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `y = A x`, accumulating each row in ascending column order.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ncols, x.len())?;
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// Unchecked variant of [`spmv`](Self::spmv) writing into `y`.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            let span = self.indptr[r]..self.indptr[r + 1];
            *yr = self.indices[span.clone()]
                .iter()
                .zip(&self.data[span])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }

    /// `b - A x`
    pub fn residual(&self, b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.nrows, b.len())?;
        let mut r = self.spmv(x)?;
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        Ok(r)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0; self.nnz()];
        let mut data = vec![0.0; self.nnz()];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let k = next[c];
                indices[k] = r;
                data[k] = v;
                next[c] += 1;
            }
        }
        Self { nrows: self.ncols, ncols: self.nrows, indptr, indices, data }
    }

    /// Sparse product `self * other` (row-wise Gustavson with a dense
    /// accumulator). Output columns are sorted.
    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        check_len(self.ncols, other.nrows)?;
        let n = other.ncols;
        let mut acc = vec![0.0; n];
        let mut marker = vec![usize::MAX; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for r in 0..self.nrows {
            touched.clear();
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (ocols, ovals) = other.row(k);
                for (&c, &b) in ocols.iter().zip(ovals) {
                    if marker[c] != r {
                        marker[c] = r;
                        acc[c] = 0.0;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                indices.push(c);
                data.push(acc[c]);
            }
            indptr.push(indices.len());
        }
        Ok(SparseMatrix { nrows: self.nrows, ncols: n, indptr, indices, data })
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &SparseMatrix) -> SparseMatrix {
        let nrows = self.nrows * other.nrows;
        let ncols = self.ncols * other.ncols;
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::with_capacity(self.nnz() * other.nnz());
        let mut data = Vec::with_capacity(self.nnz() * other.nnz());
        indptr.push(0);
        for ra in 0..self.nrows {
            let (ca, va) = self.row(ra);
            for rb in 0..other.nrows {
                let (cb, vb) = other.row(rb);
                for (&i, &a) in ca.iter().zip(va) {
                    for (&j, &b) in cb.iter().zip(vb) {
                        indices.push(i * other.ncols + j);
                        data.push(a * b);
                    }
                }
                indptr.push(indices.len());
            }
        }
        SparseMatrix { nrows, ncols, indptr, indices, data }
    }

    /// Keeps the listed rows and columns (both given in ascending order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for &r in rows {
            let (rc, rv) = self.row(r);
            for (&c, &v) in rc.iter().zip(rv) {
                let m = col_map[c];
                if m != usize::MAX {
                    indices.push(m);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        SparseMatrix { nrows: rows.len(), ncols: cols.len(), indptr, indices, data }
    }

    /// `max |A - A^T|` over all entries.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }
}

/// Galerkin triple product `R A P`.
pub fn triple_product(r: &SparseMatrix, a: &SparseMatrix, p: &SparseMatrix) -> Result<SparseMatrix> {
    r.matmul(a)?.matmul(p)
}

/// Solves `A x = b` for symmetric positive definite `A` by a dense
/// Cholesky factorization.
pub fn solve_spd(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_len(a.nrows(), b.len())?;
    CholeskyFactor::new(&a.to_dense())?.solve(b)
}
