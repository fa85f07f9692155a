use crate::error::{check_len, Error, Result};

use super::dense::DenseMatrix;
use super::{axpy, dot, norm2};

/// Columns with `R_ii <= RANK_TOL * R_00` are treated as numerically
/// dependent on the preceding ones.
pub const RANK_TOL: f64 = 1e-12;

/// Thin QR factorization kept in column form.
#[derive(Debug, Clone)]
pub struct ColumnQr {
    /// Orthonormal columns; a dependent column is stored as the zero vector.
    pub q: Vec<Vec<f64>>,
    /// `n x n` upper triangular factor with nonnegative diagonal.
    pub r: DenseMatrix,
    /// Number of numerically independent columns.
    pub rank: usize,
    /// Index of the first dependent column (`n` when there is none).
    pub leading_rank: usize,
}

impl ColumnQr {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.r.nrows()
    }

    /// `Q_k (y)` using the first `k = y.len()` columns.
    pub fn apply_q(&self, y: &[f64]) -> Vec<f64> {
        let m = self.q.first().map_or(0, Vec::len);
        let mut out = vec![0.0; m];
        for (col, &yj) in self.q.iter().zip(y) {
            axpy(yj, col, &mut out);
        }
        out
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
pub fn thin_qr_columns(cols: &[Vec<f64>]) -> Result<ColumnQr> {
    let n = cols.len();
    let m = cols.first().map_or(0, Vec::len);
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut r = DenseMatrix::zeros(n, n);
    let mut reference = 0.0;
    let mut rank = 0;
    let mut leading_rank = n;
    for (j, col) in cols.iter().enumerate() {
        check_len(m, col.len())?;
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("column {j} has non-finite entries")));
        }
        let mut v = col.clone();
        for _pass in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let h = dot(qi, &v);
                r[(i, j)] += h;
                axpy(-h, qi, &mut v);
            }
        }
        let nv = norm2(&v);
        if reference == 0.0 && nv > 0.0 {
            reference = nv;
        }
        if nv > 0.0 && nv > RANK_TOL * reference {
            r[(j, j)] = nv;
            v.iter_mut().for_each(|x| *x /= nv);
            rank += 1;
        } else {
            v.iter_mut().for_each(|x| *x = 0.0);
            if leading_rank == n {
                leading_rank = j;
            }
        }
        q.push(v);
    }
    Ok(ColumnQr { q, r, rank, leading_rank })
}

/// Thin QR of a dense matrix; returns the `m x n` orthonormal factor and the
/// `n x n` triangular factor together with the numerical rank.
pub fn thin_qr(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix, usize)> {
    let cols: Vec<Vec<f64>> = (0..m.ncols()).map(|j| m.column(j)).collect();
    let f = thin_qr_columns(&cols)?;
    let q = DenseMatrix::from_columns(&f.q)?;
    let q = if m.ncols() == 0 { DenseMatrix::zeros(m.nrows(), 0) } else { q };
    Ok((q, f.r, f.rank))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_factors_trivially() {
        let (q, r, rank) = thin_qr(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(q, DenseMatrix::identity(4));
        assert_eq!(r, DenseMatrix::identity(4));
        assert_eq!(rank, 4);
    }

    #[test]
    fn single_column_norm() {
        let m = DenseMatrix::from_columns(&[vec![3.0, 4.0]]).unwrap();
        let (_, r, _) = thin_qr(&m).unwrap();
        assert_eq!(r[(0, 0)], 5.0);
    }

    #[test]
    fn random_tall_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m = DenseMatrix::from_row_major(50, 6, (0..300).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .unwrap();
        let (q, r, rank) = thin_qr(&m).unwrap();
        assert_eq!(rank, 6);
        assert!(q.matmul(&r).sub(&m).frobenius_norm() <= 1e-12 * m.frobenius_norm());
        assert!(q.transpose().matmul(&q).sub(&DenseMatrix::identity(6)).max_abs() <= 1e-10);
        for i in 0..6 {
            assert!(r[(i, i)] >= 0.0);
            for j in 0..i {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let a = vec![1.0, 2.0, 3.0, 4.0];
        let b = vec![0.0, 1.0, 0.0, 1.0];
        let c: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - y).collect();
        let c_copy = c.clone();
        let f = thin_qr_columns(&[a, b, c]).unwrap();
        assert_eq!(f.rank, 2);
        assert_eq!(f.leading_rank, 2);
        assert!(!f.is_full_rank());
        // the dependent column is still reproduced by its projection
        let rebuilt = f.apply_q(&[f.r[(0, 2)], f.r[(1, 2)], 0.0]);
        for (x, y) in rebuilt.iter().zip(&c_copy) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
