//! Minimal dense and sparse linear algebra.

mod dense;
mod qr;
mod sparse;

pub use dense::{solve_upper_triangular, solve_upper_triangular_transposed, CholeskyFactor, DenseMatrix, LuFactor};
pub use qr::{thin_qr, thin_qr_columns, ColumnQr, RANK_TOL};
pub use sparse::{solve_spd, triple_product, SparseMatrix};

/// Euclidean inner product.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Euclidean norm.
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Elementwise `x - y`.
pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}
