use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy, norm2, solve_upper_triangular, solve_upper_triangular_transposed, thin_qr_columns, ColumnQr, DenseMatrix};

use super::window::{ExtrapolationMethod, ExtrapolationResult, ExtrapolationStatus, SequenceWindow};

/// Relative size of `sum d` below which MPE is declared stagnated.
const STAGNATION_TOL: f64 = 1e-14;

pub fn extrapolate(window: &SequenceWindow, method: ExtrapolationMethod) -> Result<ExtrapolationResult> {
    match method {
        ExtrapolationMethod::Rre => rre(window),
        ExtrapolationMethod::Mpe => mpe(window),
    }
}

/// Reduced rank extrapolation: `gamma` minimizes `||sum gamma_j Δs_j||`
/// subject to `sum gamma_j = 1`, computed from the QR factorization of the
/// differences via `R^T R d = 1`, `gamma = d / sum d`.
pub fn rre(window: &SequenceWindow) -> Result<ExtrapolationResult> {
    kernel(window, ExtrapolationMethod::Rre)
}

/// Minimal polynomial extrapolation: `R_q d = -r_q`, `d_q = 1`,
/// `gamma = d / sum d`.
pub fn mpe(window: &SequenceWindow) -> Result<ExtrapolationResult> {
    kernel(window, ExtrapolationMethod::Mpe)
}

/// `sum gamma_j Δs_{k+j}` for the weights of `result`.
pub fn generalized_residual(window: &SequenceWindow, result: &ExtrapolationResult) -> Result<Vec<f64>> {
    let diffs = window.differences();
    if result.gamma.len() > diffs.len() {
        return Err(Error::Dimension { expected: diffs.len(), found: result.gamma.len() });
    }
    let mut out = vec![0.0; window.dim()];
    for (g, d) in result.gamma.iter().zip(&diffs) {
        axpy(*g, d, &mut out);
    }
    Ok(out)
}

fn kernel(window: &SequenceWindow, method: ExtrapolationMethod) -> Result<ExtrapolationResult> {
    let s0 = &window.iterates()[0];
    let qr = thin_qr_columns(&window.differences())?;
    let cols = qr.r.nrows();
    if qr.leading_rank == 0 {
        return Ok(ExtrapolationResult {
            t: s0.clone(),
            gamma: unit(cols, 0),
            generalized_residual_norm: 0.0,
            rank_used: 0,
            status: ExtrapolationStatus::Degenerate,
        });
    }
    let (d, m, truncated) = if qr.leading_rank < cols {
        // Δs_m lies in the span of the preceding differences: the null
        // vector with d_m = 1 is an exact minimal polynomial for both methods.
        let m = qr.leading_rank;
        (null_vector(&qr.r, m)?, m, true)
    } else {
        let m = cols - 1;
        let d = match method {
            ExtrapolationMethod::Rre => {
                let ones = vec![1.0; cols];
                let y = solve_upper_triangular_transposed(&qr.r, &ones)?;
                solve_upper_triangular(&qr.r, &y)?
            }
            ExtrapolationMethod::Mpe => null_vector(&qr.r, m)?,
        };
        (d, m, false)
    };
    let lambda: f64 = d.iter().sum();
    let scale: f64 = d.iter().map(|v| v.abs()).sum();
    if !(lambda.abs() > STAGNATION_TOL * scale) || !lambda.is_finite() {
        return Ok(ExtrapolationResult {
            t: window.iterates()[m].clone(),
            gamma: unit(m + 1, m),
            generalized_residual_norm: f64::NAN,
            rank_used: m,
            status: ExtrapolationStatus::Stagnated,
        });
    }
    let gamma: Vec<f64> = d.iter().map(|v| v / lambda).collect();
    let t = combine(s0, &qr, &gamma);
    let generalized_residual_norm = norm2(&leading_block(&qr.r, m + 1).matvec(&gamma)?);
    Ok(ExtrapolationResult {
        t,
        gamma,
        generalized_residual_norm,
        rank_used: m,
        status: if truncated { ExtrapolationStatus::RankTruncated } else { ExtrapolationStatus::Regular },
    })
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

fn leading_block(r: &DenseMatrix, k: usize) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            out[(i, j)] = r[(i, j)];
        }
    }
    out
}

/// `d` of length `m + 1` with `R_m d' = -R[0..m, m]` and `d_m = 1`.
fn null_vector(r: &DenseMatrix, m: usize) -> Result<Vec<f64>> {
    let rm = leading_block(r, m);
    let rhs: Vec<f64> = (0..m).map(|i| -r[(i, m)]).collect();
    let mut d = if m == 0 { Vec::new() } else { solve_upper_triangular(&rm, &rhs)? };
    d.push(1.0);
    Ok(d)
}

/// `t = s_k + Q_m (R_m xi)` with `xi_0 = 1 - gamma_0`, `xi_j = xi_{j-1} - gamma_j`.
fn combine(s0: &[f64], qr: &ColumnQr, gamma: &[f64]) -> Vec<f64> {
    let m = gamma.len() - 1;
    let mut xi = Vec::with_capacity(m);
    let mut acc = 1.0;
    for g in &gamma[..m] {
        acc -= g;
        xi.push(acc);
    }
    let mut eta = vec![0.0; m];
    for i in 0..m {
        eta[i] = (i..m).map(|j| qr.r[(i, j)] * xi[j]).sum();
    }
    let mut t = s0.to_vec();
    let qx = qr.apply_q(&eta);
    if !qx.is_empty() {
        check_len(t.len(), qx.len()).expect("Q rows match the iterates");
        axpy(1.0, &qx, &mut t);
    }
    t
}
