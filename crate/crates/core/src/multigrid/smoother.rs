use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::linalg::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SmootherKind {
    Jacobi,
    WeightedJacobi,
    GaussSeidel,
}

impl SmootherKind {
    pub fn name(self) -> &'static str {
        match self {
            SmootherKind::Jacobi => "jacobi",
            SmootherKind::WeightedJacobi => "wjacobi",
            SmootherKind::GaussSeidel => "gs",
        }
    }
}

impl fmt::Display for SmootherKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SmootherKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "jacobi" => Ok(SmootherKind::Jacobi),
            "wjacobi" | "weighted-jacobi" => Ok(SmootherKind::WeightedJacobi),
            "gs" | "gauss-seidel" => Ok(SmootherKind::GaussSeidel),
            other => Err(Error::Argument(format!("unknown smoother '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmootherConfig {
    pub kind: SmootherKind,
    /// Used by weighted Jacobi only.
    pub omega: f64,
    pub nu1: usize,
    pub nu2: usize,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        SmootherConfig { kind: SmootherKind::WeightedJacobi, omega: 2.0 / 3.0, nu1: 1, nu2: 1 }
    }
}

impl SmootherConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kind == SmootherKind::WeightedJacobi && !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::Argument(format!("omega must lie in (0, 1], got {}", self.omega)));
        }
        if self.nu1 + self.nu2 == 0 {
            return Err(Error::Argument("at least one smoothing sweep is required".into()));
        }
        Ok(())
    }

    /// Relaxation weight actually applied by the Jacobi variants.
    pub fn weight(&self) -> f64 {
        match self.kind {
            SmootherKind::WeightedJacobi => self.omega,
            _ => 1.0,
        }
    }
}

pub(crate) fn inverse_diagonal(a: &SparseMatrix) -> Result<Vec<f64>> {
    a.diagonal()
        .iter()
        .enumerate()
        .map(|(i, &d)| if d == 0.0 { Err(Error::ZeroDiagonal(i)) } else { Ok(1.0 / d) })
        .collect()
}

/// In-place sweeps with a precomputed inverse diagonal.
pub(crate) fn smooth_in_place(
    a: &SparseMatrix,
    inv_diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    kind: SmootherKind,
    omega: f64,
    sweeps: usize,
    work: &mut Vec<f64>,
) {
    let n = x.len();
    match kind {
        SmootherKind::Jacobi | SmootherKind::WeightedJacobi => {
            let w = if kind == SmootherKind::Jacobi { 1.0 } else { omega };
            work.resize(n, 0.0);
            for _ in 0..sweeps {
                a.spmv_into(x, work);
                for i in 0..n {
                    x[i] += w * inv_diag[i] * (b[i] - work[i]);
                }
            }
        }
        SmootherKind::GaussSeidel => {
            let (indptr, indices, values) = (a.indptr(), a.indices(), a.values());
            for _ in 0..sweeps {
                for i in 0..n {
                    let mut s = b[i];
                    for k in indptr[i]..indptr[i + 1] {
                        let j = indices[k];
                        if j != i {
                            s -= values[k] * x[j];
                        }
                    }
                    x[i] = s * inv_diag[i];
                }
            }
        }
    }
}

/// Applies `sweeps` relaxation sweeps to `A x = b` starting from `x0`.
pub fn smooth(a: &SparseMatrix, b: &[f64], x0: &[f64], config: &SmootherConfig, sweeps: usize) -> Result<Vec<f64>> {
    check_len(a.nrows(), b.len())?;
    check_len(a.ncols(), x0.len())?;
    let inv = inverse_diagonal(a)?;
    let mut x = x0.to_vec();
    let mut work = Vec::new();
    smooth_in_place(a, &inv, b, &mut x, config.kind, config.omega, sweeps, &mut work);
    Ok(x)
}
