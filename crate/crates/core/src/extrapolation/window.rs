use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::sub;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationMethod {
    Rre,
    Mpe,
}

impl ExtrapolationMethod {
    pub fn name(self) -> &'static str {
        match self {
            ExtrapolationMethod::Rre => "rre",
            ExtrapolationMethod::Mpe => "mpe",
        }
    }
}

impl fmt::Display for ExtrapolationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExtrapolationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rre" => Ok(ExtrapolationMethod::Rre),
            "mpe" => Ok(ExtrapolationMethod::Mpe),
            other => Err(Error::Argument(format!("unknown extrapolation method '{other}'"))),
        }
    }
}

/// Iterates `s_k, ..., s_{k+q+1}` of a fixed-point sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceWindow {
    iterates: Vec<Vec<f64>>,
}

impl SequenceWindow {
    /// Needs at least three iterates of equal, nonzero length.
    pub fn new(iterates: Vec<Vec<f64>>) -> Result<Self> {
        if iterates.len() < 3 {
            return Err(Error::Argument(format!("a window needs at least 3 iterates, got {}", iterates.len())));
        }
        let dim = iterates[0].len();
        if dim == 0 {
            return Err(Error::Argument("iterates must be nonempty".into()));
        }
        for s in &iterates {
            if s.len() != dim {
                return Err(Error::Dimension { expected: dim, found: s.len() });
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::Argument("iterates must be finite".into()));
            }
        }
        Ok(SequenceWindow { iterates })
    }

    /// Window size: the window holds `q + 2` iterates.
    pub fn q(&self) -> usize {
        self.iterates.len() - 2
    }

    pub fn dim(&self) -> usize {
        self.iterates[0].len()
    }

    pub fn iterates(&self) -> &[Vec<f64>] {
        &self.iterates
    }

    /// First differences `s_{j+1} - s_j`, `j = 0..=q`.
    pub fn differences(&self) -> Vec<Vec<f64>> {
        self.iterates.windows(2).map(|w| sub(&w[1], &w[0])).collect()
    }

    /// Second differences `Δs_{j+1} - Δs_j`, `j = 0..q`.
    pub fn second_differences(&self) -> Vec<Vec<f64>> {
        self.differences().windows(2).map(|w| sub(&w[1], &w[0])).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationStatus {
    Regular,
    /// Differences were numerically dependent; the window was cut to the
    /// leading independent block.
    RankTruncated,
    /// `s_{k+1} = s_k`: the sequence has already converged and `t = s_k`.
    Degenerate,
    /// The MPE normalization `sum d` vanished; `t` is the last combined iterate.
    Stagnated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationResult {
    pub t: Vec<f64>,
    /// Weights of `s_k, ..., s_{k+m}` with `m + 1 = gamma.len()`.
    pub gamma: Vec<f64>,
    pub generalized_residual_norm: f64,
    /// Number of difference columns carrying the extrapolation.
    pub rank_used: usize,
    pub status: ExtrapolationStatus,
}

impl ExtrapolationResult {
    /// Whether `t` came from an actual extrapolation.
    pub fn is_usable(&self) -> bool {
        matches!(self.status, ExtrapolationStatus::Regular | ExtrapolationStatus::RankTruncated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_shape_checks() {
        assert!(SequenceWindow::new(vec![vec![1.0], vec![2.0]]).is_err());
        assert!(SequenceWindow::new(vec![vec![1.0], vec![2.0, 3.0], vec![1.0]]).is_err());
        assert!(SequenceWindow::new(vec![vec![1.0], vec![f64::NAN], vec![1.0]]).is_err());
        let w = SequenceWindow::new(vec![vec![1.0], vec![0.5], vec![0.25], vec![0.125]]).unwrap();
        assert_eq!(w.q(), 2);
        assert_eq!(w.differences(), vec![vec![-0.5], vec![-0.25], vec![-0.125]]);
        assert_eq!(w.second_differences(), vec![vec![0.25], vec![0.125]]);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [ExtrapolationMethod::Rre, ExtrapolationMethod::Mpe] {
            assert_eq!(m.name().parse::<ExtrapolationMethod>().unwrap(), m);
        }
        assert!("eps".parse::<ExtrapolationMethod>().is_err());
    }
}
