use serde::Serialize;

use crate::error::{Error, Result};

use super::kernels::extrapolate;
use super::window::{ExtrapolationMethod, ExtrapolationStatus, SequenceWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Initial,
    Inner,
    Extrapolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryEntry {
    /// Fixed-point applications performed so far.
    pub global_iteration: usize,
    pub metric: f64,
    pub kind: StepKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartedOutcome {
    pub solution: Vec<f64>,
    pub converged: bool,
    /// Restart cycles whose inner steps ran, including a final partial one.
    pub cycles: usize,
    pub global_iterations: usize,
    pub extrapolations: usize,
    /// Extrapolations that fell back to the latest plain iterate.
    pub fallbacks: usize,
    pub history: Vec<HistoryEntry>,
    pub final_metric: f64,
}

/// Restarted extrapolation: from the current start `s`, generate
/// `s_1 .. s_{q+1}` with `step`, extrapolate, test the extrapolated vector
/// and restart from it.
///
/// `test` is evaluated after every inner step as well; the run stops as soon
/// as any evaluated vector satisfies `test(v) < tol`. Degenerate or
/// stagnated windows restart from `s_{q+1}` instead. Without convergence the
/// best vector seen is returned.
pub fn restarted_solve<G, T>(
    mut step: G,
    s0: Vec<f64>,
    q: usize,
    method: ExtrapolationMethod,
    tol: f64,
    max_cycles: usize,
    mut test: T,
) -> Result<RestartedOutcome>
where
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
    T: FnMut(&[f64]) -> Result<f64>,
{
    if q == 0 {
        return Err(Error::Argument("restart size q must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let mut out = RestartedOutcome {
        solution: Vec::new(),
        converged: false,
        cycles: 0,
        global_iterations: 0,
        extrapolations: 0,
        fallbacks: 0,
        history: Vec::new(),
        final_metric: f64::INFINITY,
    };
    let mut start = s0;
    let m0 = test(&start)?;
    out.history.push(HistoryEntry { global_iteration: 0, metric: m0, kind: StepKind::Initial });
    let mut best = (m0, start.clone());
    if m0 < tol {
        out.converged = true;
        out.final_metric = m0;
        out.solution = start;
        return Ok(out);
    }

    for _ in 0..max_cycles {
        out.cycles += 1;
        let mut iterates = Vec::with_capacity(q + 2);
        iterates.push(start);
        for _ in 0..=q {
            let next = step(iterates.last().expect("window starts nonempty"))?;
            out.global_iterations += 1;
            let m = test(&next)?;
            out.history.push(HistoryEntry { global_iteration: out.global_iterations, metric: m, kind: StepKind::Inner });
            if m < best.0 {
                best = (m, next.clone());
            }
            if m < tol {
                out.converged = true;
                out.final_metric = m;
                out.solution = next;
                return Ok(out);
            }
            iterates.push(next);
        }
        let window = SequenceWindow::new(iterates)?;
        let result = extrapolate(&window, method)?;
        out.extrapolations += 1;
        let usable = result.is_usable() && result.t.iter().all(|v| v.is_finite());
        let candidate = if usable {
            result.t
        } else {
            out.fallbacks += 1;
            window.iterates().last().expect("window is nonempty").clone()
        };
        let m = test(&candidate)?;
        out.history.push(HistoryEntry {
            global_iteration: out.global_iterations,
            metric: m,
            kind: StepKind::Extrapolated,
        });
        if m < best.0 {
            best = (m, candidate.clone());
        }
        if m < tol {
            out.converged = true;
            out.final_metric = m;
            out.solution = candidate;
            return Ok(out);
        }
        if matches!(result.status, ExtrapolationStatus::Degenerate) {
            // a constant sequence will not move again
            break;
        }
        start = candidate;
    }
    out.final_metric = best.0;
    out.solution = best.1;
    Ok(out)
}
