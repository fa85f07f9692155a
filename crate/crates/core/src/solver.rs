//! Plain and extrapolation-accelerated multigrid solves.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::assembly::{DiscreteSystem, L2ErrorEvaluator};
use crate::error::{check_len, Error, Result};
use crate::extrapolation::{restarted_solve, ExtrapolationMethod, HistoryEntry, StepKind};
use crate::linalg::norm2;
use crate::multigrid::{build_hierarchy_with_cap, mu_cycle, Hierarchy, SmootherConfig, COARSE_DIM_CAP};

/// Coarsest-grid cap used for two-grid runs, whose coarse grid is only one
/// refinement below the fine grid.
pub const TWO_GRID_COARSE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    TwoGrid,
    V,
    W,
}

impl CycleKind {
    pub fn mu(self) -> usize {
        match self {
            CycleKind::W => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CycleKind::TwoGrid => "two-grid",
            CycleKind::V => "v",
            CycleKind::W => "w",
        }
    }
}

impl fmt::Display for CycleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CycleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "two-grid" | "twogrid" => Ok(CycleKind::TwoGrid),
            "v" => Ok(CycleKind::V),
            "w" => Ok(CycleKind::W),
            other => Err(Error::Argument(format!("unknown cycle '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Accelerator {
    None,
    Rre,
    Mpe,
}

impl Accelerator {
    pub fn method(self) -> Option<ExtrapolationMethod> {
        match self {
            Accelerator::None => None,
            Accelerator::Rre => Some(ExtrapolationMethod::Rre),
            Accelerator::Mpe => Some(ExtrapolationMethod::Mpe),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Accelerator::None => "none",
            Accelerator::Rre => "rre",
            Accelerator::Mpe => "mpe",
        }
    }
}

impl fmt::Display for Accelerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Accelerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Accelerator::None),
            "rre" => Ok(Accelerator::Rre),
            "mpe" => Ok(Accelerator::Mpe),
            other => Err(Error::Argument(format!("unknown accelerator '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    Zero,
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub cycle: CycleKind,
    pub smoother: SmootherConfig,
    /// `None` selects [`default_nlevels`].
    pub nlevels: Option<usize>,
    pub accelerator: Accelerator,
    /// Restart size of the accelerated solve.
    pub q: usize,
    pub tol: f64,
    /// Cycle budget: multigrid iterations for plain runs, restart cycles for
    /// accelerated ones.
    pub max_iter: usize,
    pub initial_guess: InitialGuess,
    /// Record the `L2` error after every step when an exact solution exists.
    pub track_error: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            cycle: CycleKind::V,
            smoother: SmootherConfig::default(),
            nlevels: None,
            accelerator: Accelerator::None,
            q: 4,
            tol: 1e-12,
            max_iter: 1000,
            initial_guess: InitialGuess::Zero,
            track_error: false,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        self.smoother.validate()?;
        if self.accelerator != Accelerator::None && self.q == 0 {
            return Err(Error::Argument("restart size q must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Argument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Argument("max_iter must be at least 1".into()));
        }
        if let Some(l) = self.nlevels {
            if l < 2 {
                return Err(Error::Argument(format!("nlevels must be at least 2, got {l}")));
            }
            if self.cycle == CycleKind::TwoGrid && l != 2 {
                return Err(Error::Argument("a two-grid cycle uses exactly 2 levels".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    /// Multigrid iterations for plain runs, restart cycles for accelerated runs.
    pub cycles: usize,
    /// Applications of the multigrid cycle.
    pub global_iterations: usize,
    pub extrapolations: usize,
    /// Extrapolations replaced by the latest plain iterate.
    pub fallbacks: usize,
    pub nlevels: usize,
    /// Residual norm at global iterations `0..=global_iterations`; at the end
    /// of a restart cycle the entry belongs to the extrapolated vector.
    pub residual_history: Vec<f64>,
    pub error_history: Option<Vec<f64>>,
    pub final_residual_l2: f64,
    pub final_error_l2: Option<f64>,
    pub wall_time_seconds: f64,
    /// Plain runs: residuals strictly decrease after the first iteration.
    pub monotone_tail: Option<bool>,
    /// Accelerated runs: every extrapolation reduced the residual more than
    /// any inner step of its cycle.
    pub boundary_drop_dominates: Option<bool>,
    #[serde(skip)]
    pub solution: Vec<f64>,
}

/// Levels used when the configuration leaves `nlevels` open: 2 for the
/// two-grid cycle, 4 in 1D, and in 2D the fewest levels whose coarsest grid
/// fits the direct-solve cap. Fewer levels are used when the element count
/// does not allow the full ladder.
pub fn default_nlevels(system: &DiscreteSystem, cycle: CycleKind) -> Result<usize> {
    if cycle == CycleKind::TwoGrid {
        return Ok(2);
    }
    let n = system.spaces.iter().map(|s| s.n_elements()).min().unwrap_or(0);
    let p = system.degree();
    let coarse_dim = |levels: usize| -> Option<usize> {
        let factor = 1usize << (levels - 1);
        if n % factor != 0 {
            return None;
        }
        let per_dir = (n / factor + p).checked_sub(2)?;
        if per_dir == 0 {
            return None;
        }
        Some(per_dir.pow(system.dim() as u32))
    };
    if system.dim() == 1 {
        return (2..=4)
            .rev()
            .find(|&l| coarse_dim(l).is_some())
            .ok_or_else(|| Error::Argument(format!("{n} elements cannot be coarsened")));
    }
    (2..=usize::BITS as usize)
        .take_while(|&l| coarse_dim(l).is_some())
        .find(|&l| coarse_dim(l).is_some_and(|d| d <= COARSE_DIM_CAP))
        .ok_or_else(|| Error::Argument(format!("no coarsening of {n} elements fits the coarse cap {COARSE_DIM_CAP}")))
}

pub fn build_solver_hierarchy(system: &DiscreteSystem, config: &SolveConfig) -> Result<Hierarchy> {
    let nlevels = match config.nlevels {
        Some(l) => l,
        None => default_nlevels(system, config.cycle)?,
    };
    let cap = if config.cycle == CycleKind::TwoGrid { TWO_GRID_COARSE_CAP } else { COARSE_DIM_CAP };
    build_hierarchy_with_cap(system, nlevels, config.smoother, config.cycle.mu(), cap)
}

/// The map `s -> one cycle on the finest level` for right-hand side `b`.
pub fn fixed_point_map<'a>(h: &'a Hierarchy, b: &'a [f64]) -> impl Fn(&[f64]) -> Result<Vec<f64>> + 'a {
    let top = h.n_levels() - 1;
    move |s| mu_cycle(h, top, b, s)
}

/// Keeps the last entry per global iteration.
fn per_iteration(entries: &[(HistoryEntry, f64)], pick: impl Fn(&(HistoryEntry, f64)) -> f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for e in entries {
        let g = e.0.global_iteration;
        if g < out.len() {
            out[g] = pick(e);
        } else {
            out.push(pick(e));
        }
    }
    out
}

fn strictly_decreasing_tail(history: &[f64]) -> bool {
    history.iter().skip(1).collect::<Vec<_>>().windows(2).all(|w| w[1] < w[0])
}

fn boundary_drops_dominate(history: &[HistoryEntry]) -> Option<bool> {
    let mut any = false;
    let mut inner_best: f64 = 0.0;
    for pair in history.windows(2) {
        let (prev, cur) = (pair[0], pair[1]);
        let drop = prev.metric / cur.metric;
        match cur.kind {
            StepKind::Inner => inner_best = inner_best.max(drop),
            StepKind::Extrapolated => {
                any = true;
                if drop <= inner_best {
                    return Some(false);
                }
                inner_best = 0.0;
            }
            StepKind::Initial => {}
        }
    }
    any.then_some(true)
}

pub fn solve(system: &DiscreteSystem, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let n = system.n_unknowns();
    let x0 = match &config.initial_guess {
        InitialGuess::Zero => vec![0.0; n],
        InitialGuess::Given(v) => {
            check_len(n, v.len())?;
            v.clone()
        }
    };
    let evaluator = match (&system.exact_solution, config.track_error) {
        (Some(u), true) => Some(L2ErrorEvaluator::new(system, u.as_ref())?),
        _ => None,
    };
    let residual = |x: &[f64]| -> Result<f64> { Ok(norm2(&system.matrix.residual(&system.rhs, x)?)) };

    let start = Instant::now();
    let h = build_solver_hierarchy(system, config)?;
    let map = fixed_point_map(&h, &system.rhs);

    let mut errors: Vec<f64> = Vec::new();
    let mut record_error = |x: &[f64]| -> Result<()> {
        if let Some(ev) = &evaluator {
            errors.push(ev.l2(x)?);
        }
        Ok(())
    };

    let mut report = match config.accelerator.method() {
        None => {
            let mut x = x0;
            let mut history = vec![residual(&x)?];
            record_error(&x)?;
            let mut converged = history[0] < config.tol;
            let mut iterations = 0;
            while !converged && iterations < config.max_iter {
                x = map(&x)?;
                iterations += 1;
                let r = residual(&x)?;
                if !r.is_finite() {
                    return Err(Error::Argument(format!("residual became non-finite after {iterations} cycles")));
                }
                history.push(r);
                record_error(&x)?;
                converged = r < config.tol;
            }
            SolveReport {
                converged,
                cycles: iterations,
                global_iterations: iterations,
                extrapolations: 0,
                fallbacks: 0,
                nlevels: h.n_levels(),
                final_residual_l2: *history.last().expect("initial residual"),
                monotone_tail: Some(strictly_decreasing_tail(&history)),
                residual_history: history,
                error_history: None,
                final_error_l2: None,
                wall_time_seconds: 0.0,
                boundary_drop_dominates: None,
                solution: x,
            }
        }
        Some(method) => {
            let out = restarted_solve(
                &map,
                x0,
                config.q,
                method,
                config.tol,
                config.max_iter,
                |x| {
                    record_error(x)?;
                    residual(x)
                },
            )?;
            let paired: Vec<(HistoryEntry, f64)> =
                out.history.iter().enumerate().map(|(i, e)| (*e, errors.get(i).copied().unwrap_or(f64::NAN))).collect();
            let residual_history = per_iteration(&paired, |e| e.0.metric);
            let error_series = per_iteration(&paired, |e| e.1);
            errors = error_series;
            SolveReport {
                converged: out.converged,
                cycles: out.cycles,
                global_iterations: out.global_iterations,
                extrapolations: out.extrapolations,
                fallbacks: out.fallbacks,
                nlevels: h.n_levels(),
                residual_history,
                error_history: None,
                final_residual_l2: out.final_metric,
                final_error_l2: None,
                wall_time_seconds: 0.0,
                monotone_tail: None,
                boundary_drop_dominates: boundary_drops_dominate(&out.history),
                solution: out.solution,
            }
        }
    };
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    if evaluator.is_some() {
        report.error_history = Some(errors);
    }
    report.final_error_l2 = match &evaluator {
        Some(ev) => Some(ev.l2(&report.solution)?),
        None => match &system.exact_solution {
            Some(u) => Some(L2ErrorEvaluator::new(system, u.as_ref())?.l2(&report.solution)?),
            None => None,
        },
    };
    Ok(report)
}
