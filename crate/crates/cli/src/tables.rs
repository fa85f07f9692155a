//! Benchmark matrices: one cell per (problem, grid, degree, method).

use std::fmt;
use std::str::FromStr;

use igamg_core::{Accelerator, CycleKind, ProblemId, SmootherConfig, SolveConfig};
use serde::Serialize;

use crate::args::Cli;
use crate::error::{CliError, CliResult};
use crate::run::{grid_label, method_label, run_single, RunSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableName {
    T1,
    T4,
    T11,
    Rre1d,
    Mpe1d,
    Rre2d,
    Mpe2d,
    T13,
    T14,
    T15,
}

impl TableName {
    pub const ALL: [TableName; 10] = [
        TableName::T1,
        TableName::T4,
        TableName::T11,
        TableName::Rre1d,
        TableName::Mpe1d,
        TableName::Rre2d,
        TableName::Mpe2d,
        TableName::T13,
        TableName::T14,
        TableName::T15,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableName::T1 => "t1",
            TableName::T4 => "t4",
            TableName::T11 => "t11",
            TableName::Rre1d => "t_rre1d",
            TableName::Mpe1d => "t_mpe1d",
            TableName::Rre2d => "t_rre2d",
            TableName::Mpe2d => "t_mpe2d",
            TableName::T13 => "t13",
            TableName::T14 => "t14",
            TableName::T15 => "t15",
        }
    }
}

impl fmt::Display for TableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableName {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let key = s.to_ascii_lowercase();
        TableName::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| CliError::Usage(format!("unknown table '{s}'")))
    }
}

/// Settings shared by every cell of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableOptions {
    pub smoother: SmootherConfig,
    pub tol: f64,
    /// Overrides the per-cell budget when set.
    pub max_iter: Option<usize>,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { smoother: SmootherConfig::default(), tol: 1e-12, max_iter: None }
    }
}

impl TableOptions {
    pub fn from_cli(cli: &Cli) -> CliResult<Self> {
        let smoother = SmootherConfig { kind: cli.smoother, omega: cli.omega, nu1: cli.nu1, nu2: cli.nu2 };
        smoother.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(TableOptions { smoother, tol: cli.tol, max_iter: cli.max_iter })
    }
}

/// Plain-cycle budget in 1D, where the slowest cells need several hundred cycles.
pub const PLAIN_BUDGET_1D: usize = 1000;
/// Plain-cycle cap in 2D.
pub const PLAIN_BUDGET_2D: usize = 600;
/// Restart-cycle budget of accelerated cells.
pub const ACCELERATED_BUDGET: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkCell {
    pub problem: ProblemId,
    pub n: usize,
    pub p: usize,
    pub config: SolveConfig,
}

impl BenchmarkCell {
    pub fn method(&self) -> String {
        method_label(&self.config)
    }

    pub fn grid(&self) -> String {
        grid_label(self.n, self.problem.domain().dim())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Converged,
    NotConverged,
    Failed,
}

impl CellStatus {
    pub fn label(self) -> &'static str {
        match self {
            CellStatus::Converged => "converged",
            CellStatus::NotConverged => "not_converged",
            CellStatus::Failed => "failed",
        }
    }
}

/// One output line of a table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub grid: String,
    pub p: usize,
    pub method: String,
    pub iter: Option<usize>,
    pub global_iter: Option<usize>,
    pub res_l2: Option<f64>,
    pub err_l2: Option<f64>,
    pub seconds: Option<f64>,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkMatrix {
    pub table: TableName,
    pub cells: Vec<BenchmarkCell>,
}

fn config(options: &TableOptions, cycle: CycleKind, accelerator: Accelerator, q: usize, nlevels: Option<usize>, dim: usize) -> SolveConfig {
    let budget = match (accelerator, dim) {
        (Accelerator::None, 1) => PLAIN_BUDGET_1D,
        (Accelerator::None, _) => PLAIN_BUDGET_2D,
        _ => ACCELERATED_BUDGET,
    };
    SolveConfig {
        cycle,
        smoother: options.smoother,
        nlevels,
        accelerator,
        q,
        tol: options.tol,
        max_iter: options.max_iter.unwrap_or(budget),
        track_error: false,
        ..SolveConfig::default()
    }
}

impl BenchmarkMatrix {
    pub fn new(table: TableName, options: &TableOptions) -> Self {
        use Accelerator::{Mpe, None as Plain, Rre};
        use CycleKind::{V, W};
        let mut cells = Vec::new();
        let mut push = |problem: ProblemId, n: usize, p: usize, cfg: SolveConfig| {
            cells.push(BenchmarkCell { problem, n, p, config: cfg });
        };
        let grid_sweep = |problem: ProblemId, grids: &[usize], degrees: std::ops::RangeInclusive<usize>, acc: Accelerator, push: &mut dyn FnMut(ProblemId, usize, usize, SolveConfig)| {
            let dim = problem.domain().dim();
            for &n in grids {
                for p in degrees.clone() {
                    push(problem, n, p, config(options, V, acc, 8, None, dim));
                }
            }
        };
        match table {
            TableName::T1 => {
                for n in [16, 32, 64, 128, 256] {
                    for p in 2..=6 {
                        push(ProblemId::Poisson1d, n, p, config(options, V, Plain, 0, Some(4), 1));
                    }
                }
            }
            TableName::T4 => {
                for p in 2..=8 {
                    let q = if p <= 3 { 4 } else { 8 };
                    for (cycle, acc) in [(V, Plain), (W, Plain), (V, Rre), (V, Mpe)] {
                        push(ProblemId::Poisson1d, 64, p, config(options, cycle, acc, q, Some(4), 1));
                    }
                }
            }
            TableName::T11 => {
                for p in 1..=5 {
                    let q = if p <= 2 { 4 } else { 8 };
                    for (cycle, acc) in [(V, Plain), (W, Plain), (V, Rre), (V, Mpe)] {
                        push(ProblemId::Poisson2d, 64, p, config(options, cycle, acc, q, None, 2));
                    }
                }
            }
            TableName::Rre1d => grid_sweep(ProblemId::Poisson1d, &[32, 64, 128, 256], 2..=8, Rre, &mut push),
            TableName::Mpe1d => grid_sweep(ProblemId::Poisson1d, &[32, 64, 128, 256], 2..=8, Mpe, &mut push),
            TableName::Rre2d => grid_sweep(ProblemId::Poisson2d, &[16, 32, 64, 128], 1..=5, Rre, &mut push),
            TableName::Mpe2d => grid_sweep(ProblemId::Poisson2d, &[16, 32, 64, 128], 1..=5, Mpe, &mut push),
            TableName::T13 => grid_sweep(ProblemId::FullEllipticSquare, &[16, 32, 64], 1..=5, Rre, &mut push),
            TableName::T14 => grid_sweep(ProblemId::AdvectionDiffusion, &[16, 32, 64], 1..=4, Rre, &mut push),
            TableName::T15 => grid_sweep(ProblemId::FullEllipticAnnulus, &[16, 32, 64], 1..=5, Rre, &mut push),
        }
        BenchmarkMatrix { table, cells }
    }

    /// Runs every cell in order; a cell that errors is reported as failed.
    pub fn run(&self) -> Vec<TableRow> {
        self.cells.iter().map(run_cell).collect()
    }
}

fn run_cell(cell: &BenchmarkCell) -> TableRow {
    let outcome = RunSpec::new(cell.problem, cell.n, cell.p, cell.config.clone()).and_then(|spec| run_single(&spec));
    match outcome {
        Ok(record) => TableRow::from(&record),
        Err(e) => {
            eprintln!("{} p={} {}: {e}", cell.grid(), cell.p, cell.method());
            TableRow {
                grid: cell.grid(),
                p: cell.p,
                method: cell.method(),
                iter: None,
                global_iter: None,
                res_l2: None,
                err_l2: None,
                seconds: None,
                status: CellStatus::Failed,
            }
        }
    }
}

pub fn run_table(table: TableName, options: &TableOptions) -> CliResult<Vec<TableRow>> {
    Ok(BenchmarkMatrix::new(table, options).run())
}
