use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use igamg_core::{build_system, Accelerator, CycleKind, InitialGuess, ProblemId, SmootherConfig, SolveConfig, SolveReport};
use serde::Serialize;

use crate::args::{Cli, OutputFormat};
use crate::error::{CliError, CliResult};
use crate::format::{write_history_csv, write_json, write_table_csv};
use crate::tables::{run_table, CellStatus, TableOptions, TableRow};

pub const DEFAULT_Q: usize = 4;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// One validated solve request.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemId,
    pub n: usize,
    pub p: usize,
    pub config: SolveConfig,
}

impl RunSpec {
    /// Checks everything that can be checked before assembly.
    pub fn new(problem: ProblemId, n: usize, p: usize, config: SolveConfig) -> CliResult<Self> {
        if p == 0 {
            return Err(CliError::Usage("spline degree --p must be at least 1".into()));
        }
        if n == 0 {
            return Err(CliError::Usage("--n must be at least 1".into()));
        }
        if n + p < 3 {
            return Err(CliError::Usage(format!("n={n}, p={p} leaves no interior unknowns")));
        }
        config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(levels) = config.nlevels {
            let factor = 1usize.checked_shl(levels as u32 - 1).filter(|f| *f <= n);
            match factor {
                Some(f) if n % f == 0 && n / f + p >= 3 => {}
                _ => {
                    return Err(CliError::Usage(format!("{n} elements cannot be coarsened over {levels} levels at p={p}")));
                }
            }
        }
        Ok(RunSpec { problem, n, p, config })
    }

    pub fn from_cli(cli: &Cli) -> CliResult<Self> {
        if cli.q.is_some() && cli.accelerator == Accelerator::None {
            return Err(CliError::Usage("--q needs --accelerator rre or mpe".into()));
        }
        let config = SolveConfig {
            cycle: cli.cycle,
            smoother: SmootherConfig { kind: cli.smoother, omega: cli.omega, nu1: cli.nu1, nu2: cli.nu2 },
            nlevels: cli.nlevels,
            accelerator: cli.accelerator,
            q: cli.q.unwrap_or(DEFAULT_Q),
            tol: cli.tol,
            max_iter: cli.max_iter.unwrap_or(DEFAULT_MAX_ITER),
            initial_guess: InitialGuess::Zero,
            track_error: true,
        };
        RunSpec::new(cli.problem, cli.n, cli.p, config)
    }

    pub fn dim(&self) -> usize {
        self.problem.domain().dim()
    }

    pub fn grid_label(&self) -> String {
        grid_label(self.n, self.dim())
    }

    pub fn method_label(&self) -> String {
        method_label(&self.config)
    }
}

pub fn grid_label(n: usize, dim: usize) -> String {
    if dim == 1 {
        n.to_string()
    } else {
        format!("{n}x{n}")
    }
}

pub fn method_label(config: &SolveConfig) -> String {
    let cycle = match config.cycle {
        CycleKind::TwoGrid => "two-grid",
        CycleKind::V => "V-cycle",
        CycleKind::W => "W-cycle",
    };
    match config.accelerator {
        Accelerator::None => cycle.to_string(),
        Accelerator::Rre => format!("RRE(q={})-{cycle}", config.q),
        Accelerator::Mpe => format!("MPE(q={})-{cycle}", config.q),
    }
}

/// JSON form of a single run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub problem: &'static str,
    pub grid: String,
    pub n: usize,
    pub p: usize,
    pub method: String,
    pub cycle: CycleKind,
    pub smoother: SmootherConfig,
    pub nlevels: usize,
    pub accelerator: Accelerator,
    pub q: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    pub warnings: Vec<String>,
    pub report: SolveReport,
}

pub fn run_single(spec: &RunSpec) -> CliResult<RunRecord> {
    let system = build_system(spec.problem, spec.n, spec.p)?;
    let report = igamg_core::solve(&system, &spec.config)?;
    Ok(RunRecord {
        problem: spec.problem.name(),
        grid: spec.grid_label(),
        n: spec.n,
        p: spec.p,
        method: spec.method_label(),
        cycle: spec.config.cycle,
        smoother: spec.config.smoother,
        nlevels: report.nlevels,
        accelerator: spec.config.accelerator,
        q: (spec.config.accelerator != Accelerator::None).then_some(spec.config.q),
        tol: spec.config.tol,
        max_iter: spec.config.max_iter,
        warnings: system.warnings.clone(),
        report,
    })
}

/// Writes the per-iteration history of `spec` as CSV.
pub fn emit_history<W: Write>(spec: &RunSpec, out: W) -> CliResult<RunRecord> {
    let record = run_single(spec)?;
    write_history_csv(out, &record.report)?;
    Ok(record)
}

impl From<&RunRecord> for TableRow {
    fn from(r: &RunRecord) -> Self {
        TableRow {
            grid: r.grid.clone(),
            p: r.p,
            method: r.method.clone(),
            iter: Some(r.report.cycles),
            global_iter: Some(r.report.global_iterations),
            res_l2: Some(r.report.final_residual_l2),
            err_l2: r.report.final_error_l2,
            seconds: Some(r.report.wall_time_seconds),
            status: if r.report.converged { CellStatus::Converged } else { CellStatus::NotConverged },
        }
    }
}

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

fn open_output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Parsed-flag entry point; returns the exit code.
pub fn execute(cli: &Cli) -> CliResult<i32> {
    if let Some(name) = cli.table {
        if cli.history {
            return Err(CliError::Usage("--history applies to single runs, not --table".into()));
        }
        let options = TableOptions::from_cli(cli)?;
        let rows = run_table(name, &options)?;
        let mut out = open_output(&cli.out)?;
        match cli.format {
            OutputFormat::Csv => write_table_csv(&mut out, &rows)?,
            OutputFormat::Json => write_json(&mut out, &rows)?,
        }
        out.flush()?;
        let all_converged = rows.iter().all(|r| r.status == CellStatus::Converged);
        return Ok(if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED });
    }

    let spec = RunSpec::from_cli(cli)?;
    let mut out = open_output(&cli.out)?;
    let record = match (cli.format, cli.history) {
        (OutputFormat::Csv, true) => emit_history(&spec, &mut out)?,
        (OutputFormat::Csv, false) => {
            let record = run_single(&spec)?;
            write_table_csv(&mut out, &[TableRow::from(&record)])?;
            record
        }
        (OutputFormat::Json, _) => {
            let record = run_single(&spec)?;
            write_json(&mut out, &record)?;
            record
        }
    };
    out.flush()?;
    for w in &record.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if record.report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("igamg").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn degree_zero_is_a_usage_error() {
        let err = RunSpec::from_cli(&cli(&["--p", "0"])).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
    }

    #[test]
    fn invalid_combinations() {
        for args in [
            &["--q", "4"][..],
            &["--accelerator", "rre", "--q", "0"],
            &["--omega", "1.5"],
            &["--nu1", "0", "--nu2", "0"],
            &["--n", "12", "--nlevels", "4"],
            &["--cycle", "two-grid", "--nlevels", "3"],
            &["--tol", "-1"],
        ] {
            assert!(matches!(RunSpec::from_cli(&cli(args)), Err(CliError::Usage(_))), "{args:?}");
        }
    }

    #[test]
    fn labels() {
        let spec = RunSpec::from_cli(&cli(&["--problem", "poisson2d", "--accelerator", "mpe", "--q", "8"])).unwrap();
        assert_eq!(spec.grid_label(), "64x64");
        assert_eq!(spec.method_label(), "MPE(q=8)-V-cycle");
        assert_eq!(method_label(&SolveConfig::default()), "V-cycle");
    }

    #[test]
    fn single_run_record() {
        let spec = RunSpec::from_cli(&cli(&["--n", "16", "--p", "2"])).unwrap();
        let rec = run_single(&spec).unwrap();
        assert!(rec.report.converged);
        assert_eq!(rec.nlevels, 4);
        let row = TableRow::from(&rec);
        assert_eq!(row.iter, Some(rec.report.cycles));
        assert_eq!(row.status, CellStatus::Converged);
    }
}
