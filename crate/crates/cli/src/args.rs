use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use igamg_core::{Accelerator, CycleKind, ProblemId, SmootherKind};

use crate::tables::TableName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Flags of the `igamg` binary.
#[derive(Debug, Clone, Parser)]
#[command(name = "igamg", version, about = "Isogeometric multigrid solves, plain or accelerated by restarted RRE/MPE")]
pub struct Cli {
    #[arg(long, default_value = "poisson1d", value_parser = parse_with_core::<ProblemId>)]
    pub problem: ProblemId,

    /// Elements per direction on the finest grid.
    #[arg(long, default_value_t = 64)]
    pub n: usize,

    /// Spline degree.
    #[arg(long, default_value_t = 2)]
    pub p: usize,

    #[arg(long, default_value = "v", value_parser = parse_with_core::<CycleKind>)]
    pub cycle: CycleKind,

    #[arg(long, default_value = "wjacobi", value_parser = parse_with_core::<SmootherKind>)]
    pub smoother: SmootherKind,

    /// Relaxation weight: a decimal or `two-thirds` for the exact ratio.
    #[arg(long, default_value = "two-thirds", value_parser = parse_omega)]
    pub omega: f64,

    #[arg(long, default_value_t = 1)]
    pub nu1: usize,

    #[arg(long, default_value_t = 1)]
    pub nu2: usize,

    /// Multigrid levels; chosen from the grid when omitted.
    #[arg(long)]
    pub nlevels: Option<usize>,

    #[arg(long, default_value = "none", value_parser = parse_with_core::<Accelerator>)]
    pub accelerator: Accelerator,

    /// Restart size of the accelerated solve (default 4).
    #[arg(long)]
    pub q: Option<usize>,

    #[arg(long, default_value_t = 1e-12, allow_hyphen_values = true)]
    pub tol: f64,

    /// Cycle budget: iterations for plain runs, restart cycles for accelerated ones.
    #[arg(long)]
    pub max_iter: Option<usize>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Run every cell of a benchmark table.
    #[arg(long, value_parser = parse_table)]
    pub table: Option<TableName>,

    /// Emit the per-iteration residual/error history.
    #[arg(long)]
    pub history: bool,
}

fn parse_with_core<T>(s: &str) -> Result<T, String>
where
    T: FromStr<Err = igamg_core::Error>,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

fn parse_table(s: &str) -> Result<TableName, String> {
    s.parse::<TableName>().map_err(|e| e.to_string())
}

pub fn parse_omega(s: &str) -> Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "two-thirds" | "2/3" => Ok(2.0 / 3.0),
        other => other.parse::<f64>().map_err(|_| format!("'{s}' is neither a number nor 'two-thirds'")),
    }
}
