//! Benchmark harness around `igamg-core`: single runs, per-iteration
//! histories and the reference benchmark tables, written as CSV or JSON.

pub mod args;
pub mod error;
pub mod format;
pub mod run;
pub mod tables;

pub use args::{Cli, OutputFormat};
pub use error::{CliError, CliResult};
pub use run::{emit_history, execute, run_single, RunRecord, RunSpec, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE};
pub use tables::{run_table, BenchmarkMatrix, CellStatus, TableName, TableOptions, TableRow};
