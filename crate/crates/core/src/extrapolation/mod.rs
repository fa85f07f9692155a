//! Polynomial vector extrapolation (RRE and MPE) over a window of
//! fixed-point iterates, and the restarted acceleration driver.

mod kernels;
mod restarted;
mod window;

pub use kernels::{extrapolate, generalized_residual, mpe, rre};
pub use restarted::{restarted_solve, HistoryEntry, RestartedOutcome, StepKind};
pub use window::{ExtrapolationMethod, ExtrapolationResult, ExtrapolationStatus, SequenceWindow};
