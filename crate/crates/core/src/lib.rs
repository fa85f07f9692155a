//! Isogeometric multigrid solvers accelerated by restarted polynomial
//! vector extrapolation.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: compressed-row sparse matrices, small dense factorizations
//!   and the thin QR used by the extrapolation kernels.
//! * [`spline`]: open uniform B-spline spaces, dyadic refinement and
//!   tensor-product geometry maps.
//! * [`assembly`]: Galerkin assembly of the model elliptic problems and
//!   discrete error norms.
//! * [`multigrid`]: hierarchies, smoothers, two-grid / mu-cycles and dense
//!   iteration-matrix oracles.
//! * [`extrapolation`]: RRE and MPE over a window of iterates plus the
//!   restarted driver.
//! * [`solver`]: plain and accelerated multigrid solves with reports.

pub mod assembly;
pub mod error;
pub mod extrapolation;
pub mod linalg;
pub mod multigrid;
pub mod quadrature;
pub mod solver;
pub mod spline;

pub use assembly::{build_system, catalog, DiscreteSystem, Domain, EllipticCoefficients, ProblemId};
pub use error::{Error, Result};
pub use extrapolation::{ExtrapolationMethod, ExtrapolationResult, SequenceWindow};
pub use linalg::{DenseMatrix, SparseMatrix};
pub use multigrid::{build_hierarchy, Hierarchy, SmootherConfig, SmootherKind};
pub use solver::{solve, Accelerator, CycleKind, InitialGuess, SolveConfig, SolveReport};
pub use spline::{GeometryMap, KnotVector, SplineSpace};
