//! Geometric multigrid over nested spline spaces.
//!
//! Level 0 is the coarsest grid. Coarse operators are Galerkin products
//! `P^T A P` with the interior-restricted two-scale matrix as `P`.

mod cycle;
mod hierarchy;
mod oracle;
mod smoother;

pub use cycle::{mu_cycle, two_grid_cycle};
pub use hierarchy::{build_hierarchy, build_hierarchy_with_cap, CoarseSolver, Hierarchy, Level, COARSE_DIM_CAP};
pub use oracle::{iteration_matrix, smoother_matrix, ORACLE_DIM_CAP};
pub use smoother::{smooth, SmootherConfig, SmootherKind};
