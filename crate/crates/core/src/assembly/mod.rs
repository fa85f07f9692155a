//! Galerkin assembly of the model elliptic problems with homogeneous
//! Dirichlet conditions, plus discrete error and residual norms.

mod assemble;
mod norms;
mod problem;
mod tables;

pub use assemble::{assemble, assemble_full, assemble_with_quadrature, build_system, DiscreteSystem, FullSystem};
pub use norms::{l2_error, residual_l2, L2ErrorEvaluator};
pub use problem::{catalog, Domain, EllipticCoefficients, Problem, ProblemId, ScalarFn};
