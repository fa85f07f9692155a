//! Open B-spline spaces in one parametric direction, dyadic refinement, and
//! tensor-product geometry maps.

mod basis;
mod geometry;
mod knots;
mod refine;

pub use basis::{eval_all_basis, eval_basis, eval_basis_derivatives};
pub(crate) use basis::basis_derivatives_at_span;
pub use geometry::{fit_annulus_geometry, polar_annulus, GeometryMap, ANNULUS_INNER_RADIUS, ANNULUS_OUTER_RADIUS};
pub use knots::{find_span, Element, KnotVector, SplineSpace};
pub use refine::{dyadic_refine, insert_knot};
