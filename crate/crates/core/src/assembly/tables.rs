use crate::error::Result;
use crate::quadrature::gauss_legendre_on;
use crate::spline::{basis_derivatives_at_span, GeometryMap, SplineSpace};

/// Basis values and first derivatives at the Gauss points of one element in
/// one parametric direction.
pub(crate) struct ElementTable {
    pub first_basis: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// `values[q][a]`, `derivs[q][a]` for local basis `a`.
    pub values: Vec<Vec<f64>>,
    pub derivs: Vec<Vec<f64>>,
}

pub(crate) fn direction_tables(space: &SplineSpace, n_quad: usize) -> Vec<ElementTable> {
    let kv = space.knot_vector();
    let p = space.degree();
    space
        .elements()
        .into_iter()
        .map(|el| {
            let (points, weights) = gauss_legendre_on(n_quad, el.a, el.b);
            let mut values = Vec::with_capacity(n_quad);
            let mut derivs = Vec::with_capacity(n_quad);
            for &t in &points {
                let ders = basis_derivatives_at_span(kv.knots(), p, el.span, t, p.min(1));
                values.push(ders[0].clone());
                derivs.push(if p == 0 { vec![0.0] } else { ders[1].clone() });
            }
            ElementTable { first_basis: el.span - p, points, weights, values, derivs }
        })
        .collect()
}

/// Physical point, Jacobian `dx_a/dxi_b` and its determinant at a parametric point.
pub(crate) fn map_point(geometry: Option<&GeometryMap>, xi: &[f64]) -> Result<(Vec<f64>, [[f64; 2]; 2], f64)> {
    match (geometry, xi.len()) {
        (Some(g), 2) => {
            let (x, j) = g.eval_with_jacobian(xi[0], xi[1])?;
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            Ok((x.to_vec(), j, det))
        }
        _ => Ok((xi.to_vec(), [[1.0, 0.0], [0.0, 1.0]], 1.0)),
    }
}
