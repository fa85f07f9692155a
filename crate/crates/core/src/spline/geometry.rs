use std::f64::consts::FRAC_PI_2;

use crate::error::{check_len, Error, Result};
use crate::linalg::{DenseMatrix, LuFactor};

use super::basis::{basis_derivatives_at_span, eval_all_basis};
use super::knots::{find_span, SplineSpace};

pub const ANNULUS_INNER_RADIUS: f64 = 0.2;
pub const ANNULUS_OUTER_RADIUS: f64 = 1.0;

/// Exact quarter-annulus parametrization: `s` runs radially from the inner
/// to the outer circle, `t` runs over the angle `[0, pi/2]`.
pub fn polar_annulus(s: f64, t: f64) -> [f64; 2] {
    let rho = ANNULUS_INNER_RADIUS + (ANNULUS_OUTER_RADIUS - ANNULUS_INNER_RADIUS) * s;
    let theta = FRAC_PI_2 * t;
    [rho * theta.cos(), rho * theta.sin()]
}

/// Tensor-product B-spline map from `[0,1]^2` to the plane.
///
/// Control point `(i, j)` multiplies `N_i(s) M_j(t)` and is stored at
/// `i * n_t + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryMap {
    spaces: [SplineSpace; 2],
    control_points: Vec<[f64; 2]>,
}

impl GeometryMap {
    pub fn new(spaces: [SplineSpace; 2], control_points: Vec<[f64; 2]>) -> Result<Self> {
        check_len(spaces[0].n_basis() * spaces[1].n_basis(), control_points.len())?;
        Ok(Self { spaces, control_points })
    }

    /// The identity map of the unit square.
    pub fn unit_square() -> Self {
        let lin = SplineSpace::uniform(1, 1).expect("valid space");
        Self {
            spaces: [lin.clone(), lin],
            control_points: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]],
        }
    }

    pub fn spaces(&self) -> &[SplineSpace; 2] {
        &self.spaces
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.spaces[0].degree(), self.spaces[1].degree())
    }

    pub fn control_point(&self, i: usize, j: usize) -> [f64; 2] {
        self.control_points[i * self.spaces[1].n_basis() + j]
    }

    pub fn control_points(&self) -> &[[f64; 2]] {
        &self.control_points
    }

    pub fn eval(&self, s: f64, t: f64) -> Result<[f64; 2]> {
        Ok(self.eval_with_jacobian(s, t)?.0)
    }

    /// Point and Jacobian `J[a][b] = d x_a / d xi_b`.
    pub fn eval_with_jacobian(&self, s: f64, t: f64) -> Result<([f64; 2], [[f64; 2]; 2])> {
        let [sp, tp] = &self.spaces;
        let (ps, pt) = (sp.degree(), tp.degree());
        let ks = find_span(sp.knot_vector(), s)?;
        let kt = find_span(tp.knot_vector(), t)?;
        let ds = basis_derivatives_at_span(sp.knot_vector().knots(), ps, ks, s, 1.min(ps));
        let dt = basis_derivatives_at_span(tp.knot_vector().knots(), pt, kt, t, 1.min(pt));
        let nt = tp.n_basis();
        let mut x = [0.0; 2];
        let mut jac = [[0.0; 2]; 2];
        for a in 0..=ps {
            let i = ks - ps + a;
            let (ns, dns) = (ds[0][a], if ps > 0 { ds[1][a] } else { 0.0 });
            for b in 0..=pt {
                let j = kt - pt + b;
                let (mt, dmt) = (dt[0][b], if pt > 0 { dt[1][b] } else { 0.0 });
                let c = self.control_points[i * nt + j];
                for d in 0..2 {
                    x[d] += ns * mt * c[d];
                    jac[d][0] += dns * mt * c[d];
                    jac[d][1] += ns * dmt * c[d];
                }
            }
        }
        Ok((x, jac))
    }

    /// Largest pointwise distance to `exact` on a `samples x samples` grid.
    pub fn max_deviation(&self, exact: impl Fn(f64, f64) -> [f64; 2], samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..samples {
            for b in 0..samples {
                let s = a as f64 / (samples - 1) as f64;
                let t = b as f64 / (samples - 1) as f64;
                let x = self.eval(s, t).expect("samples lie in the parameter domain");
                let e = exact(s, t);
                worst = worst.max(((x[0] - e[0]).powi(2) + (x[1] - e[1]).powi(2)).sqrt());
            }
        }
        worst
    }
}

/// Interpolates the quarter annulus `0.2 < r < 1`, `x, y > 0` at the tensor
/// Greville points of a uniform degree-`degree` space with `n_elements`
/// spans per direction.
pub fn fit_annulus_geometry(degree: usize, n_elements: usize) -> Result<GeometryMap> {
    if degree < 2 {
        return Err(Error::Argument(format!(
            "annulus geometry needs degree >= 2 to represent the curved boundary (got {degree})"
        )));
    }
    let space = SplineSpace::uniform(degree, n_elements)?;
    let n = space.n_basis();
    let g = space.knot_vector().greville();
    let colloc: Vec<Vec<f64>> = g
        .iter()
        .map(|&x| eval_all_basis(&space, x))
        .collect::<Result<_>>()?;
    let interp = BoundaryExactInterpolator::new(&colloc)?;

    // along s for every fixed t, then along t
    let mut stage = vec![[0.0; 2]; n * n];
    for j in 0..n {
        let data: Vec<[f64; 2]> = (0..n).map(|i| polar_annulus(g[i], g[j])).collect();
        for (i, c) in interp.solve(&data)?.into_iter().enumerate() {
            stage[i * n + j] = c;
        }
    }
    let mut cps = vec![[0.0; 2]; n * n];
    for i in 0..n {
        let data: Vec<[f64; 2]> = (0..n).map(|j| stage[i * n + j]).collect();
        for (j, c) in interp.solve(&data)?.into_iter().enumerate() {
            cps[i * n + j] = c;
        }
    }
    GeometryMap::new([space.clone(), space], cps)
}

/// Solves collocation systems whose first and last rows are unit vectors
/// (open knots), keeping the end coefficients bit-exact.
struct BoundaryExactInterpolator {
    colloc: Vec<Vec<f64>>,
    interior: Option<LuFactor>,
}

impl BoundaryExactInterpolator {
    fn new(colloc: &[Vec<f64>]) -> Result<Self> {
        let n = colloc.len();
        let interior = if n > 2 {
            let rows: Vec<Vec<f64>> = (1..n - 1).map(|i| colloc[i][1..n - 1].to_vec()).collect();
            Some(LuFactor::new(&DenseMatrix::from_rows(&rows)?)?)
        } else {
            None
        };
        Ok(Self { colloc: colloc.to_vec(), interior })
    }

    fn solve(&self, data: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
        let n = data.len();
        let mut out = vec![[0.0; 2]; n];
        out[0] = data[0];
        out[n - 1] = data[n - 1];
        if let Some(lu) = &self.interior {
            for d in 0..2 {
                let rhs: Vec<f64> = (1..n - 1)
                    .map(|i| {
                        data[i][d] - self.colloc[i][0] * data[0][d] - self.colloc[i][n - 1] * data[n - 1][d]
                    })
                    .collect();
                for (k, v) in lu.solve(&rhs)?.into_iter().enumerate() {
                    out[k + 1][d] = v;
                }
            }
        }
        Ok(out)
    }
}
