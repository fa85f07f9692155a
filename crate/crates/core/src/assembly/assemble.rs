use std::fmt;

use crate::assembly::problem::{catalog, EllipticCoefficients, ProblemId, ScalarFn};
use crate::assembly::tables::{direction_tables, map_point, ElementTable};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::spline::{fit_annulus_geometry, GeometryMap, SplineSpace};

/// Stiffness matrix and load vector over all basis functions, before the
/// boundary functions are eliminated.
#[derive(Debug, Clone)]
pub struct FullSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Linear system over the interior unknowns of one grid.
#[derive(Clone)]
pub struct DiscreteSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub spaces: Vec<SplineSpace>,
    pub geometry: Option<GeometryMap>,
    /// Tensor index (`i0 * n1 + i1` in 2D) of every unknown, ascending.
    pub interior_dofs: Vec<usize>,
    pub exact_solution: Option<ScalarFn>,
    pub symmetric: bool,
    pub problem: Option<ProblemId>,
    pub warnings: Vec<String>,
}

impl fmt::Debug for DiscreteSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteSystem")
            .field("problem", &self.problem)
            .field("unknowns", &self.rhs.len())
            .field("nnz", &self.matrix.nnz())
            .field("spaces", &self.spaces)
            .field("symmetric", &self.symmetric)
            .field("warnings", &self.warnings)
            .finish_non_exhaustive()
    }
}

impl DiscreteSystem {
    pub fn dim(&self) -> usize {
        self.spaces.len()
    }

    pub fn n_unknowns(&self) -> usize {
        self.rhs.len()
    }

    pub fn degree(&self) -> usize {
        self.spaces[0].degree()
    }

    /// Element count of the first direction; all catalog grids are square.
    pub fn n_elements(&self) -> usize {
        self.spaces[0].n_elements()
    }

    pub fn n_full(&self) -> usize {
        self.spaces.iter().map(|s| s.n_basis()).product()
    }

    /// Coefficients over all basis functions with zero boundary values.
    pub fn expand(&self, interior: &[f64]) -> Result<Vec<f64>> {
        crate::error::check_len(self.n_unknowns(), interior.len())?;
        let mut full = vec![0.0; self.n_full()];
        for (&g, &v) in self.interior_dofs.iter().zip(interior) {
            full[g] = v;
        }
        Ok(full)
    }
}

pub fn assemble(
    problem: &EllipticCoefficients,
    spaces: &[SplineSpace],
    geometry: Option<&GeometryMap>,
) -> Result<DiscreteSystem> {
    let n_quad = spaces.iter().map(|s| s.degree()).max().unwrap_or(0) + 1;
    assemble_with_quadrature(problem, spaces, geometry, n_quad)
}

pub fn assemble_with_quadrature(
    problem: &EllipticCoefficients,
    spaces: &[SplineSpace],
    geometry: Option<&GeometryMap>,
    n_quad: usize,
) -> Result<DiscreteSystem> {
    let full = assemble_full(problem, spaces, geometry, n_quad)?;
    let interior = interior_dofs(spaces);
    let matrix = full.matrix.submatrix(&interior, &interior);
    let rhs = interior.iter().map(|&g| full.rhs[g]).collect();
    Ok(DiscreteSystem {
        matrix,
        rhs,
        spaces: spaces.to_vec(),
        geometry: geometry.cloned(),
        interior_dofs: interior,
        exact_solution: problem.exact_solution.clone(),
        symmetric: problem.symmetric,
        problem: None,
        warnings: full.warnings,
    })
}

fn interior_dofs(spaces: &[SplineSpace]) -> Vec<usize> {
    match spaces {
        [s] => (1..s.n_basis() - 1).collect(),
        [s0, s1] => {
            let n1 = s1.n_basis();
            (1..s0.n_basis() - 1).flat_map(|i| (1..n1 - 1).map(move |j| i * n1 + j)).collect()
        }
        _ => Vec::new(),
    }
}

fn band(n: usize, p: usize, i: usize) -> std::ops::RangeInclusive<usize> {
    i.saturating_sub(p)..=(i + p).min(n - 1)
}

#[derive(Default)]
struct CoefficientWarnings {
    asymmetric: bool,
    negative_reaction: bool,
}

impl CoefficientWarnings {
    fn check(&mut self, a: &[[f64; 2]; 2], c: f64, dim: usize) {
        if dim == 2 {
            let scale = a[0][1].abs().max(a[1][0].abs()).max(1.0);
            if (a[0][1] - a[1][0]).abs() > 1e-14 * scale {
                self.asymmetric = true;
            }
        }
        if c < 0.0 {
            self.negative_reaction = true;
        }
    }

    fn into_messages(self) -> Vec<String> {
        let mut out = Vec::new();
        if self.asymmetric {
            out.push("diffusion tensor is not symmetric at some quadrature points".to_string());
        }
        if self.negative_reaction {
            out.push("reaction coefficient is negative at some quadrature points".to_string());
        }
        out
    }
}

/// Assembles over every basis function with `n_quad` Gauss points per
/// direction and element. Elements are visited in a fixed order.
pub fn assemble_full(
    problem: &EllipticCoefficients,
    spaces: &[SplineSpace],
    geometry: Option<&GeometryMap>,
    n_quad: usize,
) -> Result<FullSystem> {
    if spaces.len() != problem.dim {
        return Err(Error::Argument(format!(
            "problem is {}-dimensional but {} spaces were given",
            problem.dim,
            spaces.len()
        )));
    }
    if n_quad == 0 {
        return Err(Error::Argument("at least one quadrature point is required".into()));
    }
    match spaces {
        [s] => assemble_1d(problem, s, n_quad),
        [s0, s1] => assemble_2d(problem, s0, s1, geometry, n_quad),
        _ => Err(Error::Unsupported(format!("{}-dimensional assembly", spaces.len()))),
    }
}

fn assemble_1d(problem: &EllipticCoefficients, space: &SplineSpace, n_quad: usize) -> Result<FullSystem> {
    let n = space.n_basis();
    let p = space.degree();
    let pattern: Vec<Vec<usize>> = (0..n).map(|i| band(n, p, i).collect()).collect();
    let mut matrix = SparseMatrix::from_pattern(n, n, &pattern)?;
    let mut rhs = vec![0.0; n];
    let mut warnings = CoefficientWarnings::default();
    let nl = p + 1;
    let mut local = vec![0.0; nl * nl];
    let mut local_rhs = vec![0.0; nl];

    for el in direction_tables(space, n_quad) {
        local.iter_mut().for_each(|v| *v = 0.0);
        local_rhs.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..el.points.len() {
            let x = [el.points[q]];
            let a = (problem.diffusion)(&x);
            let b = (problem.advection)(&x);
            let c = (problem.reaction)(&x);
            let f = (problem.source)(&x);
            warnings.check(&a, c, 1);
            let w = el.weights[q];
            let (nv, dv) = (&el.values[q], &el.derivs[q]);
            for i in 0..nl {
                local_rhs[i] += w * f * nv[i];
                for j in 0..nl {
                    local[i * nl + j] += w * (a[0][0] * dv[i] * dv[j] + b[0] * dv[j] * nv[i] + c * nv[i] * nv[j]);
                }
            }
        }
        for i in 0..nl {
            let gi = el.first_basis + i;
            rhs[gi] += local_rhs[i];
            for j in 0..nl {
                matrix.add_to(gi, el.first_basis + j, local[i * nl + j])?;
            }
        }
    }
    Ok(FullSystem { matrix, rhs, warnings: warnings.into_messages() })
}

fn assemble_2d(
    problem: &EllipticCoefficients,
    s0: &SplineSpace,
    s1: &SplineSpace,
    geometry: Option<&GeometryMap>,
    n_quad: usize,
) -> Result<FullSystem> {
    let (n0, n1) = (s0.n_basis(), s1.n_basis());
    let (p0, p1) = (s0.degree(), s1.degree());
    let mut pattern = Vec::with_capacity(n0 * n1);
    for i0 in 0..n0 {
        for i1 in 0..n1 {
            let mut row = Vec::new();
            for j0 in band(n0, p0, i0) {
                row.extend(band(n1, p1, i1).map(|j1| j0 * n1 + j1));
            }
            pattern.push(row);
        }
    }
    let mut matrix = SparseMatrix::from_pattern(n0 * n1, n0 * n1, &pattern)?;
    let mut rhs = vec![0.0; n0 * n1];
    let mut warnings = CoefficientWarnings::default();

    let t0 = direction_tables(s0, n_quad);
    let t1 = direction_tables(s1, n_quad);
    let nl = (p0 + 1) * (p1 + 1);
    let mut local = vec![0.0; nl * nl];
    let mut local_rhs = vec![0.0; nl];
    let mut phi = vec![0.0; nl];
    let mut grad = vec![[0.0; 2]; nl];
    let mut agrad = vec![[0.0; 2]; nl];
    let mut dofs = vec![0usize; nl];

    for e0 in &t0 {
        for e1 in &t1 {
            local.iter_mut().for_each(|v| *v = 0.0);
            local_rhs.iter_mut().for_each(|v| *v = 0.0);
            for q0 in 0..e0.points.len() {
                for q1 in 0..e1.points.len() {
                    let xi = [e0.points[q0], e1.points[q1]];
                    let (x, jac, det) = map_point(geometry, &xi)?;
                    if !(det > 0.0) {
                        return Err(Error::Geometry(format!(
                            "Jacobian determinant {det:e} at parametric point ({}, {})",
                            xi[0], xi[1]
                        )));
                    }
                    let a = (problem.diffusion)(&x);
                    let b = (problem.advection)(&x);
                    let c = (problem.reaction)(&x);
                    let f = (problem.source)(&x);
                    warnings.check(&a, c, 2);
                    let w = e0.weights[q0] * e1.weights[q1] * det;
                    // grad_x = J^{-T} grad_xi
                    let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
                    fill_local_basis(e0, e1, q0, q1, &inv, &mut phi, &mut grad);
                    for k in 0..nl {
                        let g = grad[k];
                        agrad[k] = [a[0][0] * g[0] + a[0][1] * g[1], a[1][0] * g[0] + a[1][1] * g[1]];
                    }
                    for i in 0..nl {
                        let (gi, pi) = (grad[i], phi[i]);
                        local_rhs[i] += w * f * pi;
                        let row = &mut local[i * nl..(i + 1) * nl];
                        for j in 0..nl {
                            let adv = b[0] * grad[j][0] + b[1] * grad[j][1];
                            row[j] += w * (gi[0] * agrad[j][0] + gi[1] * agrad[j][1] + (adv + c * phi[j]) * pi);
                        }
                    }
                }
            }
            for a0 in 0..=p0 {
                for a1 in 0..=p1 {
                    dofs[a0 * (p1 + 1) + a1] = (e0.first_basis + a0) * n1 + e1.first_basis + a1;
                }
            }
            for i in 0..nl {
                rhs[dofs[i]] += local_rhs[i];
                for j in 0..nl {
                    matrix.add_to(dofs[i], dofs[j], local[i * nl + j])?;
                }
            }
        }
    }
    Ok(FullSystem { matrix, rhs, warnings: warnings.into_messages() })
}

fn fill_local_basis(
    e0: &ElementTable,
    e1: &ElementTable,
    q0: usize,
    q1: usize,
    inv: &[[f64; 2]; 2],
    phi: &mut [f64],
    grad: &mut [[f64; 2]],
) {
    let (v0, d0) = (&e0.values[q0], &e0.derivs[q0]);
    let (v1, d1) = (&e1.values[q1], &e1.derivs[q1]);
    let m1 = v1.len();
    for a0 in 0..v0.len() {
        for a1 in 0..m1 {
            let k = a0 * m1 + a1;
            let gs = d0[a0] * v1[a1];
            let gt = v0[a0] * d1[a1];
            phi[k] = v0[a0] * v1[a1];
            grad[k] = [inv[0][0] * gs + inv[1][0] * gt, inv[0][1] * gs + inv[1][1] * gt];
        }
    }
}

/// Assembles a catalog problem on a uniform grid of `n` elements per
/// direction and degree `p`.
pub fn build_system(id: ProblemId, n: usize, p: usize) -> Result<DiscreteSystem> {
    if p == 0 {
        return Err(Error::Argument("degree must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Argument("element count must be at least 1".into()));
    }
    if n + p < 3 {
        return Err(Error::Argument(format!("n={n}, p={p} leaves no interior unknowns")));
    }
    let problem = catalog(id);
    let dim = problem.domain.dim();
    let space = SplineSpace::uniform(p, n)?;
    let spaces = vec![space; dim];
    let geometry = match problem.domain {
        crate::assembly::Domain::UnitInterval => None,
        crate::assembly::Domain::UnitSquare => Some(GeometryMap::unit_square()),
        crate::assembly::Domain::QuarterAnnulus => Some(fit_annulus_geometry(p.max(2), n)?),
    };
    let mut system = assemble(&problem.coefficients, &spaces, geometry.as_ref())?;
    system.problem = Some(id);
    Ok(system)
}
