use crate::assembly::DiscreteSystem;
use crate::error::{Error, Result};
use crate::linalg::{triple_product, CholeskyFactor, LuFactor, SparseMatrix};
use crate::multigrid::smoother::{inverse_diagonal, SmootherConfig};
use crate::spline::{dyadic_refine, SplineSpace};

/// Largest coarsest-grid dimension accepted by [`build_hierarchy`].
pub const COARSE_DIM_CAP: usize = 1024;

#[derive(Debug, Clone)]
pub struct Level {
    pub matrix: SparseMatrix,
    /// Maps this level into the next finer one; `None` on the finest level.
    pub prolongation: Option<SparseMatrix>,
    /// Maps the next finer level onto this one; the transpose of `prolongation`.
    pub restriction: Option<SparseMatrix>,
    pub(crate) inv_diag: Vec<f64>,
}

impl Level {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

#[derive(Debug, Clone)]
pub enum CoarseSolver {
    Cholesky(CholeskyFactor),
    Lu(LuFactor),
}

impl CoarseSolver {
    fn new(a: &SparseMatrix, symmetric: bool) -> Result<Self> {
        let dense = a.to_dense();
        if symmetric {
            if let Ok(c) = CholeskyFactor::new(&dense) {
                return Ok(CoarseSolver::Cholesky(c));
            }
        }
        Ok(CoarseSolver::Lu(LuFactor::new(&dense)?))
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            CoarseSolver::Cholesky(c) => c.solve(b),
            CoarseSolver::Lu(l) => l.solve(b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Hierarchy {
    levels: Vec<Level>,
    smoother: SmootherConfig,
    mu: usize,
    coarse: CoarseSolver,
}

impl Hierarchy {
    /// Builds a hierarchy from a finest matrix and the prolongations between
    /// consecutive levels, ordered coarsest first.
    pub fn from_parts(
        fine: SparseMatrix,
        prolongations: Vec<SparseMatrix>,
        smoother: SmootherConfig,
        mu: usize,
        symmetric: bool,
    ) -> Result<Self> {
        smoother.validate()?;
        if mu == 0 {
            return Err(Error::Argument("cycle index mu must be at least 1".into()));
        }
        if prolongations.is_empty() {
            return Err(Error::Argument("a hierarchy needs at least two levels".into()));
        }
        let mut matrices = vec![fine];
        for p in prolongations.iter().rev() {
            let a = matrices.last().expect("nonempty");
            if p.nrows() != a.nrows() {
                return Err(Error::Dimension { expected: a.nrows(), found: p.nrows() });
            }
            let coarse = triple_product(&p.transpose(), a, p)?;
            matrices.push(coarse);
        }
        matrices.reverse();
        let coarse = CoarseSolver::new(&matrices[0], symmetric)?;
        let mut levels = Vec::with_capacity(matrices.len());
        let mut prolongations = prolongations.into_iter().map(Some).collect::<Vec<_>>();
        prolongations.push(None);
        for (matrix, p) in matrices.into_iter().zip(prolongations) {
            let inv_diag = inverse_diagonal(&matrix)?;
            let restriction = p.as_ref().map(SparseMatrix::transpose);
            levels.push(Level { matrix, prolongation: p, restriction, inv_diag });
        }
        Ok(Hierarchy { levels, smoother, mu, coarse })
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, l: usize) -> &Level {
        &self.levels[l]
    }

    pub fn finest(&self) -> &Level {
        self.levels.last().expect("at least two levels")
    }

    pub fn smoother(&self) -> &SmootherConfig {
        &self.smoother
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn coarse_solver(&self) -> &CoarseSolver {
        &self.coarse
    }
}

/// Two-scale matrix of one direction with the first and last rows and
/// columns removed.
fn interior_two_scale(coarse: &SplineSpace) -> Result<SparseMatrix> {
    let (_, t) = dyadic_refine(coarse)?;
    let rows: Vec<usize> = (1..t.nrows() - 1).collect();
    let cols: Vec<usize> = (1..t.ncols() - 1).collect();
    Ok(t.submatrix(&rows, &cols))
}

pub fn build_hierarchy(system: &DiscreteSystem, nlevels: usize, smoother: SmootherConfig, mu: usize) -> Result<Hierarchy> {
    build_hierarchy_with_cap(system, nlevels, smoother, mu, COARSE_DIM_CAP)
}

pub fn build_hierarchy_with_cap(
    system: &DiscreteSystem,
    nlevels: usize,
    smoother: SmootherConfig,
    mu: usize,
    coarse_cap: usize,
) -> Result<Hierarchy> {
    if nlevels < 2 {
        return Err(Error::Argument(format!("nlevels must be at least 2, got {nlevels}")));
    }
    let factor = 1usize.checked_shl(nlevels as u32 - 1).unwrap_or(usize::MAX);
    for space in &system.spaces {
        let n = space.n_elements();
        if n % factor != 0 {
            return Err(Error::Argument(format!(
                "{n} elements cannot be coarsened {} times",
                nlevels - 1
            )));
        }
        if !space.knot_vector().is_uniform() {
            return Err(Error::Unsupported("multigrid requires uniform knot vectors".into()));
        }
    }
    let mut prolongations = Vec::with_capacity(nlevels - 1);
    for k in 1..nlevels {
        // coarse side of the k-th transfer counted from the coarsest grid
        let per_dir: Vec<SparseMatrix> = system
            .spaces
            .iter()
            .map(|s| {
                let n_coarse = s.n_elements() / (factor >> (k - 1));
                interior_two_scale(&SplineSpace::uniform(s.degree(), n_coarse)?)
            })
            .collect::<Result<_>>()?;
        let p = match per_dir.as_slice() {
            [p] => p.clone(),
            [p0, p1] => p0.kron(p1),
            _ => return Err(Error::Unsupported(format!("{}-dimensional multigrid", per_dir.len()))),
        };
        if k == 1 && p.ncols() > coarse_cap {
            return Err(Error::Argument(format!(
                "coarsest dimension {} exceeds the direct-solve cap {coarse_cap}",
                p.ncols()
            )));
        }
        if k == 1 && p.ncols() == 0 {
            return Err(Error::Argument("coarsest grid has no interior unknowns".into()));
        }
        prolongations.push(p);
    }
    Hierarchy::from_parts(system.matrix.clone(), prolongations, smoother, mu, system.symmetric)
}
