use crate::error::{check_len, Error, Result};
use crate::linalg::{DenseMatrix, LuFactor};
use crate::multigrid::hierarchy::Hierarchy;
use crate::multigrid::smoother::{SmootherConfig, SmootherKind};

/// Largest level dimension for which dense iteration matrices are formed.
pub const ORACLE_DIM_CAP: usize = 512;

/// Error propagation matrix of one relaxation sweep.
pub fn smoother_matrix(a: &DenseMatrix, config: &SmootherConfig) -> Result<DenseMatrix> {
    let n = a.nrows();
    for i in 0..n {
        if a[(i, i)] == 0.0 {
            return Err(Error::ZeroDiagonal(i));
        }
    }
    match config.kind {
        SmootherKind::Jacobi | SmootherKind::WeightedJacobi => {
            let w = config.weight();
            let mut s = DenseMatrix::identity(n);
            for i in 0..n {
                let d = a[(i, i)];
                for j in 0..n {
                    s[(i, j)] -= w * a[(i, j)] / d;
                }
            }
            Ok(s)
        }
        SmootherKind::GaussSeidel => {
            // I - (D + L)^{-1} A
            let mut lower = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    lower[(i, j)] = a[(i, j)];
                }
            }
            let inv = LuFactor::new(&lower)?.inverse()?;
            Ok(DenseMatrix::identity(n).sub(&inv.matmul(a)))
        }
    }
}

/// Dense iteration matrix `B` and offset `c` of one cycle on `level` with
/// right-hand side `b`, so that the cycle maps `x` to `B x + c`.
///
/// `B` is built bottom-up from the exact coarsest solve (`B_0 = 0`) via
/// `B_l = S2 (I - P (I - B_{l-1}^mu) A_{l-1}^{-1} R A_l) S1`. Since the cycle is
/// consistent, `c = (I - B) A_l^{-1} b`.
pub fn iteration_matrix(h: &Hierarchy, level: usize, b: &[f64]) -> Result<(DenseMatrix, Vec<f64>)> {
    if level >= h.n_levels() {
        return Err(Error::Argument(format!("level {level} outside a {}-level hierarchy", h.n_levels())));
    }
    let size = h.level(level).dim();
    if size > ORACLE_DIM_CAP {
        return Err(Error::OracleSize { size, cap: ORACLE_DIM_CAP });
    }
    check_len(size, b.len())?;
    let cfg = h.smoother();
    let mut prev = DenseMatrix::zeros(h.level(0).dim(), h.level(0).dim());
    for l in 1..=level {
        let a = h.level(l).matrix.to_dense();
        let below = h.level(l - 1);
        let a_coarse_inv = LuFactor::new(&below.matrix.to_dense())?.inverse()?;
        let p = below.prolongation.as_ref().expect("transfer").to_dense();
        let r = below.restriction.as_ref().expect("transfer").to_dense();
        let repeats = if l == 1 { 1 } else { h.mu() };
        let inner = DenseMatrix::identity(prev.nrows()).sub(&prev.pow(repeats));
        let correction = p.matmul(&inner).matmul(&a_coarse_inv).matmul(&r).matmul(&a);
        let s = smoother_matrix(&a, cfg)?;
        let middle = DenseMatrix::identity(a.nrows()).sub(&correction);
        prev = s.pow(cfg.nu2).matmul(&middle).matmul(&s.pow(cfg.nu1));
    }
    let a = h.level(level).matrix.to_dense();
    let exact = LuFactor::new(&a)?.solve(b)?;
    let b_exact = prev.matvec(&exact)?;
    let c = exact.iter().zip(&b_exact).map(|(x, y)| x - y).collect();
    Ok((prev, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{build_system, ProblemId};
    use crate::linalg::norm2;
    use crate::multigrid::{build_hierarchy, mu_cycle};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_grid_cycle_matches_oracle() {
        let s = build_system(ProblemId::Poisson1d, 8, 1).unwrap();
        let h = build_hierarchy(&s, 2, SmootherConfig::default(), 1).unwrap();
        let (b, c) = iteration_matrix(&h, 1, &s.rhs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let x0: Vec<f64> = (0..s.n_unknowns()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y = mu_cycle(&h, 1, &s.rhs, &x0).unwrap();
            let z = b.matvec(&x0).unwrap();
            for i in 0..y.len() {
                assert!((y[i] - z[i] - c[i]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn zero_sweeps_give_a_projector() {
        let s = build_system(ProblemId::Poisson1d, 16, 2).unwrap();
        let smoother = SmootherConfig { nu1: 0, nu2: 1, ..Default::default() };
        let h = build_hierarchy(&s, 2, smoother, 1).unwrap();
        // strip the post-smoother from B to isolate the coarse correction
        let a = s.matrix.to_dense();
        let lv = h.level(0);
        let a_c_inv = LuFactor::new(&lv.matrix.to_dense()).unwrap().inverse().unwrap();
        let p = lv.prolongation.as_ref().unwrap().to_dense();
        let r = lv.restriction.as_ref().unwrap().to_dense();
        let k = DenseMatrix::identity(a.nrows()).sub(&p.matmul(&a_c_inv).matmul(&r).matmul(&a));
        assert!(k.matmul(&k).sub(&k).max_abs() < 1e-10);
        let (b, _) = iteration_matrix(&h, 1, &s.rhs).unwrap();
        let sm = smoother_matrix(&a, h.smoother()).unwrap();
        assert!(b.sub(&sm.matmul(&k)).max_abs() < 1e-10);
    }

    #[test]
    fn spectral_radius_below_one() {
        let s = build_system(ProblemId::Poisson1d, 32, 2).unwrap();
        let h = build_hierarchy(&s, 2, SmootherConfig::default(), 1).unwrap();
        let (b, _) = iteration_matrix(&h, 1, &s.rhs).unwrap();
        // power iteration on B^T B bounds the spectral radius from above by ||B||_2
        let mut v = vec![1.0; b.nrows()];
        let mut growth = 0.0;
        let bt = b.transpose();
        for _ in 0..200 {
            let w = bt.matvec(&b.matvec(&v).unwrap()).unwrap();
            growth = norm2(&w) / norm2(&v);
            let nw = norm2(&w);
            v = w.iter().map(|x| x / nw).collect();
        }
        let norm = growth.sqrt();
        assert!(norm < 1.0, "||B|| = {norm}");
    }

    #[test]
    fn oracle_size_is_capped() {
        let s = build_system(ProblemId::Poisson2d, 32, 1).unwrap();
        let h = build_hierarchy(&s, 3, SmootherConfig::default(), 1).unwrap();
        assert_eq!(
            iteration_matrix(&h, 2, &s.rhs).map(|_| ()),
            Err(Error::OracleSize { size: 961, cap: ORACLE_DIM_CAP })
        );
    }
}
