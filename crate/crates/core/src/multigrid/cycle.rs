use crate::error::{check_len, Error, Result};
use crate::linalg::axpy;
use crate::multigrid::hierarchy::Hierarchy;
use crate::multigrid::smoother::smooth_in_place;

/// One recursive cycle on `level` for `A_level x = b`, starting from `x0`.
///
/// Level 0 is solved directly. On finer levels the coarse correction is
/// computed by `mu` recursive cycles from a zero initial error, or by a
/// single direct solve when the next level is the coarsest.
pub fn mu_cycle(h: &Hierarchy, level: usize, b: &[f64], x0: &[f64]) -> Result<Vec<f64>> {
    if level >= h.n_levels() {
        return Err(Error::Argument(format!("level {level} outside a {}-level hierarchy", h.n_levels())));
    }
    let n = h.level(level).dim();
    check_len(n, b.len())?;
    check_len(n, x0.len())?;
    let mut x = x0.to_vec();
    let mut work = Vec::with_capacity(n);
    cycle_in_place(h, level, b, &mut x, &mut work)?;
    Ok(x)
}

/// Two-grid cycle: smoothing on the finer level of a two-level hierarchy and
/// an exact coarse-grid correction.
pub fn two_grid_cycle(h: &Hierarchy, b: &[f64], x0: &[f64]) -> Result<Vec<f64>> {
    if h.n_levels() != 2 {
        return Err(Error::Argument(format!("two-grid cycle needs 2 levels, hierarchy has {}", h.n_levels())));
    }
    mu_cycle(h, 1, b, x0)
}

fn cycle_in_place(h: &Hierarchy, level: usize, b: &[f64], x: &mut [f64], work: &mut Vec<f64>) -> Result<()> {
    if level == 0 {
        let sol = h.coarse_solver().solve(b)?;
        x.copy_from_slice(&sol);
        return Ok(());
    }
    let lv = h.level(level);
    let below = h.level(level - 1);
    let cfg = h.smoother();
    smooth_in_place(&lv.matrix, &lv.inv_diag, b, x, cfg.kind, cfg.omega, cfg.nu1, work);

    work.resize(x.len(), 0.0);
    lv.matrix.spmv_into(x, work);
    let residual: Vec<f64> = b.iter().zip(work.iter()).map(|(bi, ai)| bi - ai).collect();
    let restriction = below.restriction.as_ref().expect("coarser levels carry transfers");
    let prolongation = below.prolongation.as_ref().expect("coarser levels carry transfers");
    let rc = restriction.spmv(&residual)?;

    let mut ec = vec![0.0; below.dim()];
    let repeats = if level == 1 { 1 } else { h.mu() };
    let mut coarse_work = Vec::with_capacity(below.dim());
    for _ in 0..repeats {
        cycle_in_place(h, level - 1, &rc, &mut ec, &mut coarse_work)?;
    }
    let correction = prolongation.spmv(&ec)?;
    axpy(1.0, &correction, x);

    smooth_in_place(&lv.matrix, &lv.inv_diag, b, x, cfg.kind, cfg.omega, cfg.nu2, work);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{build_system, ProblemId};
    use crate::linalg::{norm2, LuFactor};
    use crate::multigrid::{build_hierarchy, SmootherConfig, SmootherKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn exact_solution_is_a_fixed_point_for_every_problem() {
        for id in crate::assembly::ProblemId::ALL {
            for kind in [SmootherKind::WeightedJacobi, SmootherKind::GaussSeidel] {
                let s = build_system(id, 16, 2).unwrap();
                let smoother = SmootherConfig { kind, ..Default::default() };
                let h = build_hierarchy(&s, 3, smoother, 2).unwrap();
                let x = LuFactor::new(&s.matrix.to_dense()).unwrap().solve(&s.rhs).unwrap();
                let y = mu_cycle(&h, 2, &s.rhs, &x).unwrap();
                let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                for (u, v) in x.iter().zip(&y) {
                    assert!((u - v).abs() < 1e-12 * scale.max(1.0), "{id}: {u} vs {v}");
                }
            }
        }
    }

    #[test]
    fn two_levels_make_every_mu_the_two_grid_cycle() {
        let s = build_system(ProblemId::Poisson1d, 16, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x0 = random_vec(&mut rng, s.n_unknowns());
        let reference = two_grid_cycle(&build_hierarchy(&s, 2, SmootherConfig::default(), 1).unwrap(), &s.rhs, &x0).unwrap();
        for mu in 1..=3 {
            let h = build_hierarchy(&s, 2, SmootherConfig::default(), mu).unwrap();
            assert_eq!(mu_cycle(&h, 1, &s.rhs, &x0).unwrap(), reference);
        }
    }

    #[test]
    fn one_cycle_reduces_the_residual() {
        let s = build_system(ProblemId::Poisson1d, 32, 2).unwrap();
        let h = build_hierarchy(&s, 2, SmootherConfig::default(), 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = random_vec(&mut rng, s.n_unknowns());
        let x = two_grid_cycle(&h, &b, &vec![0.0; b.len()]).unwrap();
        let r = s.matrix.residual(&b, &x).unwrap();
        assert!(norm2(&r) < norm2(&b));
    }

    #[test]
    fn cycle_is_affine() {
        let s = build_system(ProblemId::Poisson2d, 16, 2).unwrap();
        let h = build_hierarchy(&s, 3, SmootherConfig::default(), 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = s.n_unknowns();
        for _ in 0..10 {
            let (x0, x1) = (random_vec(&mut rng, n), random_vec(&mut rng, n));
            let alpha: f64 = rng.gen_range(-1.0..2.0);
            let mix: Vec<f64> = x0.iter().zip(&x1).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
            let lhs = mu_cycle(&h, 2, &s.rhs, &mix).unwrap();
            let y0 = mu_cycle(&h, 2, &s.rhs, &x0).unwrap();
            let y1 = mu_cycle(&h, 2, &s.rhs, &x1).unwrap();
            for i in 0..n {
                assert!((lhs[i] - (alpha * y0[i] + (1.0 - alpha) * y1[i])).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn argument_checks() {
        let s = build_system(ProblemId::Poisson1d, 16, 2).unwrap();
        let h = build_hierarchy(&s, 3, SmootherConfig::default(), 1).unwrap();
        assert!(matches!(mu_cycle(&h, 3, &s.rhs, &s.rhs), Err(Error::Argument(_))));
        assert!(matches!(mu_cycle(&h, 2, &s.rhs, &[0.0]), Err(Error::Dimension { .. })));
        assert!(matches!(two_grid_cycle(&h, &s.rhs, &s.rhs), Err(Error::Argument(_))));
    }
}
