use crate::error::{check_len, Error, Result};
use crate::linalg::SparseMatrix;

use super::knots::{find_span, KnotVector, SplineSpace};

/// Inserts one knot (Boehm). Each entry of `coeffs` is the coefficient of one
/// basis function and may itself be a vector (a control point, or a row of
/// a transfer matrix).
pub fn insert_knot(
    kv: &KnotVector,
    coeffs: &[Vec<f64>],
    t: f64,
) -> Result<(KnotVector, Vec<Vec<f64>>)> {
    check_len(kv.n_basis(), coeffs.len())?;
    if !(t > kv.first() && t < kv.last()) {
        return Err(Error::Argument(format!("knot {t} must lie strictly inside the domain")));
    }
    let p = kv.degree();
    let u = kv.knots();
    let k = find_span(kv, t)?;
    let n = coeffs.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let row = if i + p <= k {
            coeffs[i].clone()
        } else if i <= k {
            let alpha = (t - u[i]) / (u[i + p] - u[i]);
            coeffs[i]
                .iter()
                .zip(&coeffs[i - 1])
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect()
        } else {
            coeffs[i - 1].clone()
        };
        out.push(row);
    }
    let mut knots = u.to_vec();
    knots.insert(k + 1, t);
    Ok((KnotVector::new(knots, p)?, out))
}

/// Uniform bisection of every element.
///
/// Returns the fine space and the `n_fine x n_coarse` two-scale matrix `T`:
/// the coarse spline with coefficients `c` equals the fine spline with
/// coefficients `T c`.
pub fn dyadic_refine(space: &SplineSpace) -> Result<(SplineSpace, SparseMatrix)> {
    let kv = space.knot_vector();
    if !kv.is_uniform() {
        return Err(Error::Unsupported("dyadic refinement needs uniform open knots".into()));
    }
    let n = kv.n_basis();
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut fine = kv.clone();
    let breaks = kv.breakpoints();
    for w in breaks.windows(2) {
        let (next_kv, next_rows) = insert_knot(&fine, &rows, 0.5 * (w[0] + w[1]))?;
        fine = next_kv;
        rows = next_rows;
    }
    let triplets = rows.iter().enumerate().flat_map(|(i, row)| {
        row.iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(move |(j, &v)| (i, j, v))
    });
    let two_scale = SparseMatrix::from_triplets(rows.len(), n, triplets)?;
    Ok((SplineSpace::new(fine), two_scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::eval_all_basis;

    fn column(m: &SparseMatrix, j: usize) -> Vec<f64> {
        (0..m.nrows()).map(|i| m.get(i, j)).collect()
    }

    fn max_reproduction_error(coarse: &SplineSpace, fine: &SplineSpace, t2s: &SparseMatrix, c: &[f64]) -> f64 {
        let fc = t2s.spmv(c).unwrap();
        (0..100)
            .map(|i| {
                let t = i as f64 / 99.0;
                let a: f64 = eval_all_basis(coarse, t).unwrap().iter().zip(c).map(|(b, x)| b * x).sum();
                let b: f64 = eval_all_basis(fine, t).unwrap().iter().zip(&fc).map(|(b, x)| b * x).sum();
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn linear_hat_weights() {
        let coarse = SplineSpace::uniform(1, 2).unwrap();
        let (fine, t) = dyadic_refine(&coarse).unwrap();
        assert_eq!(fine.n_elements(), 4);
        assert_eq!(column(&t, 1), vec![0.0, 0.5, 1.0, 0.5, 0.0]);
        let mut e = vec![0.0; 3];
        e[1] = 1.0;
        assert!(max_reproduction_error(&coarse, &fine, &t, &e) < 1e-13);
    }

    #[test]
    fn piecewise_constant_copies() {
        let coarse = SplineSpace::uniform(0, 3).unwrap();
        let (fine, t) = dyadic_refine(&coarse).unwrap();
        assert_eq!(fine.n_basis(), 6);
        for j in 0..3 {
            let mut expected = vec![0.0; 6];
            expected[2 * j] = 1.0;
            expected[2 * j + 1] = 1.0;
            assert_eq!(column(&t, j), expected);
        }
    }

    #[test]
    fn quadratic_subdivision_weights() {
        let coarse = SplineSpace::uniform(2, 6).unwrap();
        let (fine, t) = dyadic_refine(&coarse).unwrap();
        // coarse function 3 is interior: support [1/6, 4/6)
        let col = column(&t, 3);
        let nz: Vec<f64> = col.iter().copied().filter(|v| *v != 0.0).collect();
        assert_eq!(nz.len(), 4);
        for (a, e) in nz.iter().zip([0.25, 0.75, 0.75, 0.25]) {
            assert!((a - e).abs() < 1e-15);
        }
        let mut e = vec![0.0; coarse.n_basis()];
        e[3] = 1.0;
        assert!(max_reproduction_error(&coarse, &fine, &t, &e) < 1e-13);
    }

    #[test]
    fn two_scale_exactness_for_all_degrees() {
        for p in 0..=8 {
            for n in [1, 3, 8] {
                let coarse = SplineSpace::uniform(p, n).unwrap();
                let (fine, t) = dyadic_refine(&coarse).unwrap();
                assert_eq!(fine.degree(), p);
                assert_eq!(fine.n_elements(), 2 * n);
                assert_eq!((t.nrows(), t.ncols()), (fine.n_basis(), coarse.n_basis()));
                let c: Vec<f64> = (0..coarse.n_basis()).map(|i| ((i * 7 + 3) % 5) as f64 - 1.7).collect();
                let err = max_reproduction_error(&coarse, &fine, &t, &c);
                assert!(err < 1e-13, "p={p} n={n} err={err}");
            }
        }
    }

    #[test]
    fn refine_rejects_nonuniform() {
        let kv = KnotVector::new(vec![0.0, 0.0, 0.3, 1.0, 1.0], 1).unwrap();
        assert!(matches!(dyadic_refine(&SplineSpace::new(kv)), Err(Error::Unsupported(_))));
    }
}
