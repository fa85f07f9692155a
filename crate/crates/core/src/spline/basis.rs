use crate::error::{Error, Result};

use super::knots::{find_span, SplineSpace};

/// Values of the `p + 1` nonvanishing B-splines at `t`, together with the
/// span index `j`; entry `i` belongs to basis function `j - p + i`.
pub fn eval_basis(space: &SplineSpace, t: f64) -> Result<(usize, Vec<f64>)> {
    let kv = space.knot_vector();
    let span = find_span(kv, t)?;
    let mut ders = basis_derivatives_at_span(kv.knots(), kv.degree(), span, t, 0);
    Ok((span, ders.swap_remove(0)))
}

/// Derivatives of the nonvanishing B-splines up to `max_order`; row `k`
/// holds the `k`-th derivatives.
pub fn eval_basis_derivatives(
    space: &SplineSpace,
    t: f64,
    max_order: usize,
) -> Result<(usize, Vec<Vec<f64>>)> {
    let kv = space.knot_vector();
    if max_order > kv.degree() {
        return Err(Error::Argument(format!(
            "derivative order {max_order} exceeds degree {}",
            kv.degree()
        )));
    }
    let span = find_span(kv, t)?;
    Ok((span, basis_derivatives_at_span(kv.knots(), kv.degree(), span, t, max_order)))
}

/// All `n_basis` basis values at `t` (zeros outside the local support).
pub fn eval_all_basis(space: &SplineSpace, t: f64) -> Result<Vec<f64>> {
    let (span, vals) = eval_basis(space, t)?;
    let p = space.degree();
    let mut all = vec![0.0; space.n_basis()];
    all[span - p..=span].copy_from_slice(&vals);
    Ok(all)
}

/// Cox-de Boor triangle with derivative recurrence for a known span.
///
/// Returns `(n + 1) x (p + 1)` values. The caller guarantees that
/// `knots[span] <= t <= knots[span + 1]` and that the span is nonempty.
pub(crate) fn basis_derivatives_at_span(
    knots: &[f64],
    p: usize,
    span: usize,
    t: f64,
    n: usize,
) -> Vec<Vec<f64>> {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            // lower triangle stores knot differences
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    let mut ders = vec![vec![0.0; p + 1]; n + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    if n == 0 {
        return ders;
    }

    let mut a = [vec![0.0; p + 1], vec![0.0; p + 1]];
    let pi = p as i64;
    for r in 0..=pi {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=n as i64 {
            let mut d = 0.0;
            let rk = r - k;
            let pk = pi - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[(pk + 1) as usize][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk as usize];
            }
            let j1 = if rk >= -1 { 1 } else { -rk };
            let j2 = if r - 1 <= pk { k - 1 } else { pi - r };
            for j in j1..=j2 {
                let (ju, idx) = (j as usize, (rk + j) as usize);
                a[s2][ju] = (a[s1][ju] - a[s1][ju - 1]) / ndu[(pk + 1) as usize][idx];
                d += a[s2][ju] * ndu[idx][pk as usize];
            }
            if r <= pk {
                let ku = k as usize;
                a[s2][ku] = -a[s1][ku - 1] / ndu[(pk + 1) as usize][r as usize];
                d += a[s2][ku] * ndu[r as usize][pk as usize];
            }
            ders[k as usize][r as usize] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for (k, row) in ders.iter_mut().enumerate().skip(1) {
        row.iter_mut().for_each(|v| *v *= factor);
        factor *= (p as f64) - k as f64;
    }
    ders
}
