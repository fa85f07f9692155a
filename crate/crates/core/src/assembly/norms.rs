use crate::assembly::assemble::DiscreteSystem;
use crate::assembly::tables::{direction_tables, map_point, ElementTable};
use crate::error::{check_len, Error, Result};
use crate::linalg::norm2;

/// Precomputed quadrature data for repeated `L2` error evaluation against a
/// fixed exact solution. The default rule is the `p + 1` point Gauss rule of
/// the assembly, which is what the tabulated reference errors use.
pub struct L2ErrorEvaluator {
    tables: Vec<Vec<ElementTable>>,
    n_last: usize,
    /// Per element, per tensor quadrature point: weight times `|det J|` and
    /// the exact value.
    samples: Vec<Vec<(f64, f64)>>,
    n_unknowns: usize,
    interior_dofs: Vec<usize>,
    n_full: usize,
}

impl L2ErrorEvaluator {
    pub fn new(system: &DiscreteSystem, exact: &dyn Fn(&[f64]) -> f64) -> Result<Self> {
        let n_quad = system.spaces.iter().map(|s| s.degree()).max().unwrap_or(0) + 1;
        Self::with_points(system, exact, n_quad)
    }

    pub fn with_points(system: &DiscreteSystem, exact: &dyn Fn(&[f64]) -> f64, n_quad: usize) -> Result<Self> {
        let tables: Vec<Vec<ElementTable>> = system.spaces.iter().map(|s| direction_tables(s, n_quad)).collect();
        let geometry = system.geometry.as_ref();
        let mut samples = Vec::new();
        match tables.as_slice() {
            [t] => {
                for el in t {
                    samples.push(el.points.iter().zip(&el.weights).map(|(&x, &w)| (w, exact(&[x]))).collect());
                }
            }
            [t0, t1] => {
                for e0 in t0 {
                    for e1 in t1 {
                        let mut s = Vec::with_capacity(e0.points.len() * e1.points.len());
                        for (q0, &xi0) in e0.points.iter().enumerate() {
                            for (q1, &xi1) in e1.points.iter().enumerate() {
                                let (x, _, det) = map_point(geometry, &[xi0, xi1])?;
                                s.push((e0.weights[q0] * e1.weights[q1] * det.abs(), exact(&x)));
                            }
                        }
                        samples.push(s);
                    }
                }
            }
            _ => return Err(Error::Unsupported(format!("{}-dimensional error norm", tables.len()))),
        }
        Ok(Self {
            n_last: system.spaces.last().map(|s| s.n_basis()).unwrap_or(0),
            tables,
            samples,
            n_unknowns: system.n_unknowns(),
            interior_dofs: system.interior_dofs.clone(),
            n_full: system.n_full(),
        })
    }

    /// `sqrt(int (u_h - u)^2)` for interior coefficients `u_h`.
    pub fn l2(&self, coefficients: &[f64]) -> Result<f64> {
        check_len(self.n_unknowns, coefficients.len())?;
        let mut full = vec![0.0; self.n_full];
        for (&g, &v) in self.interior_dofs.iter().zip(coefficients) {
            full[g] = v;
        }
        let mut total = 0.0;
        match self.tables.as_slice() {
            [t] => {
                for (el, samples) in t.iter().zip(&self.samples) {
                    for (q, &(w, u)) in samples.iter().enumerate() {
                        let uh: f64 = el.values[q].iter().enumerate().map(|(a, n)| n * full[el.first_basis + a]).sum();
                        total += w * (uh - u) * (uh - u);
                    }
                }
            }
            [t0, t1] => {
                let mut k = 0;
                for e0 in t0 {
                    for e1 in t1 {
                        let samples = &self.samples[k];
                        k += 1;
                        let nq1 = e1.points.len();
                        for (i, &(w, u)) in samples.iter().enumerate() {
                            let (q0, q1) = (i / nq1, i % nq1);
                            let mut uh = 0.0;
                            for (a0, n0) in e0.values[q0].iter().enumerate() {
                                let base = (e0.first_basis + a0) * self.n_last + e1.first_basis;
                                let inner: f64 = e1.values[q1].iter().enumerate().map(|(a1, n1)| n1 * full[base + a1]).sum();
                                uh += n0 * inner;
                            }
                            total += w * (uh - u) * (uh - u);
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(total.sqrt())
    }
}

pub fn l2_error(system: &DiscreteSystem, coefficients: &[f64], exact: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
    check_len(system.n_unknowns(), coefficients.len())?;
    L2ErrorEvaluator::new(system, exact)?.l2(coefficients)
}

/// Euclidean norm of `b - A x`.
pub fn residual_l2(system: &DiscreteSystem, candidate: &[f64]) -> Result<f64> {
    Ok(norm2(&system.matrix.residual(&system.rhs, candidate)?))
}
