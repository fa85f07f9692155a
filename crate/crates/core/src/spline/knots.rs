use serde::Serialize;

use crate::error::{Error, Result};

/// Nondecreasing open knot sequence of a given degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
}

impl KnotVector {
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self> {
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::Argument("knots must be finite".into()));
        }
        if knots.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Argument("knots must be nondecreasing".into()));
        }
        if knots.len() < 2 * (degree + 1) {
            return Err(Error::Argument(format!(
                "{} knots cannot carry {} basis functions of degree {degree}",
                knots.len(),
                degree + 1
            )));
        }
        let first = knots[0];
        let last = knots[knots.len() - 1];
        if first == last {
            return Err(Error::Argument("knot vector spans an empty interval".into()));
        }
        let head = knots.iter().take_while(|&&k| k == first).count();
        let tail = knots.iter().rev().take_while(|&&k| k == last).count();
        if head != degree + 1 || tail != degree + 1 {
            return Err(Error::Argument(format!(
                "open knot vector needs end multiplicity {} (found {head} and {tail})",
                degree + 1
            )));
        }
        Ok(Self { knots, degree })
    }

    /// Uniform open knots on `[0, 1]` with `n_elements` equal spans.
    pub fn uniform_open(degree: usize, n_elements: usize) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::Argument("need at least one element".into()));
        }
        let mut knots = vec![0.0; degree + 1];
        knots.extend((1..n_elements).map(|i| i as f64 / n_elements as f64));
        knots.extend(std::iter::repeat(1.0).take(degree + 1));
        Self::new(knots, degree)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    pub fn first(&self) -> f64 {
        self.knots[0]
    }

    pub fn last(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    /// Distinct knot values in ascending order.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.knots.clone();
        b.dedup();
        b
    }

    /// True when the breakpoints are equally spaced and every interior knot
    /// is simple.
    pub fn is_uniform(&self) -> bool {
        let b = self.breakpoints();
        let n = b.len() - 1;
        if self.knots.len() != n - 1 + 2 * (self.degree + 1) {
            return false;
        }
        let h = (self.last() - self.first()) / n as f64;
        b.iter()
            .enumerate()
            .all(|(i, &x)| (x - (self.first() + i as f64 * h)).abs() <= 1e-12 * (1.0 + x.abs()))
    }

    /// Greville abscissae, one per basis function.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        if p == 0 {
            return (0..self.n_basis())
                .map(|i| 0.5 * (self.knots[i] + self.knots[i + 1]))
                .collect();
        }
        (0..self.n_basis())
            .map(|i| self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }
}

/// Locates the knot span `j` with `knots[j] <= t < knots[j+1]`.
///
/// At the right end of the domain the last nonempty span is returned, so
/// evaluation there is the limit from the left.
pub fn find_span(kv: &KnotVector, t: f64) -> Result<usize> {
    let (lo, hi) = (kv.first(), kv.last());
    if !(t >= lo && t <= hi) {
        return Err(Error::Domain { value: t, lo, hi });
    }
    let n = kv.n_basis();
    if t == hi {
        return Ok(n - 1);
    }
    let k = kv.knots();
    // search within [degree, n - 1]
    let (mut low, mut high) = (kv.degree(), n);
    while high - low > 1 {
        let mid = (low + high) / 2;
        if t < k[mid] {
            high = mid;
        } else {
            low = mid;
        }
    }
    Ok(low)
}

/// One nonempty knot span `[a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub span: usize,
    pub a: f64,
    pub b: f64,
}

/// Spline space spanned by the B-splines of one knot vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplineSpace {
    knot_vector: KnotVector,
    n_elements: usize,
}

impl SplineSpace {
    pub fn new(knot_vector: KnotVector) -> Self {
        let n_elements = knot_vector.breakpoints().len() - 1;
        Self { knot_vector, n_elements }
    }

    pub fn uniform(degree: usize, n_elements: usize) -> Result<Self> {
        Ok(Self::new(KnotVector::uniform_open(degree, n_elements)?))
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.knot_vector
    }

    pub fn degree(&self) -> usize {
        self.knot_vector.degree()
    }

    pub fn n_basis(&self) -> usize {
        self.knot_vector.n_basis()
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn elements(&self) -> Vec<Element> {
        let k = self.knot_vector.knots();
        (self.degree()..self.n_basis())
            .filter(|&j| k[j] < k[j + 1])
            .map(|j| Element { span: j, a: k[j], b: k[j + 1] })
            .collect()
    }
}
