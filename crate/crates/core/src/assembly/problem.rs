use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Coefficient evaluated at a physical point. One-dimensional problems read
/// only `x[0]`.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> [f64; 2] + Send + Sync>;
pub type TensorFn = Arc<dyn Fn(&[f64]) -> [[f64; 2]; 2] + Send + Sync>;

/// Data of `-div(A grad u) + B . grad u + c u = f`.
///
/// For `dim == 1` only the leading entries of `A` and `B` are used.
#[derive(Clone)]
pub struct EllipticCoefficients {
    pub dim: usize,
    pub diffusion: TensorFn,
    pub advection: VectorFn,
    pub reaction: ScalarFn,
    pub source: ScalarFn,
    pub exact_solution: Option<ScalarFn>,
    /// `B` vanishes identically, so the bilinear form is symmetric.
    pub symmetric: bool,
}

impl fmt::Debug for EllipticCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EllipticCoefficients")
            .field("dim", &self.dim)
            .field("symmetric", &self.symmetric)
            .field("has_exact_solution", &self.exact_solution.is_some())
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `(0, 1)`
    UnitInterval,
    /// `(0, 1)^2`
    UnitSquare,
    /// `0.2 < r < 1` in the first quadrant, fitted by a B-spline surface.
    QuarterAnnulus,
}

impl Domain {
    pub fn dim(self) -> usize {
        match self {
            Domain::UnitInterval => 1,
            Domain::UnitSquare | Domain::QuarterAnnulus => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemId {
    Poisson1d,
    Poisson2d,
    FullEllipticSquare,
    AdvectionDiffusion,
    FullEllipticAnnulus,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [
        ProblemId::Poisson1d,
        ProblemId::Poisson2d,
        ProblemId::FullEllipticSquare,
        ProblemId::AdvectionDiffusion,
        ProblemId::FullEllipticAnnulus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Poisson1d => "poisson1d",
            ProblemId::Poisson2d => "poisson2d",
            ProblemId::FullEllipticSquare => "full-elliptic",
            ProblemId::AdvectionDiffusion => "advection-diffusion",
            ProblemId::FullEllipticAnnulus => "annulus",
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            ProblemId::Poisson1d => Domain::UnitInterval,
            ProblemId::FullEllipticAnnulus => Domain::QuarterAnnulus,
            _ => Domain::UnitSquare,
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "poisson1d" => Ok(ProblemId::Poisson1d),
            "poisson2d" => Ok(ProblemId::Poisson2d),
            "full-elliptic" | "full-elliptic-square" => Ok(ProblemId::FullEllipticSquare),
            "advection-diffusion" => Ok(ProblemId::AdvectionDiffusion),
            "annulus" | "full-elliptic-annulus" => Ok(ProblemId::FullEllipticAnnulus),
            other => Err(Error::Argument(format!("unknown problem '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub id: ProblemId,
    pub coefficients: EllipticCoefficients,
    pub domain: Domain,
}

/// Wavenumber of the 2D Poisson solution `sin(2k pi x) sin(2k pi y)`.
const POISSON2D_WAVENUMBER: f64 = 1.0;
/// Diffusion of the advection-diffusion model.
const ADVECTION_DIFFUSION_EPS: f64 = 0.1;

pub fn catalog(id: ProblemId) -> Problem {
    let coefficients = match id {
        ProblemId::Poisson1d => poisson1d(),
        ProblemId::Poisson2d => poisson2d(POISSON2D_WAVENUMBER),
        ProblemId::FullEllipticSquare => full_elliptic_square(),
        ProblemId::AdvectionDiffusion => advection_diffusion(),
        ProblemId::FullEllipticAnnulus => full_elliptic_annulus(),
    };
    Problem { id, coefficients, domain: id.domain() }
}

fn identity_tensor() -> TensorFn {
    Arc::new(|_| [[1.0, 0.0], [0.0, 1.0]])
}

fn zero_vector() -> VectorFn {
    Arc::new(|_| [0.0, 0.0])
}

fn zero() -> ScalarFn {
    Arc::new(|_| 0.0)
}

fn poisson1d() -> EllipticCoefficients {
    let w = 2.0 * PI;
    EllipticCoefficients {
        dim: 1,
        diffusion: identity_tensor(),
        advection: zero_vector(),
        reaction: zero(),
        source: Arc::new(move |x| w * w * (w * x[0]).sin()),
        exact_solution: Some(Arc::new(move |x| (w * x[0]).sin())),
        symmetric: true,
    }
}

fn poisson2d(k: f64) -> EllipticCoefficients {
    let w = 2.0 * k * PI;
    EllipticCoefficients {
        dim: 2,
        diffusion: identity_tensor(),
        advection: zero_vector(),
        reaction: zero(),
        source: Arc::new(move |x| 2.0 * w * w * (w * x[0]).sin() * (w * x[1]).sin()),
        exact_solution: Some(Arc::new(move |x| (w * x[0]).sin() * (w * x[1]).sin())),
        symmetric: true,
    }
}

fn variable_diffusion(x: &[f64]) -> [[f64; 2]; 2] {
    let (a, b) = (x[0], x[1]);
    let off = (a + b).cos() * (a + b).sin();
    [[(2.0 + a.cos()) * (1.0 + b), off], [off, (2.0 + b.sin()) * (1.0 + a)]]
}

fn full_elliptic_square() -> EllipticCoefficients {
    EllipticCoefficients {
        dim: 2,
        diffusion: Arc::new(variable_diffusion),
        advection: Arc::new(|x| {
            let (a, b) = (x[0], x[1]);
            let c2 = (a + b).cos().powi(2);
            [11.0 + a.sin() + b * a.sin() - 2.0 * c2, -9.0 - b.cos() - a * b.cos() - 2.0 * c2]
        }),
        reaction: Arc::new(|_| 1.0),
        source: Arc::new(|_| 1.0),
        exact_solution: None,
        symmetric: false,
    }
}

fn advection_diffusion() -> EllipticCoefficients {
    let eps = ADVECTION_DIFFUSION_EPS;
    EllipticCoefficients {
        dim: 2,
        diffusion: Arc::new(move |_| [[eps, 0.0], [0.0, eps]]),
        advection: Arc::new(|_| [1.0, 1.0]),
        reaction: zero(),
        source: Arc::new(|_| 1.0),
        exact_solution: None,
        symmetric: false,
    }
}

const R_INNER_SQ: f64 = 0.04;

/// `u = (r^2 - 0.2^2)(r^2 - 1) sin x sin y` with value, gradient and Hessian.
pub(crate) fn annulus_solution(x: f64, y: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let q = x * x + y * y;
    let g = (q - R_INNER_SQ) * (q - 1.0);
    let dg = 2.0 * q - (1.0 + R_INNER_SQ);
    let (gx, gy) = (2.0 * x * dg, 2.0 * y * dg);
    let (gxx, gyy, gxy) = (8.0 * x * x + 2.0 * dg, 8.0 * y * y + 2.0 * dg, 8.0 * x * y);
    let s = x.sin() * y.sin();
    let (sx, sy, sxy) = (x.cos() * y.sin(), x.sin() * y.cos(), x.cos() * y.cos());
    let u = g * s;
    let ux = gx * s + g * sx;
    let uy = gy * s + g * sy;
    let uxx = gxx * s + 2.0 * gx * sx - g * s;
    let uyy = gyy * s + 2.0 * gy * sy - g * s;
    let uxy = gxy * s + gx * sy + gy * sx + g * sxy;
    (u, [ux, uy], [[uxx, uxy], [uxy, uyy]])
}

fn full_elliptic_annulus() -> EllipticCoefficients {
    let advection = |x: &[f64]| [-5.0 * x[1], 5.0 * x[0]];
    let source = move |p: &[f64]| {
        let (x, y) = (p[0], p[1]);
        let (u, g, h) = annulus_solution(x, y);
        let a = variable_diffusion(p);
        let c2 = (2.0 * (x + y)).cos();
        // divergence of A grad u, with dA11/dx, dA12/dy = dA21/dx = cos 2(x+y), dA22/dy
        let div = -x.sin() * (1.0 + y) * g[0]
            + a[0][0] * h[0][0]
            + c2 * g[1]
            + 2.0 * a[0][1] * h[0][1]
            + c2 * g[0]
            + a[1][1] * h[1][1]
            + y.cos() * (1.0 + x) * g[1];
        let b = advection(p);
        -div + b[0] * g[0] + b[1] * g[1] + x * y * u
    };
    EllipticCoefficients {
        dim: 2,
        diffusion: Arc::new(variable_diffusion),
        advection: Arc::new(advection),
        reaction: Arc::new(|x| x[0] * x[1]),
        source: Arc::new(source),
        exact_solution: Some(Arc::new(|x| annulus_solution(x[0], x[1]).0)),
        symmetric: false,
    }
}
