//! Coefficient fields for the divergence-form operator `-div(K(x) grad u)`.
//!
//! A [`CoefficientField`] bundles the domain, the symmetric positive-definite
//! matrix `K(x)`, its partial derivatives, and the positive weight `q(x)`
//! with its gradient. Built-in constructors cover the identity field, the
//! scalar field `K = (1/b) Id`, and the helical field `K_H` arising from the
//! screw-symmetry reduction of the 3D Euler equations.

use crate::error::Error;
use crate::Result;

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

/// Computational domain: disk centered at the origin or axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Disk { radius: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
}

impl Domain {
    pub fn unit_disk() -> Self {
        Domain::Disk { radius: 1.0 }
    }

    /// Strict interior test.
    pub fn contains(&self, x: Vec2) -> bool {
        match *self {
            Domain::Disk { radius } => x[0] * x[0] + x[1] * x[1] < radius * radius,
            Domain::Rect { x0, x1, y0, y1 } => x[0] > x0 && x[0] < x1 && x[1] > y0 && x[1] < y1,
        }
    }

    /// Signed-ish distance to the boundary from an interior point (exact for
    /// both shapes).
    pub fn boundary_distance(&self, x: Vec2) -> f64 {
        match *self {
            Domain::Disk { radius } => radius - (x[0] * x[0] + x[1] * x[1]).sqrt(),
            Domain::Rect { x0, x1, y0, y1 } => {
                (x[0] - x0).min(x1 - x[0]).min(x[1] - y0).min(y1 - x[1])
            }
        }
    }

    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            Domain::Disk { radius } => (-radius, radius, -radius, radius),
            Domain::Rect { x0, x1, y0, y1 } => (x0, x1, y0, y1),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        let (x0, x1, y0, y1) = self.bounding_box();
        !(x1 > x0 && y1 > y0)
    }
}

type KFn = dyn Fn(Vec2) -> Mat2 + Send + Sync;
type DkFn = dyn Fn(Vec2) -> (Mat2, Mat2) + Send + Sync;
type QFn = dyn Fn(Vec2) -> f64 + Send + Sync;
type GradQFn = dyn Fn(Vec2) -> Vec2 + Send + Sync;

use std::sync::Arc;

/// The data `(Omega, K, dK, q, grad q)` defining the elliptic problem.
pub struct CoefficientField {
    pub domain: Domain,
    k_eval: Arc<KFn>,
    dk_eval: Box<DkFn>,
    q_eval: Box<QFn>,
    grad_q_eval: Box<GradQFn>,
    /// Lower ellipticity bound for `K` on the domain.
    pub lambda_min: f64,
    /// Upper ellipticity bound for `K` on the domain.
    pub lambda_max: f64,
}

impl CoefficientField {
    /// Generic constructor; `dk` may be omitted, in which case `K` is
    /// differentiated by central differences with step `1e-6 * scale`.
    pub fn from_fns(
        domain: Domain,
        k: Arc<KFn>,
        dk: Option<Box<DkFn>>,
        q: Box<QFn>,
        grad_q: Box<GradQFn>,
        lambda_min: f64,
        lambda_max: f64,
    ) -> Result<Self> {
        if domain.is_degenerate() {
            return Err(Error::invalid("degenerate domain"));
        }
        if !(lambda_min > 0.0 && lambda_max >= lambda_min) {
            return Err(Error::invalid("ellipticity bounds must satisfy 0 < Lambda1 <= Lambda2"));
        }
        let dk = dk.unwrap_or_else(|| {
            let (x0, x1, _, _) = domain.bounding_box();
            let h = 1e-6 * (x1 - x0).abs().max(1.0);
            let kc = Arc::clone(&k);
            Box::new(move |x: Vec2| {
                let mut out = ([[0.0; 2]; 2], [[0.0; 2]; 2]);
                for axis in 0..2 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[axis] += h;
                    xm[axis] -= h;
                    let (kp, km) = (kc(xp), kc(xm));
                    let d = if axis == 0 { &mut out.0 } else { &mut out.1 };
                    for i in 0..2 {
                        for j in 0..2 {
                            d[i][j] = (kp[i][j] - km[i][j]) / (2.0 * h);
                        }
                    }
                }
                out
            })
        });
        Ok(CoefficientField {
            domain,
            k_eval: k,
            dk_eval: dk,
            q_eval: q,
            grad_q_eval: grad_q,
            lambda_min,
            lambda_max,
        })
    }

    pub fn k(&self, x: Vec2) -> Mat2 {
        (self.k_eval)(x)
    }

    /// `(dK/dx1, dK/dx2)` at `x`.
    pub fn dk(&self, x: Vec2) -> (Mat2, Mat2) {
        (self.dk_eval)(x)
    }

    pub fn q(&self, x: Vec2) -> f64 {
        (self.q_eval)(x)
    }

    pub fn grad_q(&self, x: Vec2) -> Vec2 {
        (self.grad_q_eval)(x)
    }

    pub fn det_k(&self, x: Vec2) -> f64 {
        det2(self.k(x))
    }

    /// The concentration landscape `q(x)^2 sqrt(det K(x))`.
    pub fn landscape_value(&self, x: Vec2) -> f64 {
        let q = self.q(x);
        q * q * self.det_k(x).sqrt()
    }

    /// Identity coefficient matrix with `q == 1`.
    pub fn identity(domain: Domain) -> Result<Self> {
        Self::identity_with_q(domain, |_| 1.0, |_| [0.0, 0.0])
    }

    /// Identity coefficient matrix with a caller-supplied weight.
    pub fn identity_with_q(
        domain: Domain,
        q: impl Fn(Vec2) -> f64 + Send + Sync + 'static,
        grad_q: impl Fn(Vec2) -> Vec2 + Send + Sync + 'static,
    ) -> Result<Self> {
        if domain.is_degenerate() {
            return Err(Error::invalid("degenerate domain"));
        }
        Ok(CoefficientField {
            domain,
            k_eval: Arc::new(|_| [[1.0, 0.0], [0.0, 1.0]]),
            dk_eval: Box::new(|_| ([[0.0; 2]; 2], [[0.0; 2]; 2])),
            q_eval: Box::new(q),
            grad_q_eval: Box::new(grad_q),
            lambda_min: 1.0,
            lambda_max: 1.0,
        })
    }

    /// Scalar field `K = (1/b) Id` for a positive `b` with analytic gradient.
    /// `q == 1`; ellipticity bounds must majorize `1/b` on the domain.
    pub fn scalar(
        domain: Domain,
        b: impl Fn(Vec2) -> f64 + Send + Sync + Clone + 'static,
        grad_b: impl Fn(Vec2) -> Vec2 + Send + Sync + 'static,
        lambda_min: f64,
        lambda_max: f64,
    ) -> Result<Self> {
        if domain.is_degenerate() {
            return Err(Error::invalid("degenerate domain"));
        }
        let b2 = b.clone();
        Ok(CoefficientField {
            domain,
            k_eval: Arc::new(move |x| {
                let bi = 1.0 / b(x);
                [[bi, 0.0], [0.0, bi]]
            }),
            dk_eval: Box::new(move |x| {
                let bv = b2(x);
                let g = grad_b(x);
                let c = -1.0 / (bv * bv);
                (
                    [[c * g[0], 0.0], [0.0, c * g[0]]],
                    [[c * g[1], 0.0], [0.0, c * g[1]]],
                )
            }),
            q_eval: Box::new(|_| 1.0),
            grad_q_eval: Box::new(|_| [0.0, 0.0]),
            lambda_min,
            lambda_max,
        })
    }

    /// Default scalar test field: `b(x) = 1 + |x|^2 / 4` on the unit disk.
    pub fn scalar_default() -> Result<Self> {
        // On the unit disk b ranges over [1, 5/4], so 1/b over [4/5, 1].
        Self::scalar(
            Domain::unit_disk(),
            |x| 1.0 + (x[0] * x[0] + x[1] * x[1]) / 4.0,
            |x| [x[0] / 2.0, x[1] / 2.0],
            0.8,
            1.0,
        )
    }

    /// The helical field `K_H` with weight `q = alpha |x|^2 / 2 + beta` on the
    /// disk of radius `rstar`.
    pub fn helical(params: HelicalParams) -> Result<Self> {
        params.validate()?;
        let HelicalParams { k, alpha, beta, rstar } = params;
        let k2 = k * k;
        Ok(CoefficientField {
            domain: Domain::Disk { radius: rstar },
            k_eval: Arc::new(move |x| helical_matrix(k2, x)),
            dk_eval: Box::new(move |x| helical_matrix_derivs(k2, x)),
            q_eval: Box::new(move |x| alpha * (x[0] * x[0] + x[1] * x[1]) / 2.0 + beta),
            grad_q_eval: Box::new(move |x| [alpha * x[0], alpha * x[1]]),
            // Eigenvalues of K_H are k^2/(k^2+|x|^2) and 1.
            lambda_min: k2 / (k2 + rstar * rstar),
            lambda_max: 1.0,
        })
    }
}

/// Parameters of the helical reduction.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HelicalParams {
    /// Pitch parameter of the screw motion (> 0).
    pub k: f64,
    /// Angular-velocity coefficient; may be zero or negative.
    pub alpha: f64,
    /// Offset in `q = alpha |x|^2 / 2 + beta`.
    pub beta: f64,
    /// Cylinder radius (> 0).
    pub rstar: f64,
}

impl HelicalParams {
    /// The radial minimum of the quadratic `q` over the closed disk is at an
    /// endpoint, so positivity is checked at r = 0 and r = rstar.
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) {
            return Err(Error::invalid("helical pitch k must be positive"));
        }
        if !(self.rstar > 0.0) {
            return Err(Error::invalid("cylinder radius rstar must be positive"));
        }
        let q0 = self.beta;
        let q1 = self.alpha * self.rstar * self.rstar / 2.0 + self.beta;
        if !(q0.min(q1) > 0.0) {
            return Err(Error::invalid(format!(
                "q = alpha|x|^2/2 + beta must be positive on the disk; min is {:.6e}",
                q0.min(q1)
            )));
        }
        Ok(())
    }
}

fn helical_matrix(k2: f64, x: Vec2) -> Mat2 {
    let s = k2 + x[0] * x[0] + x[1] * x[1];
    [
        [(k2 + x[1] * x[1]) / s, -x[0] * x[1] / s],
        [-x[0] * x[1] / s, (k2 + x[0] * x[0]) / s],
    ]
}

fn helical_matrix_derivs(k2: f64, x: Vec2) -> (Mat2, Mat2) {
    let (x1, x2) = (x[0], x[1]);
    let s = k2 + x1 * x1 + x2 * x2;
    let m = [[k2 + x2 * x2, -x1 * x2], [-x1 * x2, k2 + x1 * x1]];
    let dm1 = [[0.0, -x2], [-x2, 2.0 * x1]];
    let dm2 = [[2.0 * x2, -x1], [-x1, 0.0]];
    let mut d1 = [[0.0; 2]; 2];
    let mut d2 = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            d1[i][j] = (dm1[i][j] * s - m[i][j] * 2.0 * x1) / (s * s);
            d2[i][j] = (dm2[i][j] * s - m[i][j] * 2.0 * x2) / (s * s);
        }
    }
    (d1, d2)
}

pub fn det2(m: Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn mat_mul(a: Mat2, b: Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat_vec(a: Mat2, v: Vec2) -> Vec2 {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn mat_inv(a: Mat2) -> Mat2 {
    let d = det2(a);
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

/// The unique symmetric positive-definite `T` with `T^{-1} T^{-t} = K`,
/// i.e. `T = K^{-1/2}`, via the closed-form symmetric 2x2 eigendecomposition.
pub fn matrix_root(k: Mat2) -> Result<Mat2> {
    let scale = k.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) || !k.iter().flatten().all(|v| v.is_finite()) {
        return Err(Error::invalid("matrix_root: non-finite or zero matrix"));
    }
    if (k[0][1] - k[1][0]).abs() > 1e-12 * scale {
        return Err(Error::invalid(format!(
            "matrix_root: input not symmetric (|K12 - K21| = {:.3e})",
            (k[0][1] - k[1][0]).abs()
        )));
    }
    let (a, b, c) = (k[0][0], 0.5 * (k[0][1] + k[1][0]), k[1][1]);
    let mean = 0.5 * (a + c);
    let diff = 0.5 * (a - c);
    let rad = (diff * diff + b * b).sqrt();
    let l1 = mean + rad;
    let l2 = mean - rad;
    if !(l2 > 0.0) {
        return Err(Error::invalid(format!(
            "matrix_root: input not positive-definite (eigenvalues {:.3e}, {:.3e})",
            l1, l2
        )));
    }
    // Eigenvector for l1.
    let (c1, s1) = if b.abs() > 1e-300 * scale {
        let t = l1 - a;
        let n = (b * b + t * t).sqrt();
        (b / n, t / n)
    } else if a >= c {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let f1 = 1.0 / l1.sqrt();
    let f2 = 1.0 / l2.sqrt();
    // T = Q diag(l^{-1/2}) Q^t with Q = [[c1, -s1], [s1, c1]].
    Ok([
        [f1 * c1 * c1 + f2 * s1 * s1, (f1 - f2) * c1 * s1],
        [(f1 - f2) * c1 * s1, f1 * s1 * s1 + f2 * c1 * c1],
    ])
}

/// Scalar landscape `q^2 sqrt(det K)` sampled over the domain bounding box.
pub struct Landscape {
    pub resolution: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major values; NaN outside the domain.
    pub values: Vec<f64>,
    /// Location of the discrete maximum over interior samples.
    pub argmax: Vec2,
    pub max_value: f64,
}

/// Samples `q(x)^2 sqrt(det K(x))` on a `resolution x resolution` lattice
/// and locates the discrete maximum.
pub fn landscape(field: &CoefficientField, resolution: usize) -> Result<Landscape> {
    if resolution < 16 {
        return Err(Error::invalid("landscape: resolution must be >= 16 per axis"));
    }
    let (x0, x1, y0, y1) = field.domain.bounding_box();
    let xs: Vec<f64> = (0..resolution)
        .map(|i| x0 + (x1 - x0) * (i as f64 + 0.5) / resolution as f64)
        .collect();
    let ys: Vec<f64> = (0..resolution)
        .map(|j| y0 + (y1 - y0) * (j as f64 + 0.5) / resolution as f64)
        .collect();
    let mut values = vec![f64::NAN; resolution * resolution];
    let mut best = f64::NEG_INFINITY;
    let mut arg = [f64::NAN, f64::NAN];
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let p = [x, y];
            if field.domain.contains(p) {
                let v = field.landscape_value(p);
                values[i * resolution + j] = v;
                if v > best {
                    best = v;
                    arg = p;
                }
            }
        }
    }
    if !best.is_finite() {
        return Err(Error::invalid("landscape: no interior samples"));
    }
    Ok(Landscape { resolution, xs, ys, values, argmax: arg, max_value: best })
}
