//! Finite-difference discretization of `-div(K(x) grad u)` with Dirichlet
//! boundary conditions on 2D Cartesian grids.
//!
//! The stencil is flux-form: face-centered `K11`/`K22` averages for the
//! axis terms and a symmetric four-corner (cell-centered `K12`) stencil for
//! the cross terms, obtained by rotating the mixed derivative onto the grid
//! diagonals. Boundary-cut nodes use shortened arms toward the boundary with
//! the interior couplings left untouched, which keeps the assembled matrix
//! exactly symmetric (the cut correction appears only on the diagonal and in
//! the Dirichlet load).

use crate::coeffs::{CoefficientField, Domain, Mat2, Vec2};
use crate::error::Error;
use crate::Result;
use faer::prelude::SpSolver;
use faer::sparse::SparseColMat;
use std::sync::OnceLock;

/// Uniform Cartesian grid with interior/exterior classification and
/// per-node cut distances to a curved boundary.
pub struct Grid2D {
    pub domain: Domain,
    pub h: f64,
    /// Lattice extents (number of nodes per axis).
    pub nx: usize,
    pub ny: usize,
    /// Coordinates of lattice node (0, 0).
    pub origin: Vec2,
    /// Lattice -> interior index, usize::MAX if not interior.
    index: Vec<usize>,
    /// Interior node coordinates.
    pub nodes: Vec<Vec2>,
    /// Interior index -> lattice (i, j).
    pub lattice_of: Vec<(usize, usize)>,
    /// Per interior node, arm fractions to the four axis neighbors
    /// (east, west, north, south); 1.0 when the neighbor is interior.
    pub arms: Vec<[f64; 4]>,
}

impl Grid2D {
    pub fn n_interior(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_coord(&self, i: usize, j: usize) -> Vec2 {
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    /// Interior index of lattice node (i, j), if interior.
    pub fn interior_index(&self, i: usize, j: usize) -> Option<usize> {
        let v = self.index[i * self.ny + j];
        (v != usize::MAX).then_some(v)
    }

    /// Index of the interior node nearest to `x`.
    pub fn nearest_interior(&self, x: Vec2) -> Result<usize> {
        let mut best = usize::MAX;
        let mut bd = f64::INFINITY;
        let gi = ((x[0] - self.origin[0]) / self.h).round() as i64;
        let gj = ((x[1] - self.origin[1]) / self.h).round() as i64;
        for di in -2..=2i64 {
            for dj in -2..=2i64 {
                let (i, j) = (gi + di, gj + dj);
                if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
                    continue;
                }
                if let Some(p) = self.interior_index(i as usize, j as usize) {
                    let n = self.nodes[p];
                    let d = (n[0] - x[0]).hypot(n[1] - x[1]);
                    if d < bd {
                        bd = d;
                        best = p;
                    }
                }
            }
        }
        if best == usize::MAX {
            return Err(Error::invalid(format!("no interior node near ({}, {})", x[0], x[1])));
        }
        Ok(best)
    }

    /// Bilinear interpolation of an interior-valued field, taking 0 on
    /// non-interior lattice nodes (the Dirichlet extension).
    pub fn interp(&self, values: &[f64], x: Vec2) -> f64 {
        let fx = (x[0] - self.origin[0]) / self.h;
        let fy = (x[1] - self.origin[1]) / self.h;
        let i = (fx.floor() as i64).clamp(0, self.nx as i64 - 2) as usize;
        let j = (fy.floor() as i64).clamp(0, self.ny as i64 - 2) as usize;
        let tx = (fx - i as f64).clamp(0.0, 1.0);
        let ty = (fy - j as f64).clamp(0.0, 1.0);
        let at = |i: usize, j: usize| self.interior_index(i, j).map_or(0.0, |p| values[p]);
        at(i, j) * (1.0 - tx) * (1.0 - ty)
            + at(i + 1, j) * tx * (1.0 - ty)
            + at(i, j + 1) * (1.0 - tx) * ty
            + at(i + 1, j + 1) * tx * ty
    }

    /// Fraction of `h` from interior node (i, j) to the domain boundary in
    /// direction `(di, dj)`, clipped to (0, 1].
    fn arm_fraction(&self, x: Vec2, di: i64, dj: i64) -> f64 {
        let h = self.h;
        match self.domain {
            Domain::Disk { radius } => {
                let (dx, dy) = (di as f64 * h, dj as f64 * h);
                let a = dx * dx + dy * dy;
                let b = 2.0 * (x[0] * dx + x[1] * dy);
                let c = x[0] * x[0] + x[1] * x[1] - radius * radius;
                let disc = (b * b - 4.0 * a * c).max(0.0);
                let t = (-b + disc.sqrt()) / (2.0 * a);
                t.clamp(1e-6, 1.0)
            }
            Domain::Rect { x0, x1, y0, y1 } => {
                let t = if di > 0 {
                    (x1 - x[0]) / h
                } else if di < 0 {
                    (x[0] - x0) / h
                } else if dj > 0 {
                    (y1 - x[1]) / h
                } else {
                    (x[1] - y0) / h
                };
                t.clamp(1e-6, 1.0)
            }
        }
    }
}

/// Builds the grid: lattice over the bounding box with a one-cell margin,
/// interior mask, and boundary-cut arm fractions.
pub fn build_grid(domain: Domain, h: f64) -> Result<Grid2D> {
    if !(h > 0.0) {
        return Err(Error::invalid("grid spacing h must be positive"));
    }
    if domain.is_degenerate() {
        return Err(Error::invalid("degenerate domain"));
    }
    let (x0, x1, y0, y1) = domain.bounding_box();
    let nx = ((x1 - x0) / h).round() as i64 + 3;
    let ny = ((y1 - y0) / h).round() as i64 + 3;
    if nx < 4 || ny < 4 {
        return Err(Error::invalid("h too coarse for the domain"));
    }
    let (nx, ny) = (nx as usize, ny as usize);
    // Center the lattice so rectangles with h dividing the sides get nodes
    // exactly on the boundary.
    let origin = [
        0.5 * (x0 + x1) - 0.5 * (nx - 1) as f64 * h,
        0.5 * (y0 + y1) - 0.5 * (ny - 1) as f64 * h,
    ];
    let mut index = vec![usize::MAX; nx * ny];
    let mut nodes = Vec::new();
    let mut lattice_of = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let x = [origin[0] + i as f64 * h, origin[1] + j as f64 * h];
            if domain.contains(x) {
                index[i * ny + j] = nodes.len();
                nodes.push(x);
                lattice_of.push((i, j));
            }
        }
    }
    if nodes.is_empty() {
        return Err(Error::invalid("h too coarse for the domain: no interior nodes"));
    }
    let mut grid = Grid2D { domain, h, nx, ny, origin, index, nodes, lattice_of, arms: Vec::new() };
    let mut arms = Vec::with_capacity(grid.nodes.len());
    for p in 0..grid.nodes.len() {
        let (i, j) = grid.lattice_of[p];
        let x = grid.nodes[p];
        let dirs = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)];
        let mut a = [1.0f64; 4];
        for (d, (di, dj)) in dirs.iter().enumerate() {
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            let neighbor_interior = ni >= 0
                && nj >= 0
                && (ni as usize) < grid.nx
                && (nj as usize) < grid.ny
                && grid.interior_index(ni as usize, nj as usize).is_some();
            if !neighbor_interior {
                a[d] = grid.arm_fraction(x, *di, *dj);
            }
        }
        arms.push(a);
    }
    grid.arms = arms;
    Ok(grid)
}

/// Compressed sparse row matrix; the workhorse for stencil application.
#[derive(Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    pub fn from_triplets(n: usize, trips: &mut Vec<(usize, usize, f64)>) -> Csr {
        trips.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trips.len());
        let mut vals: Vec<f64> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in trips.iter() {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Csr { n, row_ptr, cols, vals }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            out[r] = acc;
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] == r {
                    d[r] = self.vals[k];
                }
            }
        }
        d
    }

    /// Max |A - A^t| over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                let mut vt = 0.0;
                for k2 in self.row_ptr[c]..self.row_ptr[c + 1] {
                    if self.cols[k2] == r {
                        vt = self.vals[k2];
                    }
                }
                m = m.max((self.vals[k] - vt).abs());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// A Dirichlet boundary load entry: row `row` receives `coef * g(point)` on
/// the right-hand side when the boundary data is `g` (zero for the
/// homogeneous problem).
pub struct BcEntry {
    pub row: usize,
    pub point: Vec2,
    pub coef: f64,
}

/// Which linear solver backs [`DiscreteOperator::solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    /// Sparse Cholesky factorization (default).
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Cg { tol: f64, max_iter: usize },
}

/// Sparse symmetric discretization of `u -> -div(K grad u)` on interior
/// unknowns, Dirichlet data eliminated.
pub struct DiscreteOperator {
    pub csr: Csr,
    /// Scalar prefactor applied on `apply`/`solve` (delta^2 or 1).
    pub prefactor: f64,
    /// Dirichlet load entries for inhomogeneous boundary data.
    pub bc: Vec<BcEntry>,
    pub solver: SolverKind,
    chol: OnceLock<faer::sparse::linalg::solvers::Cholesky<usize, f64>>,
}

static FAER_SEQ: OnceLock<()> = OnceLock::new();

fn faer_sequential() {
    FAER_SEQ.get_or_init(|| {
        faer::set_global_parallelism(faer::Parallelism::None);
    });
}

/// Assembles the flux-form stencil for `-div(K grad u)` on `grid`.
///
/// Face values of `K11`, `K22` at edge midpoints, `K12` at cell centers via
/// the diagonal-rotation stencil. Rows are exactly symmetric; the assembled
/// matrix is checked to be positive definite by a short Lanczos run.
pub fn assemble(grid: &Grid2D, field: &CoefficientField, prefactor: f64) -> Result<DiscreteOperator> {
    if field.domain != grid.domain {
        return Err(Error::invalid("field domain does not match grid domain"));
    }
    let n = grid.n_interior();
    let h = grid.h;
    let h2 = h * h;
    let mut trips: Vec<(usize, usize, f64)> = Vec::with_capacity(9 * n);
    let mut bc: Vec<BcEntry> = Vec::new();
    let dirs = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)];
    for p in 0..n {
        let (i, j) = grid.lattice_of[p];
        let x = grid.nodes[p];
        let mut diag = 0.0;
        // Axis fluxes.
        for (d, (di, dj)) in dirs.iter().enumerate() {
            let theta = grid.arms[p][d];
            let neighbor = {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                if ni >= 0 && nj >= 0 && (ni as usize) < grid.nx && (nj as usize) < grid.ny {
                    grid.interior_index(ni as usize, nj as usize)
                } else {
                    None
                }
            };
            let axis_k = |m: Mat2| if *dj == 0 { m[0][0] } else { m[1][1] };
            match neighbor {
                Some(q) => {
                    // face coordinates formed from lattice indices so both
                    // sides of the face compute bit-identical K values
                    let face = [
                        grid.origin[0] + (i as f64 + 0.5 * *di as f64) * h,
                        grid.origin[1] + (j as f64 + 0.5 * *dj as f64) * h,
                    ];
                    let kf = axis_k(field.k(face));
                    diag += kf / h2;
                    trips.push((p, q, -kf / h2));
                }
                None => {
                    // Cut arm of length theta*h; face at its midpoint. The
                    // neighbor is the boundary point, eliminated into the load.
                    let bpt = [
                        x[0] + *di as f64 * theta * h,
                        x[1] + *dj as f64 * theta * h,
                    ];
                    let face = [x[0] + *di as f64 * theta * h / 2.0, x[1] + *dj as f64 * theta * h / 2.0];
                    let kf = axis_k(field.k(face));
                    diag += kf / (theta * h2);
                    bc.push(BcEntry { row: p, point: bpt, coef: kf / (theta * h2) });
                }
            }
        }
        // Corner (cross) terms: coupling sgn * K12(cell)/2 to each diagonal
        // neighbor, minus the same from the diagonal.
        let corners = [(1i64, 1i64, -1.0f64), (-1, -1, -1.0), (1, -1, 1.0), (-1, 1, 1.0)];
        for (di, dj, sgn) in corners {
            let cell = [
                grid.origin[0] + (i as f64 + 0.5 * di as f64) * h,
                grid.origin[1] + (j as f64 + 0.5 * dj as f64) * h,
            ];
            let b12 = field.k(cell)[0][1];
            if b12 == 0.0 {
                continue;
            }
            let coup = sgn * b12 / (2.0 * h2);
            diag -= coup;
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            let neighbor = if ni >= 0 && nj >= 0 && (ni as usize) < grid.nx && (nj as usize) < grid.ny
            {
                grid.interior_index(ni as usize, nj as usize)
            } else {
                None
            };
            match neighbor {
                Some(q) => trips.push((p, q, coup)),
                None => {
                    // Eliminated exterior corner; boundary data sampled at the
                    // lattice corner (first-order in the cut layer).
                    let bpt = [x[0] + di as f64 * h, x[1] + dj as f64 * h];
                    bc.push(BcEntry { row: p, point: bpt, coef: -coup });
                }
            }
        }
        trips.push((p, p, diag));
    }
    let csr = Csr::from_triplets(n, &mut trips);
    let op = DiscreteOperator { csr, prefactor, bc, solver: SolverKind::Direct, chol: OnceLock::new() };
    let ritz = op.smallest_ritz_value(30);
    if ritz <= 0.0 {
        return Err(Error::numerical(format!(
            "assembled operator is not positive definite (smallest Ritz value {:.3e})",
            ritz
        )));
    }
    Ok(op)
}

impl DiscreteOperator {
    pub fn n(&self) -> usize {
        self.csr.n
    }

    /// `prefactor * A u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.csr.n];
        self.csr.apply(u, &mut out);
        if self.prefactor != 1.0 {
            for v in &mut out {
                *v *= self.prefactor;
            }
        }
        out
    }

    fn cholesky(&self) -> Result<&faer::sparse::linalg::solvers::Cholesky<usize, f64>> {
        if let Some(c) = self.chol.get() {
            return Ok(c);
        }
        faer_sequential();
        let n = self.csr.n;
        let mut trips = Vec::with_capacity(self.csr.vals.len());
        for r in 0..n {
            for k in self.csr.row_ptr[r]..self.csr.row_ptr[r + 1] {
                trips.push((r, self.csr.cols[k], self.csr.vals[k]));
            }
        }
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips)
            .map_err(|e| Error::numerical(format!("sparse assembly failed: {e:?}")))?;
        let chol = mat
            .sp_cholesky(faer::Side::Lower)
            .map_err(|e| Error::numerical(format!("sparse Cholesky failed: {e:?}")))?;
        let _ = self.chol.set(chol);
        Ok(self.chol.get().unwrap())
    }

    /// Solves `(prefactor * A) u = rhs` to relative residual 1e-10.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.csr.n {
            return Err(Error::invalid("solve_linear: dimension mismatch"));
        }
        if !rhs.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("solve_linear: non-finite right-hand side"));
        }
        let mut u = match self.solver {
            SolverKind::Direct => {
                let chol = self.cholesky()?;
                let m = faer::Mat::<f64>::from_fn(self.csr.n, 1, |i, _| rhs[i]);
                let x = chol.solve(&m);
                (0..self.csr.n).map(|i| x[(i, 0)]).collect::<Vec<f64>>()
            }
            SolverKind::Cg { tol, max_iter } => self.solve_cg(rhs, tol, max_iter)?,
        };
        // One step of iterative refinement, then verify the contract.
        let rhs_norm = norm2(rhs);
        if rhs_norm > 0.0 {
            let mut r = vec![0.0; self.csr.n];
            self.csr.apply(&u, &mut r);
            for i in 0..r.len() {
                r[i] = rhs[i] - r[i];
            }
            if norm2(&r) / rhs_norm > 1e-12 {
                if let SolverKind::Direct = self.solver {
                    let chol = self.cholesky()?;
                    let m = faer::Mat::<f64>::from_fn(self.csr.n, 1, |i, _| r[i]);
                    let d = chol.solve(&m);
                    for i in 0..u.len() {
                        u[i] += d[(i, 0)];
                    }
                }
            }
            let mut r2 = vec![0.0; self.csr.n];
            self.csr.apply(&u, &mut r2);
            for i in 0..r2.len() {
                r2[i] = rhs[i] - r2[i];
            }
            let rel = norm2(&r2) / rhs_norm;
            if rel > 1e-10 {
                return Err(Error::numerical(format!(
                    "linear solve residual {:.3e} exceeds 1e-10",
                    rel
                )));
            }
        }
        if self.prefactor != 1.0 {
            for v in &mut u {
                *v /= self.prefactor;
            }
        }
        Ok(u)
    }

    /// Jacobi-preconditioned conjugate gradients on the unscaled matrix.
    fn solve_cg(&self, rhs: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let n = self.csr.n;
        let diag = self.csr.diag();
        let minv: Vec<f64> = diag.iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect();
        let mut x = vec![0.0; n];
        let mut r = rhs.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&minv).map(|(a, m)| a * m).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let b_norm = norm2(rhs);
        if b_norm == 0.0 {
            return Ok(x);
        }
        let mut ap = vec![0.0; n];
        for _ in 0..max_iter {
            self.csr.apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if norm2(&r) / b_norm <= tol {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] * minv[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::numerical(format!(
            "cg did not converge in {} iterations (residual {:.3e})",
            max_iter,
            norm2(&r) / b_norm
        )))
    }

    /// Smallest Ritz value from a `iters`-step Lanczos run on the unscaled
    /// matrix; positive value certifies positive-definiteness at this rank.
    pub fn smallest_ritz_value(&self, iters: usize) -> f64 {
        let n = self.csr.n;
        let m = iters.min(n);
        // Deterministic pseudo-random start vector.
        let mut state = 0x853c49e6748fea9bu64;
        let mut v: Vec<f64> = (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            })
            .collect();
        let nv = norm2(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut v_prev = vec![0.0; n];
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut w = vec![0.0; n];
        let mut b_last = 0.0;
        for it in 0..m {
            self.csr.apply(&v, &mut w);
            let a = dot(&v, &w);
            alpha.push(a);
            for i in 0..n {
                w[i] -= a * v[i] + b_last * v_prev[i];
            }
            // full reorthogonalization is overkill here; one pass suffices
            let b = norm2(&w);
            if b < 1e-300 {
                break;
            }
            if it + 1 < m {
                beta.push(b);
            }
            b_last = b;
            v_prev.copy_from_slice(&v);
            for i in 0..n {
                v[i] = w[i] / b;
            }
        }
        smallest_tridiag_eig(&alpha, &beta)
    }
}

/// Smallest eigenvalue of the symmetric tridiagonal (alpha, beta) by Sturm
/// bisection.
fn smallest_tridiag_eig(alpha: &[f64], beta: &[f64]) -> f64 {
    let m = alpha.len();
    if m == 0 {
        return 0.0;
    }
    let bound = alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let bl = if i > 0 { beta[i - 1].abs() } else { 0.0 };
            let br = if i < m - 1 { beta[i].abs() } else { 0.0 };
            a.abs() + bl + br
        })
        .fold(0.0f64, f64::max);
    // Count of eigenvalues < x via Sturm sequence.
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = alpha[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..m {
            // clamp |d| away from zero, preserving sign
            let ds = if d.abs() < 1e-300 { 1e-300f64.copysign(if d == 0.0 { -1.0 } else { d }) } else { d };
            d = alpha[i] - x - beta[i - 1] * beta[i - 1] / ds;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut lo = -bound - 1.0;
    let mut hi = bound + 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Applies the flux-form stencil with coefficient `kfun` in regular form
/// (full arms everywhere) to values given on the full lattice. Used for
/// right-hand sides like `div((K(x) - K(xhat)) grad V)` where `V` has an
/// analytic extension beyond the boundary.
pub fn apply_flux_stencil_regular(
    grid: &Grid2D,
    kfun: &dyn Fn(Vec2) -> Mat2,
    lattice_values: &[f64],
) -> Vec<f64> {
    let h = grid.h;
    let h2 = h * h;
    let at = |i: i64, j: i64| lattice_values[i as usize * grid.ny + j as usize];
    let mut out = vec![0.0; grid.n_interior()];
    for p in 0..grid.n_interior() {
        let (iu, ju) = grid.lattice_of[p];
        let (i, j) = (iu as i64, ju as i64);
        let x = grid.nodes[p];
        let up = at(i, j);
        let mut acc = 0.0;
        // -div(K grad u), axis part
        for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            let face = [x[0] + di as f64 * h / 2.0, x[1] + dj as f64 * h / 2.0];
            let m = kfun(face);
            let kf = if dj == 0 { m[0][0] } else { m[1][1] };
            acc += kf * (up - at(i + di, j + dj)) / h2;
        }
        // corner part
        for (di, dj, sgn) in [(1i64, 1i64, -1.0f64), (-1, -1, -1.0), (1, -1, 1.0), (-1, 1, 1.0)] {
            let cell = [x[0] + di as f64 * h / 2.0, x[1] + dj as f64 * h / 2.0];
            let b12 = kfun(cell)[0][1];
            if b12 != 0.0 {
                let coup = sgn * b12 / (2.0 * h2);
                acc += coup * (at(i + di, j + dj) - up);
            }
        }
        out[p] = acc;
    }
    out
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}
