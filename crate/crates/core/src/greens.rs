//! Green's-function machinery for `-div(K grad u)`: discrete columns, the
//! analytic singular part `sqrt(det K(y))^{-1} Gamma(T_y (x-y))`, the
//! first-order corrections `F1`, `F2` of the C1 expansion, and the Robin
//! value extracted by ring extrapolation.
//!
//! The regular part used throughout is `Sbar(x, y) = G(x, y) - singular`;
//! the C1 object of the expansion is `Sbar + F1 + F2`.

use crate::coeffs::{det2, mat_vec, matrix_root, CoefficientField, Vec2};
use crate::error::Error;
use crate::grid::{DiscreteOperator, Grid2D};
use crate::Result;
use std::f64::consts::PI;

/// `Gamma(z) = -(1/2pi) ln|z|`, the free-space kernel.
pub fn gamma2d(z: Vec2) -> f64 {
    -(z[0].hypot(z[1])).ln() / (2.0 * PI)
}

/// The singular part `sqrt(det K(y))^{-1} Gamma(T_y (x - y))`.
pub fn singular_part(field: &CoefficientField, y: Vec2, x: Vec2) -> Result<f64> {
    if x == y {
        return Err(Error::invalid("singular_part: x must differ from y"));
    }
    let t = matrix_root(field.k(y))?;
    let d = det2(field.k(y)).sqrt();
    Ok(gamma2d(mat_vec(t, [x[0] - y[0], x[1] - y[1]])) / d)
}

/// Which written form of the `F2` correction to evaluate; the two are
/// algebraically identical once the Kronecker-delta sum of the derivation is
/// folded into the bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum F2Form {
    /// Merged bracket with +-1/8 log coefficients.
    Statement,
    /// Separate delta-sum plus bracket with 3/8 on the cubic terms.
    Proof,
}

/// First-order correction
/// `F1 = -(1/4pi) sqrt(det K(y))^{-1} sum T_mj dK_ij(y) (T(x-y))_m ln|T(x-y)|`.
///
/// Vanishes like `r ln r` toward the diagonal; returns 0 at x = y.
pub fn f1_correction(field: &CoefficientField, y: Vec2, x: Vec2) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    let t = matrix_root(field.k(y))?;
    let dets = det2(field.k(y)).sqrt();
    let (dk1, dk2) = field.dk(y);
    let dk = [dk1, dk2];
    let u = mat_vec(t, [x[0] - y[0], x[1] - y[1]]);
    let lnu = u[0].hypot(u[1]).ln();
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for m in 0..2 {
                s += t[m][j] * dk[i][i][j] * u[m];
            }
        }
    }
    Ok(-s * lnu / (4.0 * PI * dets))
}

/// Second-order correction `F2` of the C1 Green expansion.
///
/// Returns 0 at x = y (the expression vanishes like `r ln r`).
pub fn f2_correction(field: &CoefficientField, y: Vec2, x: Vec2, form: F2Form) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    let t = matrix_root(field.k(y))?;
    let tinv = crate::coeffs::mat_inv(t);
    let dets = det2(field.k(y)).sqrt();
    let (dk1, dk2) = field.dk(y);
    let dk = [dk1, dk2];
    let u = mat_vec(t, [x[0] - y[0], x[1] - y[1]]);
    let r2 = u[0] * u[0] + u[1] * u[1];
    let lnu = 0.5 * r2.ln();
    let (u1, u2) = (u[0], u[1]);
    // ratio terms shared by both forms
    let c111 = -0.125 * u1 * u1 * u1 / r2;
    let c112 = -0.125 * u1 * u1 * u2 / r2;
    let c122 = -0.125 * u1 * u2 * u2 / r2;
    let c222 = -0.125 * u2 * u2 * u2 / r2;
    let log1 = 0.125 * u1 * lnu;
    let log2 = 0.125 * u2 * lnu;
    let mut total = 0.0;
    for alpha in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let w = dk[alpha][i][j];
                if w == 0.0 {
                    continue;
                }
                let bracket = match form {
                    F2Form::Statement => {
                        tinv[alpha][0]
                            * (t[0][j] * t[0][i] * (c111 + log1)
                                + t[0][j] * t[1][i] * (c112 + log2)
                                + t[1][j] * t[0][i] * (c112 + log2)
                                + t[1][j] * t[1][i] * (c122 - log1))
                            + tinv[alpha][1]
                                * (t[0][j] * t[0][i] * (c112 - log2)
                                    + t[0][j] * t[1][i] * (c122 + log1)
                                    + t[1][j] * t[0][i] * (c122 + log1)
                                    + t[1][j] * t[1][i] * (c222 + log2))
                    }
                    F2Form::Proof => {
                        // bracket with 3/8 on the cubes ...
                        let b = tinv[alpha][0]
                            * (t[0][j] * t[0][i] * (c111 + 3.0 * log1)
                                + t[0][j] * t[1][i] * (c112 + log2)
                                + t[1][j] * t[0][i] * (c112 + log2)
                                + t[1][j] * t[1][i] * (c122 + log1))
                            + tinv[alpha][1]
                                * (t[0][j] * t[0][i] * (c112 + log2)
                                    + t[0][j] * t[1][i] * (c122 + log1)
                                    + t[1][j] * t[0][i] * (c122 + log1)
                                    + t[1][j] * t[1][i] * (c222 + 3.0 * log2));
                        // ... minus the separate Kronecker-delta log sum
                        let mut dsum = 0.0;
                        for beta in 0..2 {
                            let ub_ln = if beta == 0 { u1 * lnu } else { u2 * lnu };
                            for m in 0..2 {
                                dsum += tinv[alpha][beta] * t[m][j] * t[m][i] * 0.5 * ub_ln;
                            }
                        }
                        b - dsum / 2.0
                    }
                };
                total += w * bracket;
            }
        }
    }
    Ok(total / (PI * dets))
}

/// One Green's-function column `G(., y)` on a grid with its singular/regular
/// split and (clearance permitting) the Robin value.
pub struct GreenTable {
    /// Requested source point.
    pub y: Vec2,
    /// Grid node actually carrying the discrete delta.
    pub y_node: Vec2,
    pub y_index: usize,
    /// `G(., y_node)` at interior nodes.
    pub g: Vec<f64>,
    /// Regular part `Sbar(., y_node)` at interior nodes.
    pub sbar: Vec<f64>,
    /// Ring-extrapolated `Sbar(y, y)`, when clearance >= 8h.
    pub robin: Option<f64>,
    /// Spread of the ring means feeding the extrapolation.
    pub robin_spread: Option<f64>,
    /// Radius around the source below which samples are unreliable.
    pub r_excl: f64,
}

/// Solves one column through the unscaled operator: a single-node `h^-2`
/// spike, no mollification, with the 3h exclusion radius absorbing the local
/// error.
pub fn green_column(
    op: &DiscreteOperator,
    grid: &Grid2D,
    field: &CoefficientField,
    y: Vec2,
) -> Result<GreenTable> {
    if !grid.domain.contains(y) {
        return Err(Error::invalid("green_column: source point outside the domain"));
    }
    if grid.domain.boundary_distance(y) < 4.0 * grid.h {
        return Err(Error::invalid(
            "green_column: source must keep a clearance of at least 4h from the boundary",
        ));
    }
    let y_index = grid.nearest_interior(y)?;
    let y_node = grid.nodes[y_index];
    let n = grid.n_interior();
    let mut rhs = vec![0.0; n];
    rhs[y_index] = 1.0 / (grid.h * grid.h);
    let mut g = op.solve(&rhs)?;
    if op.prefactor != 1.0 {
        // recover the Green function of the unscaled operator
        for v in &mut g {
            *v *= op.prefactor;
        }
    }
    let mut sbar = vec![f64::NAN; n];
    for i in 0..n {
        if i != y_index {
            sbar[i] = g[i] - singular_part(field, y_node, grid.nodes[i])?;
        }
    }
    let r_excl = 3.0 * grid.h;
    let mut table = GreenTable {
        y,
        y_node,
        y_index,
        g,
        sbar,
        robin: None,
        robin_spread: None,
        r_excl,
    };
    if grid.domain.boundary_distance(y_node) >= 9.0 * grid.h {
        let (robin, spread) = robin_from_table(&table, grid, field)?;
        table.sbar[y_index] = robin;
        table.robin = Some(robin);
        table.robin_spread = Some(spread);
    }
    Ok(table)
}

/// Ring-average Robin extraction: `Sbar` sampled on rings r in {4h, 6h, 8h}
/// around the source, each ring averaged, then extrapolated to r = 0 by the
/// quadratic through the three means. Returns `(extrapolant, spread)`.
fn robin_from_table(
    table: &GreenTable,
    grid: &Grid2D,
    field: &CoefficientField,
) -> Result<(f64, f64)> {
    let y = table.y_node;
    let radii = [4.0 * grid.h, 6.0 * grid.h, 8.0 * grid.h];
    let n_ang = 64;
    let mut means = [0.0f64; 3];
    for (k, &r) in radii.iter().enumerate() {
        let mut acc = 0.0;
        for a in 0..n_ang {
            let th = 2.0 * PI * a as f64 / n_ang as f64;
            let x = [y[0] + r * th.cos(), y[1] + r * th.sin()];
            let gv = grid.interp(&table.g, x);
            acc += gv - singular_part(field, y, x)?;
        }
        means[k] = acc / n_ang as f64;
    }
    // quadratic through (r_k, mean_k); the constant term is the extrapolant
    let (r0, r1, r2) = (radii[0], radii[1], radii[2]);
    let (m0, m1, m2) = (means[0], means[1], means[2]);
    let l0 = r1 * r2 / ((r0 - r1) * (r0 - r2));
    let l1 = r0 * r2 / ((r1 - r0) * (r1 - r2));
    let l2 = r0 * r1 / ((r2 - r0) * (r2 - r1));
    let c0 = l0 * m0 + l1 * m1 + l2 * m2;
    let spread = (m0.max(m1).max(m2)) - (m0.min(m1).min(m2));
    Ok((c0, spread))
}

/// Robin value `Sbar(y, y)` by a dedicated column solve.
pub fn robin_value(
    op: &DiscreteOperator,
    grid: &Grid2D,
    field: &CoefficientField,
    y: Vec2,
) -> Result<(f64, f64)> {
    if !grid.domain.contains(y) || grid.domain.boundary_distance(y) < 8.0 * grid.h {
        return Err(Error::invalid(
            "robin_value: source must keep a clearance of at least 8h from the boundary",
        ));
    }
    let table = green_column(op, grid, field, y)?;
    match (table.robin, table.robin_spread) {
        (Some(r), Some(s)) => Ok((r, s)),
        _ => Err(Error::invalid("robin_value: insufficient clearance for ring extraction")),
    }
}

/// Interpolated numeric `G(x, y)` from a computed column.
pub fn green_at(grid: &Grid2D, table: &GreenTable, x: Vec2) -> Result<f64> {
    let d = (x[0] - table.y_node[0]).hypot(x[1] - table.y_node[1]);
    if d == 0.0 {
        return Err(Error::invalid("green_at: coincident points"));
    }
    Ok(grid.interp(&table.g, x))
}

/// Exact Green's function of `-Lap` on the unit disk by the method of
/// images: `G(x,y) = (1/2pi)[ln(|y| |x - y/|y|^2|) - ln|x - y|]`.
pub fn oracle_disk_green(x: Vec2, y: Vec2) -> Result<f64> {
    let d = (x[0] - y[0]).hypot(x[1] - y[1]);
    if d == 0.0 {
        return Err(Error::invalid("oracle_disk_green: coincident points"));
    }
    let ay = y[0].hypot(y[1]);
    if ay < 1e-14 {
        return Ok(-(x[0].hypot(x[1])).ln() / (2.0 * PI));
    }
    let img = (x[0] - y[0] / (ay * ay)).hypot(x[1] - y[1] / (ay * ay));
    Ok(((ay * img).ln() - d.ln()) / (2.0 * PI))
}

/// Regular part of the disk oracle on the diagonal: `(1/2pi) ln(1 - |y|^2)`.
pub fn oracle_disk_robin(y: Vec2) -> f64 {
    (1.0 - y[0] * y[0] - y[1] * y[1]).ln() / (2.0 * PI)
}

/// Robin values and Green evaluations at cluster centers, as consumed by the
/// amplitude fixed point and the reduced energy.
pub trait GreensProvider {
    fn robin(&self, y: Vec2) -> Result<f64>;
    fn green(&self, x: Vec2, y: Vec2) -> Result<f64>;
}

/// Exact provider for `K = Id` on the unit disk (method of images).
pub struct DiskOracleProvider;

impl GreensProvider for DiskOracleProvider {
    fn robin(&self, y: Vec2) -> Result<f64> {
        Ok(oracle_disk_robin(y))
    }

    fn green(&self, x: Vec2, y: Vec2) -> Result<f64> {
        oracle_disk_green(x, y)
    }
}

/// Numeric provider backed by Green columns precomputed on a coarse lattice
/// of source points. `G(x, y)` splits into the exact singular part plus
/// `Sbar(x, y)` interpolated bilinearly in the source over the four nearest
/// lattice columns (each itself grid-interpolated in x); Robin values
/// interpolate the per-source ring extrapolants.
pub struct CachedColumnProvider<'a> {
    grid: &'a Grid2D,
    field: &'a CoefficientField,
    src0: Vec2,
    src_h: f64,
    src_nx: usize,
    src_ny: usize,
    /// Column tables, row-major over the source lattice; None off-domain.
    columns: Vec<Option<GreenTable>>,
}

impl<'a> CachedColumnProvider<'a> {
    /// Builds columns for every source-lattice point of spacing `src_h`
    /// inside the ball of `radius` around `center` that keeps a 9h boundary
    /// clearance.
    pub fn build(
        op: &DiscreteOperator,
        grid: &'a Grid2D,
        field: &'a CoefficientField,
        center: Vec2,
        radius: f64,
        src_h: f64,
    ) -> Result<Self> {
        let n_half = (radius / src_h).ceil() as i64 + 1;
        let src_nx = (2 * n_half + 1) as usize;
        let src0 = [center[0] - n_half as f64 * src_h, center[1] - n_half as f64 * src_h];
        let mut columns = Vec::with_capacity(src_nx * src_nx);
        for i in 0..src_nx {
            for j in 0..src_nx {
                let y = [src0[0] + i as f64 * src_h, src0[1] + j as f64 * src_h];
                let ok = grid.domain.contains(y)
                    && grid.domain.boundary_distance(y) >= 9.0 * grid.h;
                if ok {
                    columns.push(Some(green_column(op, grid, field, y)?));
                } else {
                    columns.push(None);
                }
            }
        }
        Ok(CachedColumnProvider { grid, field, src0, src_h, src_nx, src_ny: src_nx, columns })
    }

    fn cell_of(&self, y: Vec2) -> Result<(usize, usize, f64, f64)> {
        let fx = (y[0] - self.src0[0]) / self.src_h;
        let fy = (y[1] - self.src0[1]) / self.src_h;
        let i = fx.floor() as i64;
        let j = fy.floor() as i64;
        if i < 0 || j < 0 || i + 1 >= self.src_nx as i64 || j + 1 >= self.src_ny as i64 {
            return Err(Error::invalid(format!(
                "greens cache: point ({}, {}) outside the cached source lattice",
                y[0], y[1]
            )));
        }
        Ok((i as usize, j as usize, fx - i as f64, fy - j as f64))
    }

    fn corner(&self, i: usize, j: usize) -> Result<&GreenTable> {
        self.columns[i * self.src_ny + j].as_ref().ok_or_else(|| {
            Error::invalid("greens cache: source cell touches the uncovered boundary band")
        })
    }
}

impl GreensProvider for CachedColumnProvider<'_> {
    fn robin(&self, y: Vec2) -> Result<f64> {
        let (i, j, tx, ty) = self.cell_of(y)?;
        let mut acc = 0.0;
        for (di, dj, w) in [
            (0, 0, (1.0 - tx) * (1.0 - ty)),
            (1, 0, tx * (1.0 - ty)),
            (0, 1, (1.0 - tx) * ty),
            (1, 1, tx * ty),
        ] {
            let t = self.corner(i + di, j + dj)?;
            let r = t.robin.ok_or_else(|| Error::invalid("greens cache: missing robin value"))?;
            acc += w * r;
        }
        Ok(acc)
    }

    fn green(&self, x: Vec2, y: Vec2) -> Result<f64> {
        let (i, j, tx, ty) = self.cell_of(y)?;
        let mut sbar = 0.0;
        for (di, dj, w) in [
            (0, 0, (1.0 - tx) * (1.0 - ty)),
            (1, 0, tx * (1.0 - ty)),
            (0, 1, (1.0 - tx) * ty),
            (1, 1, tx * ty),
        ] {
            let t = self.corner(i + di, j + dj)?;
            sbar += w * self.grid.interp(&t.sbar, x);
        }
        Ok(singular_part(self.field, y, x)? + sbar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{CoefficientField, Domain, HelicalParams};
    use crate::grid::{assemble, build_grid};

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn singular_part_values() {
        let f = CoefficientField::identity(Domain::unit_disk()).unwrap();
        // |x-y| = 1 -> 0
        let v = singular_part(&f, [0.0, 0.0], [1.0, 0.0]).unwrap();
        assert!(v.abs() < 1e-15);
        // |x-y| = e^{-1} -> 1/(2pi)
        let e1 = (-1.0f64).exp();
        let v = singular_part(&f, [0.0, 0.0], [e1, 0.0]).unwrap();
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-14);
        assert!(singular_part(&f, [0.1, 0.2], [0.1, 0.2]).is_err());
    }

    #[test]
    fn singular_part_diagonal_matrix() {
        // K = diag(4, 1): T = diag(1/2, 1), det factor 1/2; hand evaluation.
        let f = CoefficientField::from_fns(
            Domain::unit_disk(),
            std::sync::Arc::new(|_| [[4.0, 0.0], [0.0, 1.0]]),
            Some(Box::new(|_| ([[0.0; 2]; 2], [[0.0; 2]; 2]))),
            Box::new(|_| 1.0),
            Box::new(|_| [0.0, 0.0]),
            1.0,
            4.0,
        )
        .unwrap();
        let x = [0.3, -0.2];
        let y = [-0.1, 0.1];
        let u = [0.5 * (x[0] - y[0]), x[1] - y[1]];
        let expect = -f64::hypot(u[0], u[1]).ln() / (2.0 * PI) / 2.0;
        let got = singular_part(&f, y, x).unwrap();
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn corrections_vanish_for_constant_k() {
        let f = CoefficientField::identity(Domain::unit_disk()).unwrap();
        let mut st = 42u64;
        for _ in 0..1000 {
            let x = [lcg(&mut st) - 0.5, lcg(&mut st) - 0.5];
            let y = [lcg(&mut st) - 0.5, lcg(&mut st) - 0.5];
            if x == y {
                continue;
            }
            assert_eq!(f1_correction(&f, y, x).unwrap(), 0.0);
            assert_eq!(f2_correction(&f, y, x, F2Form::Statement).unwrap(), 0.0);
            assert_eq!(f2_correction(&f, y, x, F2Form::Proof).unwrap(), 0.0);
        }
    }

    #[test]
    fn f2_forms_agree() {
        // statement-form and proof-form agree at random pairs to 1e-10
        let f = CoefficientField::helical(HelicalParams { k: 0.8, alpha: -0.4, beta: 2.0, rstar: 1.0 })
            .unwrap();
        let g = CoefficientField::scalar_default().unwrap();
        let mut st = 2024u64;
        for field in [&f, &g] {
            for _ in 0..50 {
                let r = 0.8 * lcg(&mut st);
                let th = 2.0 * PI * lcg(&mut st);
                let y = [r * th.cos(), r * th.sin()];
                let r2 = 0.8 * lcg(&mut st);
                let th2 = 2.0 * PI * lcg(&mut st);
                let x = [r2 * th2.cos(), r2 * th2.sin()];
                if x == y {
                    continue;
                }
                let a = f2_correction(field, y, x, F2Form::Statement).unwrap();
                let b = f2_correction(field, y, x, F2Form::Proof).unwrap();
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn f1_scalar_field_structure() {
        // For K = (1/b) Id: F1 = grad b(y).(x-y)/(4pi) ln|x-y| + C1 remainder;
        // check the leading coefficient by sampling along a shrinking ray.
        let f = CoefficientField::scalar_default().unwrap();
        let y = [0.4, 0.1];
        let gb = [y[0] / 2.0, y[1] / 2.0];
        let dir = [0.6, 0.8];
        for &r in &[1e-3, 1e-5] {
            let x = [y[0] + r * dir[0], y[1] + r * dir[1]];
            let lead = (gb[0] * (x[0] - y[0]) + gb[1] * (x[1] - y[1])) / (4.0 * PI)
                * ((x[0] - y[0]).hypot(x[1] - y[1])).ln();
            let v = f1_correction(&f, y, x).unwrap();
            // remainder is O(r), the term itself O(r ln r)
            assert!(
                (v - lead).abs() <= 0.3 * lead.abs(),
                "r={r}: F1={v} leading={lead}"
            );
        }
        // |F1| -> 0 along the ray like r ln(1/r)
        let v = f1_correction(&f, y, [y[0] + 1e-8, y[1]]).unwrap();
        assert!(v.abs() < 1e-6);
        assert_eq!(f1_correction(&f, y, y).unwrap(), 0.0);
    }

    #[test]
    fn green_column_matches_disk_oracle() {
        let h = 1.0 / 64.0;
        let grid = build_grid(Domain::unit_disk(), h).unwrap();
        let f = CoefficientField::identity(Domain::unit_disk()).unwrap();
        let op = assemble(&grid, &f, 1.0).unwrap();
        let table = green_column(&op, &grid, &f, [0.3, 0.0]).unwrap();
        let yn = table.y_node;
        let mut worst = 0.0f64;
        for (i, x) in grid.nodes.iter().enumerate() {
            let sep = (x[0] - yn[0]).hypot(x[1] - yn[1]);
            if sep <= 6.0 * h {
                continue;
            }
            let ex = oracle_disk_green(*x, yn).unwrap();
            if ex.abs() > 1e-3 {
                worst = worst.max((table.g[i] - ex).abs() / ex.abs());
            }
        }
        assert!(worst <= 0.03, "max rel err {worst}");
        assert!(table.g.iter().all(|v| v.is_finite()));
        // positivity up to tolerance
        let gmax = table.g.iter().fold(0.0f64, |m, v| m.max(*v));
        assert!(table.g.iter().all(|&v| v >= -1e-8 * gmax));
    }

    #[test]
    fn green_column_symmetry() {
        let h = 1.0 / 48.0;
        let grid = build_grid(Domain::unit_disk(), h).unwrap();
        let f = CoefficientField::helical(HelicalParams { k: 1.0, alpha: -0.5, beta: 2.0, rstar: 1.0 })
            .unwrap();
        let op = assemble(&grid, &f, 1.0).unwrap();
        let ta = green_column(&op, &grid, &f, [0.3, 0.1]).unwrap();
        let tb = green_column(&op, &grid, &f, [-0.2, 0.4]).unwrap();
        let gab = ta.g[tb.y_index];
        let gba = tb.g[ta.y_index];
        assert!((gab - gba).abs() < 1e-6, "{gab} vs {gba}");
    }

    #[test]
    fn green_column_rejects_bad_sources() {
        let grid = build_grid(Domain::unit_disk(), 1.0 / 32.0).unwrap();
        let f = CoefficientField::identity(Domain::unit_disk()).unwrap();
        let op = assemble(&grid, &f, 1.0).unwrap();
        assert!(green_column(&op, &grid, &f, [1.2, 0.0]).is_err());
        assert!(green_column(&op, &grid, &f, [0.99, 0.0]).is_err());
    }

    #[test]
    fn robin_disk_values() {
        let h = 1.0 / 128.0;
        let grid = build_grid(Domain::unit_disk(), h).unwrap();
        let f = CoefficientField::identity(Domain::unit_disk()).unwrap();
        let op = assemble(&grid, &f, 1.0).unwrap();
        for y in [[0.0, 0.0], [0.5, 0.0]] {
            let (r, spread) = robin_value(&op, &grid, &f, y).unwrap();
            let exact = oracle_disk_robin(y);
            assert!((r - exact).abs() <= 5e-3, "y={y:?}: {r} vs {exact}");
            assert!(spread.abs() < 5e-3);
        }
        // monotone decrease along a radius toward the boundary
        let r1 = robin_value(&op, &grid, &f, [0.2, 0.0]).unwrap().0;
        let r2 = robin_value(&op, &grid, &f, [0.5, 0.0]).unwrap().0;
        let r3 = robin_value(&op, &grid, &f, [0.7, 0.0]).unwrap().0;
        assert!(r1 > r2 && r2 > r3);
        assert!(robin_value(&op, &grid, &f, [0.99, 0.0]).is_err());
    }

    #[test]
    fn oracle_green_properties() {
        // G(x, 0) = -(1/2pi) ln |x|
        let x = [0.35, -0.2];
        let g = oracle_disk_green(x, [0.0, 0.0]).unwrap();
        assert!((g + (x[0].hypot(x[1])).ln() / (2.0 * PI)).abs() < 1e-15);
        // symmetry at random pairs
        let mut st = 7u64;
        for _ in 0..20 {
            let a = [0.9 * (lcg(&mut st) - 0.5), 0.9 * (lcg(&mut st) - 0.5)];
            let b = [0.9 * (lcg(&mut st) - 0.5), 0.9 * (lcg(&mut st) - 0.5)];
            if a == b {
                continue;
            }
            let gab = oracle_disk_green(a, b).unwrap();
            let gba = oracle_disk_green(b, a).unwrap();
            assert!((gab - gba).abs() <= 1e-14 * gab.abs().max(1.0));
        }
        assert!(oracle_disk_green(x, x).is_err());
    }

    #[test]
    fn cached_provider_matches_oracle_on_disk() {
        let h = 1.0 / 64.0;
        let grid = build_grid(Domain::unit_disk(), h).unwrap();
        let f = CoefficientField::identity(Domain::unit_disk()).unwrap();
        let op = assemble(&grid, &f, 1.0).unwrap();
        let cache = CachedColumnProvider::build(&op, &grid, &f, [0.3, 0.0], 0.3, 0.1).unwrap();
        let oracle = DiskOracleProvider;
        for y in [[0.3, 0.0], [0.25, 0.05], [0.42, -0.13]] {
            let a = cache.robin(y).unwrap();
            let b = oracle.robin(y).unwrap();
            assert!((a - b).abs() < 6e-3, "robin at {y:?}: {a} vs {b}");
        }
        let pairs = [([0.15, 0.0], [0.45, 0.0]), ([0.3, 0.12], [0.32, -0.2])];
        for (x, y) in pairs {
            let a = cache.green(x, y).unwrap();
            let b = oracle.green(x, y).unwrap();
            assert!((a - b).abs() <= 0.03 * b.abs().max(0.05), "G({x:?},{y:?}) {a} vs {b}");
        }
        assert!(cache.green([0.0, 0.0], [0.9, 0.0]).is_err());
    }
}
