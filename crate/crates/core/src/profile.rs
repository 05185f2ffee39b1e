//! The radial bubble profile: the ground state of `-Lap(phi) = phi^p` on the
//! unit disk with `phi(1) = 0`, `phi'(0) = 0`, computed by shooting on the
//! center amplitude, plus the core-scale equation and the extended limit
//! profile.

use crate::error::Error;
use crate::Result;

/// Ground state of the radial problem with values and derivatives on a
/// uniform knot table, cubic-Hermite interpolated.
pub struct RadialProfile {
    pub p: f64,
    /// Center amplitude `a = phi(0)`.
    pub a: f64,
    /// Boundary slope `phi'(1) < 0`.
    pub dphi1: f64,
    /// Uniform knots 0 = r_0 < ... < r_N = 1.
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    /// Second derivatives at knots via the ODE itself.
    pub ddphi: Vec<f64>,
}

impl RadialProfile {
    /// `phi(r)` by cubic Hermite interpolation; 0 for r >= 1.
    pub fn eval(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let r = r.max(0.0);
        let n = self.r.len() - 1;
        let dr = 1.0 / n as f64;
        let i = ((r / dr) as usize).min(n - 1);
        let t = (r - self.r[i]) / dr;
        hermite(self.phi[i], self.dphi[i], self.phi[i + 1], self.dphi[i + 1], t, dr).0
    }

    /// `phi'(r)`; `phi'(1)` for r >= 1 (one-sided).
    pub fn eval_deriv(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return self.dphi1;
        }
        let r = r.max(0.0);
        let n = self.r.len() - 1;
        let dr = 1.0 / n as f64;
        let i = ((r / dr) as usize).min(n - 1);
        let t = (r - self.r[i]) / dr;
        hermite(self.phi[i], self.dphi[i], self.phi[i + 1], self.dphi[i + 1], t, dr).1
    }

    /// Max ODE residual `phi'' + phi'/r + phi^p` at knot midpoints
    /// (`2 phi''(0) + phi(0)^p` at the center), evaluated through the quintic
    /// Hermite interpolant built from `(phi, phi', phi'')` knot data.
    pub fn ode_residual(&self) -> f64 {
        let n = self.r.len() - 1;
        let dr = 1.0 / n as f64;
        // the r = 0 limit form at the center knot
        let mut worst = (2.0 * self.ddphi[0] + self.phi[0].powf(self.p)).abs();
        for i in 0..n {
            let (v, d, dd) = quintic_mid(
                [self.phi[i], self.dphi[i], self.ddphi[i]],
                [self.phi[i + 1], self.dphi[i + 1], self.ddphi[i + 1]],
                dr,
            );
            let rm = self.r[i] + 0.5 * dr;
            let res = dd + d / rm + v.max(0.0).powf(self.p);
            worst = worst.max(res.abs());
        }
        worst
    }

    /// Integrals `(int phi^p, int phi^{p+1})` over the unit disk by composite
    /// Simpson in radius (`int_B g(|x|) = 2 pi int_0^1 g(r) r dr`).
    pub fn disk_integrals(&self) -> (f64, f64) {
        let ip = simpson_radial(&self.r, &self.phi, self.p);
        let ip1 = simpson_radial(&self.r, &self.phi, self.p + 1.0);
        (ip, ip1)
    }
}

fn hermite(f0: f64, d0: f64, f1: f64, d1: f64, t: f64, dr: f64) -> (f64, f64, f64) {
    let h00 = 2.0 * t * t * t - 3.0 * t * t + 1.0;
    let h10 = t * t * t - 2.0 * t * t + t;
    let h01 = -2.0 * t * t * t + 3.0 * t * t;
    let h11 = t * t * t - t * t;
    let v = h00 * f0 + h10 * dr * d0 + h01 * f1 + h11 * dr * d1;
    let dh00 = 6.0 * t * t - 6.0 * t;
    let dh10 = 3.0 * t * t - 4.0 * t + 1.0;
    let dh01 = -6.0 * t * t + 6.0 * t;
    let dh11 = 3.0 * t * t - 2.0 * t;
    let d = (dh00 * f0 + dh10 * dr * d0 + dh01 * f1 + dh11 * dr * d1) / dr;
    let ddh00 = 12.0 * t - 6.0;
    let ddh10 = 6.0 * t - 4.0;
    let ddh01 = -12.0 * t + 6.0;
    let ddh11 = 6.0 * t - 2.0;
    let dd = (ddh00 * f0 + ddh10 * dr * d0 + ddh01 * f1 + ddh11 * dr * d1) / (dr * dr);
    (v, d, dd)
}

/// Quintic Hermite value/derivative/second-derivative at the interval
/// midpoint from endpoint data `(f, f', f'')`.
fn quintic_mid(y0: [f64; 3], y1: [f64; 3], dr: f64) -> (f64, f64, f64) {
    let v = 0.5 * (y0[0] + y1[0]) + dr * (5.0 / 32.0) * (y0[1] - y1[1])
        + dr * dr / 64.0 * (y0[2] + y1[2]);
    let d = (15.0 / 8.0) * (y1[0] - y0[0]) / dr - (7.0 / 16.0) * (y0[1] + y1[1])
        + dr / 32.0 * (y1[2] - y0[2]);
    let dd = 1.5 * (y1[1] - y0[1]) / dr - 0.25 * (y0[2] + y1[2]);
    (v, d, dd)
}

fn simpson_radial(r: &[f64], phi: &[f64], pow: f64) -> f64 {
    // integrand g(r) = phi(r)^pow * r; the knot count is even by construction
    let n = r.len() - 1;
    let dr = r[1] - r[0];
    let g = |i: usize| phi[i].max(0.0).powf(pow) * r[i];
    let mut s = g(0) + g(n);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 * g(i) } else { 2.0 * g(i) };
    }
    2.0 * std::f64::consts::PI * s * dr / 3.0
}

/// Radial ODE right-hand side for y = (phi, phi').
fn rhs(p: f64, r: f64, y: [f64; 2]) -> [f64; 2] {
    [y[1], -y[1] / r - y[0].max(0.0).powf(p)]
}

/// Series start near r = 0:
/// phi = a - a^p r^2/4 + p a^{2p-1} r^4/64 - p(3p-2) a^{3p-2} r^6/2304.
fn series_start(p: f64, a: f64, r: f64) -> [f64; 2] {
    let c2 = -a.powf(p) / 4.0;
    let c4 = p * a.powf(2.0 * p - 1.0) / 64.0;
    let c6 = -p * (3.0 * p - 2.0) * a.powf(3.0 * p - 2.0) / 2304.0;
    [
        a + c2 * r * r + c4 * r.powi(4) + c6 * r.powi(6),
        2.0 * c2 * r + 4.0 * c4 * r.powi(3) + 6.0 * c6 * r.powi(5),
    ]
}

/// One classic RK4 step.
fn rk4_step(p: f64, r: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let k1 = rhs(p, r, y);
    let k2 = rhs(p, r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
    let k3 = rhs(p, r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
    let k4 = rhs(p, r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Dormand-Prince 5(4) adaptive step; returns (y5, error estimate).
fn dp45_step(p: f64, r: f64, y: [f64; 2], h: f64) -> ([f64; 2], f64) {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut k = [[0.0f64; 2]; 7];
    k[0] = rhs(p, r, y);
    for s in 0..6 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s + 1) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s + 1] = rhs(p, r + C[s] * h, ys);
    }
    // the 5th-order solution is the last stage state (FSAL tableau)
    let mut y5 = y;
    for (j, kj) in k.iter().enumerate().take(6) {
        y5[0] += h * A[5][j] * kj[0];
        y5[1] += h * A[5][j] * kj[1];
    }
    let mut err = [0.0f64; 2];
    for (j, kj) in k.iter().enumerate() {
        err[0] += h * E[j] * kj[0];
        err[1] += h * E[j] * kj[1];
    }
    (y5, err[0].abs().max(err[1].abs()))
}

/// Integrates from the series start until `phi` crosses zero; returns
/// `(r_zero, dphi_at_zero)` with the crossing located by bisection on the
/// final step.
fn shoot_to_zero(p: f64, a: f64, tol: f64) -> Result<(f64, f64)> {
    let r0 = 1e-4 / a.powf((p - 1.0) / 2.0).max(1.0);
    let mut r = r0;
    let mut y = series_start(p, a, r0);
    let mut h = 1e-3;
    let atol = (0.01 * tol * a).max(1e-14 * a);
    let rmax = 50.0;
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > 2_000_000 || r > rmax {
            return Err(Error::numerical(format!(
                "shooting integration exceeded range (a = {a}, r = {r})"
            )));
        }
        let (ynew, err) = dp45_step(p, r, y, h);
        if err > atol {
            h *= 0.5 * (atol / err).powf(0.2).max(0.2);
            continue;
        }
        if ynew[0] <= 0.0 {
            // bisect the partial step for the crossing
            let (mut lo, mut hi) = (0.0f64, h);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                let (ym, _) = dp45_step(p, r, y, mid);
                if ym[0] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-16 * (r + h) {
                    break;
                }
            }
            let hc = 0.5 * (lo + hi);
            let (yc, _) = dp45_step(p, r, y, hc);
            return Ok((r + hc, yc[1]));
        }
        r += h;
        y = ynew;
        if err > 0.0 {
            h = (h * 0.9 * (atol / err).powf(0.2)).min(2.0 * h).min(0.05);
        } else {
            h = (2.0 * h).min(0.05);
        }
    }
}

/// Number of knot intervals in the stored table. The residual check divides
/// first-derivative roundoff by the radius, so much finer tables lose more
/// to floating-point noise near the origin than they gain in truncation.
const TABLE_N: usize = 2048;

/// Computes the radial ground state by shooting on the center amplitude.
///
/// Bisection brackets `a` in [1e-3, 1e3] on the first-zero location, a secant
/// polish drives `|r_zero(a) - 1| <= tol`, and a final pass re-integrates
/// with fixed-step RK4 onto a uniform table, rescaled through the ODE's
/// exact scaling family so the zero sits at exactly r = 1.
pub fn compute_profile(p: f64, tol: f64) -> Result<RadialProfile> {
    if !(p > 1.0) {
        return Err(Error::invalid("profile exponent p must be > 1"));
    }
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::invalid("profile tolerance must lie in [1e-12, 1e-4]"));
    }
    // r_zero(a) is strictly decreasing; bracket it in [1e-3, 1e3]. Small
    // amplitudes put the zero beyond the integration range, which counts as
    // "zero past r = 1" for bracketing purposes.
    let (mut alo, mut ahi) = (1e-3, 1e3);
    let f = |a: f64| -> Result<f64> {
        match shoot_to_zero(p, a, tol) {
            Ok((rz, _)) => Ok(rz - 1.0),
            Err(Error::Numerical(msg)) if msg.contains("exceeded range") => Ok(1e6),
            Err(e) => Err(e),
        }
    };
    let flo = f(alo)?;
    let fhi = f(ahi)?;
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(Error::numerical(
            "shooting bracket not found for a in [1e-3, 1e3]".to_string(),
        ));
    }
    for _ in 0..40 {
        let mid = (alo * ahi).sqrt();
        if f(mid)? > 0.0 {
            alo = mid;
        } else {
            ahi = mid;
        }
    }
    // secant polish
    let mut a0 = alo;
    let mut a1 = ahi;
    let mut f0 = f(a0)?;
    let mut f1 = f(a1)?;
    let mut a_best = a1;
    for _ in 0..50 {
        if (f1 - f0).abs() < 1e-300 {
            break;
        }
        let a2 = (a1 - f1 * (a1 - a0) / (f1 - f0)).clamp(1e-3, 1e3);
        let f2 = f(a2)?;
        a0 = a1;
        f0 = f1;
        a1 = a2;
        f1 = f2;
        a_best = a2;
        if f2.abs() < tol.min(1e-12) {
            break;
        }
    }
    let a = a_best;
    let (r_zero, _) = shoot_to_zero(p, a, tol)?;

    // Fixed-step RK4 table on [0, r_zero], rescaled so the zero is at 1:
    // phi_norm(r) = lam^{2/(p-1)} phi(lam r) with lam = r_zero.
    let n = TABLE_N;
    let dr = r_zero / n as f64;
    let mut phi = vec![0.0; n + 1];
    let mut dphi = vec![0.0; n + 1];
    phi[0] = a;
    dphi[0] = 0.0;
    // Seed the first knots from the series (RK4's error terms carry inverse
    // powers of r near the axis), then integrate outward.
    let series_r = 0.02 / a.powf((p - 1.0) / 2.0).max(1.0);
    let k_seed = ((series_r / dr) as usize).clamp(1, n / 2);
    for i in 1..=k_seed {
        let y = series_start(p, a, i as f64 * dr);
        phi[i] = y[0];
        dphi[i] = y[1];
    }
    let mut y = [phi[k_seed], dphi[k_seed]];
    for i in k_seed..n {
        let r = i as f64 * dr;
        y = rk4_step(p, r, y, dr);
        phi[i + 1] = y[0];
        dphi[i + 1] = y[1];
    }
    let lam = r_zero;
    let amp = lam.powf(2.0 / (p - 1.0));
    let r_knots: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    for i in 0..=n {
        phi[i] *= amp;
        dphi[i] *= amp * lam;
    }
    // boundary values enforced exactly
    phi[n] = 0.0;
    dphi[0] = 0.0;
    let dphi1 = dphi[n];
    if !(dphi1 < 0.0) {
        return Err(Error::numerical("profile boundary slope is not negative"));
    }
    // second derivatives through the ODE: phi'' = -phi'/r - phi^p
    let mut ddphi = vec![0.0; n + 1];
    ddphi[0] = -phi[0].powf(p) / 2.0;
    for i in 1..=n {
        ddphi[i] = -dphi[i] / r_knots[i] - phi[i].max(0.0).powf(p);
    }
    Ok(RadialProfile { p, a: phi[0], dphi1, r: r_knots, phi, dphi, ddphi })
}

/// Relative residuals of the two Pohozaev identities
/// `int phi^{p+1} = pi (p+1)/2 |phi'(1)|^2` and `int phi^p = 2 pi |phi'(1)|`.
pub fn pohozaev_check(profile: &RadialProfile) -> (f64, f64) {
    let (ip, ip1) = profile.disk_integrals();
    let p = profile.p;
    let t1 = std::f64::consts::PI * (p + 1.0) / 2.0 * profile.dphi1 * profile.dphi1;
    let t2 = 2.0 * std::f64::consts::PI * profile.dphi1.abs();
    ((ip1 - t1).abs() / t1.abs(), (ip - t2).abs() / t2.abs())
}

/// Reduced small parameter, amplitude, and core radius of one bubble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreScale {
    pub delta: f64,
    pub qhat: f64,
    /// Core radius in (0, 1), the root of the C1 matching equation.
    pub s_delta: f64,
    /// Diagnostic ratio `s_delta / (delta |ln delta|^{(p-1)/2})`.
    pub ratio: f64,
}

/// Solves the core-scale equation
/// `delta^{2/(p-1)} s^{-2/(p-1)} phi'(1) = qhat / ln s` for `s` in
/// `(0, e^{-1})` (so ln s < -1 picks the correct branch) by bisection in
/// ln s to 1e-12 relative.
pub fn solve_core_scale(delta: f64, qhat: f64, profile: &RadialProfile) -> Result<CoreScale> {
    if !(delta > 0.0) || !(qhat > 0.0) {
        return Err(Error::invalid("core scale requires delta > 0 and qhat > 0"));
    }
    let p = profile.p;
    let e = 2.0 / (p - 1.0);
    let dphi1 = profile.dphi1;
    let g = |ln_s: f64| -> f64 { (e * (delta.ln() - ln_s)).exp() * dphi1 - qhat / ln_s };
    let mut hi = -1.0 - 1e-12; // ln(e^{-1})
    if g(hi) < 0.0 {
        return Err(Error::numerical(format!(
            "core-scale equation has no root in (0, e^-1) for delta = {delta}; choose a smaller delta"
        )));
    }
    // g -> -inf as ln s -> -inf; find a negative endpoint.
    let mut lo = delta.ln().min(-2.0);
    let mut tries = 0;
    while g(lo) >= 0.0 {
        lo *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::numerical("core-scale bracketing failed".to_string()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo).abs() <= 1e-14 * hi.abs() {
            break;
        }
    }
    let ln_s = 0.5 * (lo + hi);
    let s = ln_s.exp();
    let ratio = s / (delta * delta.ln().abs().powf((p - 1.0) / 2.0));
    Ok(CoreScale { delta, qhat, s_delta: s, ratio })
}

/// The entire-plane limit profile: `phi` inside the unit disk, the matched
/// logarithm `phi'(1) ln r` outside; C1 across r = 1.
pub struct ExtendedProfile<'a> {
    profile: &'a RadialProfile,
}

pub fn extended_profile(profile: &RadialProfile) -> ExtendedProfile<'_> {
    ExtendedProfile { profile }
}

impl ExtendedProfile<'_> {
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 1.0 {
            self.profile.eval(r)
        } else {
            self.profile.dphi1 * r.ln()
        }
    }

    pub fn eval_deriv(&self, r: f64) -> f64 {
        if r <= 1.0 {
            self.profile.eval_deriv(r)
        } else {
            self.profile.dphi1 / r
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Fixtures from an independent high-accuracy shooting oracle
    // (adaptive 8th-order integration at tol 1e-12).
    const ORACLE: [(f64, f64, f64); 3] = [
        (2.0, 8.534114771196, -7.897071013110),
        (3.0, 3.573900981927, -2.645123173349),
        (4.0, 2.683222989803, -1.659958603073),
    ];

    #[test]
    fn profile_matches_oracle_fixtures() {
        for &(p, a_ref, d_ref) in &ORACLE {
            let pr = compute_profile(p, 1e-12).unwrap();
            assert!(
                (pr.a - a_ref).abs() <= 1e-7 * a_ref,
                "p={p}: a={} vs oracle {}",
                pr.a,
                a_ref
            );
            assert!(
                (pr.dphi1 - d_ref).abs() <= 1e-7 * d_ref.abs(),
                "p={p}: phi'(1)={} vs oracle {}",
                pr.dphi1,
                d_ref
            );
        }
    }

    #[test]
    fn boundary_and_symmetry_enforced() {
        let pr = compute_profile(2.0, 1e-10).unwrap();
        assert_eq!(*pr.phi.last().unwrap(), 0.0);
        assert_eq!(pr.dphi[0], 0.0);
        assert!(pr.phi[..pr.phi.len() - 1].iter().all(|&v| v > 0.0));
        assert!(pr.dphi[1..].iter().all(|&v| v < 0.0));
    }

    #[test]
    fn ode_residual_small() {
        for p in [2.0, 3.0] {
            let pr = compute_profile(p, 1e-12).unwrap();
            let res = pr.ode_residual();
            assert!(res <= 1e-8 * pr.a, "p={p}: residual {res} vs {}", 1e-8 * pr.a);
        }
    }

    #[test]
    fn pohozaev_residuals() {
        for p in [2.0, 3.0, 4.0] {
            let pr = compute_profile(p, 1e-12).unwrap();
            let (r1, r2) = pohozaev_check(&pr);
            assert!(r1 <= 1e-6 && r2 <= 1e-6, "p={p}: res=({r1:.2e},{r2:.2e})");
        }
    }

    #[test]
    fn pohozaev_detects_perturbation() {
        // perturbing values by 1.01 breaks the identities at the 1e-2 level
        let mut pr = compute_profile(2.0, 1e-10).unwrap();
        for v in pr.phi.iter_mut() {
            *v *= 1.01;
        }
        let (r1, r2) = pohozaev_check(&pr);
        assert!(r2 > 5e-3, "res2 = {r2}");
        assert!(r1 > 5e-3, "res1 = {r1}");
    }

    #[test]
    fn quadrature_orders_agree() {
        // Simpson on full vs half sampling agree to 1e-8 relative.
        let pr = compute_profile(2.0, 1e-12).unwrap();
        let (ip_full, ip1_full) = pr.disk_integrals();
        let half: Vec<usize> = (0..pr.r.len()).step_by(2).collect();
        let r2: Vec<f64> = half.iter().map(|&i| pr.r[i]).collect();
        let p2: Vec<f64> = half.iter().map(|&i| pr.phi[i]).collect();
        let ip_half = super::simpson_radial(&r2, &p2, 2.0);
        let ip1_half = super::simpson_radial(&r2, &p2, 3.0);
        assert!((ip_full - ip_half).abs() / ip_full <= 1e-8);
        assert!((ip1_full - ip1_half).abs() / ip1_full <= 1e-8);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(compute_profile(1.0, 1e-10).is_err());
        assert!(compute_profile(0.5, 1e-10).is_err());
        assert!(compute_profile(2.0, 1e-2).is_err());
        assert!(compute_profile(2.0, 1e-13).is_err());
    }

    #[test]
    fn half_step_reproduces_boundary_slope() {
        // re-integration at half step reproduces phi'(1) within 1e-9
        let pr = compute_profile(2.0, 1e-12).unwrap();
        let run = |steps: usize| -> f64 {
            let h = 1.0 / steps as f64;
            let mut y = series_start(2.0, pr.a, h);
            let mut r = h;
            for _ in 1..steps {
                y = rk4_step(2.0, r, y, h);
                r += h;
            }
            y[1]
        };
        let d1 = run(4096);
        let d2 = run(8192);
        assert!((d1 - d2).abs() <= 1e-9 * d2.abs(), "{d1} vs {d2}");
    }

    #[test]
    fn core_scale_limit_and_monotonicity() {
        let pr = compute_profile(2.0, 1e-12).unwrap();
        let limit = pr.dphi1.abs().powf(0.5);
        let mut prev_gap = f64::INFINITY;
        let mut prev_s = f64::INFINITY;
        for &d in &[1e-3, 1e-4, 1e-5] {
            let cs = solve_core_scale(d, 1.0, &pr).unwrap();
            let gap = (cs.ratio - limit).abs() / limit;
            assert!(gap < prev_gap, "gap not decreasing at delta={d}");
            assert!(cs.s_delta < prev_s, "s_delta not shrinking with delta");
            prev_gap = gap;
            prev_s = cs.s_delta;
        }
        // residual of the matching equation at the root, relative
        let cs = solve_core_scale(1e-4, 1.0, &pr).unwrap();
        let e = 2.0 / (pr.p - 1.0);
        let lhs = cs.delta.powf(e) * cs.s_delta.powf(-e) * pr.dphi1;
        let rhs = 1.0 / cs.s_delta.ln();
        assert!((lhs - rhs).abs() <= 1e-11 * rhs.abs(), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn core_scale_monotone_in_parameters() {
        let pr = compute_profile(2.0, 1e-12).unwrap();
        let s1 = solve_core_scale(1e-4, 1.0, &pr).unwrap().s_delta;
        let s2 = solve_core_scale(1e-4, 2.0, &pr).unwrap().s_delta;
        assert!(s2 < s1); // doubling qhat shrinks the core
        let s3 = solve_core_scale(2e-4, 1.0, &pr).unwrap().s_delta;
        assert!(s3 > s1); // increasing delta grows it
    }

    #[test]
    fn core_scale_large_delta_fails() {
        let pr = compute_profile(2.0, 1e-12).unwrap();
        assert!(solve_core_scale(0.3, 1.0, &pr).is_err());
    }

    #[test]
    fn extended_profile_c1() {
        let pr = compute_profile(2.0, 1e-12).unwrap();
        let w = extended_profile(&pr);
        assert_eq!(w.eval(1.0), 0.0);
        let e = std::f64::consts::E;
        assert!((w.eval(e) - pr.dphi1).abs() < 1e-15);
        // derivative continuity at r = 1
        let dl = w.eval_deriv(1.0 - 1e-13);
        let dr = w.eval_deriv(1.0 + 1e-13);
        assert!((dl - dr).abs() <= 1e-10 * dr.abs(), "{dl} vs {dr}");
    }
}
