//! One-dimensional fractional heat kernel `P_s(x,t) = t^{−1/(2s)} F(|x| t^{−1/(2s)})`
//! with `F(r) = (1/π) ∫_0^∞ cos(rξ) e^{−ξ^{2s}} dξ`.
//!
//! The profile is tabulated together with its derivative (both by direct
//! Fourier quadrature) and interpolated with cubic Hermite polynomials.
//! Beyond the table it follows the algebraic tail
//! `c/(1+r²)^{(1+2s)/2}` with `c` matched at the last entry.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::{check_order, S_MIN};

pub const DEFAULT_R_MAX: f64 = 200.0;
pub const DEFAULT_DR: f64 = 0.02;

/// Largest frequency: `e^{−Ξ^{2s}} < 1e−16`.
fn xi_max(s: f64) -> f64 {
    (16.0 * 10f64.ln()).powf(1.0 / (2.0 * s))
}

/// `F(r)` and `F'(r)` by panel quadrature of the Fourier integrals.
///
/// Panels are uniform with width at most half a period of `cos(rξ)`, and
/// geometric toward ξ = 0 where `e^{−ξ^{2s}}` is not smooth.
pub fn fourier_profile(s: f64, r: f64) -> (f64, f64) {
    let (gx, gw) = gauss_legendre(16);
    let big = xi_max(s);
    let width = if r > 0.0 { (PI / r).min(0.25) } else { 0.25 };
    let mut f = 0.0;
    let mut fp = 0.0;
    let mut panel = |a: f64, b: f64| {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for (x, w) in gx.iter().zip(&gw) {
            let xi = mid + half * x;
            let damp = (-xi.powf(2.0 * s)).exp();
            let (sn, cs) = (r * xi).sin_cos();
            f += half * w * cs * damp;
            fp -= half * w * xi * sn * damp;
        }
    };
    let mut lo = width;
    for _ in 0..60 {
        panel(0.5 * lo, lo);
        lo *= 0.5;
    }
    let n = ((big - width) / width).ceil().max(1.0) as usize;
    let step = (big - width) / n as f64;
    for k in 0..n {
        let a = width + k as f64 * step;
        panel(a, a + step);
    }
    (f / PI, fp / PI)
}

/// Tabulated self-similar profile of the 1D fractional heat kernel.
#[derive(Clone, Debug, Serialize)]
pub struct Kernel1D {
    pub s: f64,
    pub r_max: f64,
    pub dr: f64,
    f: Vec<f64>,
    fp: Vec<f64>,
    /// Tail amplitude: `F(r) = tail_c/(1+r²)^{(1+2s)/2}` for `r > r_max`.
    pub tail_c: f64,
    /// Measured `(c₁, c₂)` of the two-sided algebraic bound.
    pub tail_constants: (f64, f64),
    /// `∫_{r_i}^∞ F` at each table radius.
    upper_mass: Vec<f64>,
}

/// Tabulates the profile. `s = 1/2` is accepted to validate the Fourier
/// inversion against the Cauchy kernel; the solver itself needs `s > 1/2`.
pub fn build_profile(s: f64, r_max: f64, dr: f64) -> Result<Kernel1D> {
    if s != S_MIN {
        check_order(s)?;
    }
    if !(dr > 0.0 && r_max > dr) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < dr < r_max, got dr = {dr}, r_max = {r_max}"
        )));
    }
    let n = (r_max / dr).round() as usize;
    let dr = r_max / n as f64;
    let pairs: Vec<(f64, f64)> = (0..=n)
        .into_par_iter()
        .map(|i| fourier_profile(s, i as f64 * dr))
        .collect();
    let (f, fp): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let floor = 1e-12 * f[0];
    if let Some(i) = f.iter().position(|v| *v < -floor) {
        return Err(Error::NegativeProfile {
            r: i as f64 * dr,
            value: f[i],
        });
    }
    let expo = (1.0 + 2.0 * s) / 2.0;
    let tail_c = f[n] * (1.0 + r_max * r_max).powf(expo);

    // Tail mass ∫_{r_max}^∞ c (1+r²)^{-expo} dr on geometric panels, with the
    // pure power law beyond 1e8·r_max.
    let (gx, gw) = gauss_legendre(8);
    let mut tail_mass = 0.0;
    let mut a = r_max;
    while a < 1e8 * r_max {
        let b = a * 1.25;
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for (x, w) in gx.iter().zip(&gw) {
            let r = mid + half * x;
            tail_mass += half * w * tail_c * (1.0 + r * r).powf(-expo);
        }
        a = b;
    }
    tail_mass += tail_c * a.powf(-2.0 * s) / (2.0 * s);

    let mut upper_mass = vec![0.0; n + 1];
    upper_mass[n] = tail_mass;
    for i in (0..n).rev() {
        upper_mass[i] = upper_mass[i + 1] + hermite_cell_integral(f[i], f[i + 1], fp[i], fp[i + 1], dr);
    }
    let mut k = Kernel1D {
        s,
        r_max,
        dr,
        f,
        fp,
        tail_c,
        tail_constants: (0.0, 0.0),
        upper_mass,
    };
    k.tail_constants = k.fit_bound_constants(&default_bound_times(), &default_bound_points());
    Ok(k)
}

/// `∫` of the cubic Hermite interpolant over one cell of width `h`.
fn hermite_cell_integral(f0: f64, f1: f64, d0: f64, d1: f64, h: f64) -> f64 {
    h * (f0 + f1) / 2.0 + h * h * (d0 - d1) / 12.0
}

fn default_bound_times() -> Vec<f64> {
    (0..=8).map(|k| 0.25 * 2f64.powf(k as f64 / 2.0)).collect()
}

fn default_bound_points() -> Vec<f64> {
    (0..=80).map(|k| 0.25 * k as f64).collect()
}

/// `t/(t^{1/s}+x²)^{(1+2s)/2}`.
pub fn algebraic_shape(x: f64, t: f64, s: f64) -> f64 {
    t / (t.powf(1.0 / s) + x * x).powf((1.0 + 2.0 * s) / 2.0)
}

impl Kernel1D {
    pub fn with_defaults(s: f64) -> Result<Self> {
        build_profile(s, DEFAULT_R_MAX, DEFAULT_DR)
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// `(r_i, F(r_i))` table rows.
    pub fn table(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.f.iter().enumerate().map(move |(i, v)| (i as f64 * self.dr, *v))
    }

    pub fn table_values(&self) -> &[f64] {
        &self.f
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.f.windows(2).all(|w| w[1] < w[0])
    }

    /// `F(r)` for any real `r` (even).
    pub fn profile(&self, r: f64) -> f64 {
        let r = r.abs();
        if r > self.r_max {
            return self.tail_c * (1.0 + r * r).powf(-(1.0 + 2.0 * self.s) / 2.0);
        }
        let x = r / self.dr;
        let i = (x.floor() as usize).min(self.f.len() - 2);
        let u = x - i as f64;
        let (h00, h10, h01, h11) = hermite_basis(u);
        h00 * self.f[i] + h10 * self.dr * self.fp[i] + h01 * self.f[i + 1] + h11 * self.dr * self.fp[i + 1]
    }

    /// `∫_ρ^∞ F(r) dr` for `ρ ≥ 0`.
    pub fn upper_profile_mass(&self, rho: f64) -> f64 {
        debug_assert!(rho >= 0.0);
        if rho >= self.r_max {
            let expo = (1.0 + 2.0 * self.s) / 2.0;
            let (gx, gw) = gauss_legendre(8);
            let mut acc = 0.0;
            let mut a = rho;
            let last = self.r_max.max(rho) * 1e8;
            while a < last {
                let b = a * 1.25;
                let (half, mid) = (0.5 * (b - a), 0.5 * (b + a));
                for (x, w) in gx.iter().zip(&gw) {
                    let r = mid + half * x;
                    acc += half * w * self.tail_c * (1.0 + r * r).powf(-expo);
                }
                a = b;
            }
            return acc + self.tail_c * a.powf(-2.0 * self.s) / (2.0 * self.s);
        }
        let x = rho / self.dr;
        let i = (x.floor() as usize).min(self.f.len() - 2);
        // ∫_{r_i}^{ρ} of the Hermite cubic by 4-point Gauss–Legendre (exact).
        let (gx, gw) = gauss_legendre(4);
        let a = i as f64 * self.dr;
        let half = 0.5 * (rho - a);
        let mid = 0.5 * (rho + a);
        let partial: f64 = gx.iter().zip(&gw).map(|(x, w)| half * w * self.profile(mid + half * x)).sum();
        self.upper_mass[i] - partial
    }

    /// `∫_{−∞}^{∞} F`.
    pub fn mass(&self) -> f64 {
        2.0 * self.upper_mass[0]
    }

    /// `P_s(x,t)`.
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("kernel time must be positive, got {t}")));
        }
        let scale = t.powf(-1.0 / (2.0 * self.s));
        Ok(scale * self.profile(x * scale))
    }

    /// `∫_a^∞ P_s(z,t) dz` for any real `a`.
    pub fn upper_mass(&self, a: f64, t: f64) -> f64 {
        let rho = a * t.powf(-1.0 / (2.0 * self.s));
        if rho >= 0.0 {
            self.upper_profile_mass(rho)
        } else {
            self.mass() - self.upper_profile_mass(-rho)
        }
    }

    /// Min and max of `P_s/(t/(t^{1/s}+x²)^{(1+2s)/2})` over a lattice.
    pub fn fit_bound_constants(&self, times: &[f64], xs: &[f64]) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for &t in times {
            for &x in xs {
                let p = self.eval(x, t).expect("positive lattice times");
                let r = p / algebraic_shape(x, t, self.s);
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        (lo, hi)
    }
}

fn hermite_basis(u: f64) -> (f64, f64, f64, f64) {
    let u2 = u * u;
    let u3 = u2 * u;
    (2.0 * u3 - 3.0 * u2 + 1.0, u3 - 2.0 * u2 + u, -2.0 * u3 + 3.0 * u2, u3 - u2)
}

/// A bounded 1D datum that equals `left` below `−support` and `right`
/// above `support`.
#[derive(Clone)]
pub struct Profile1D {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub support: f64,
    pub left: f64,
    pub right: f64,
}

impl std::fmt::Debug for Profile1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Profile1D")
            .field("support", &self.support)
            .field("left", &self.left)
            .field("right", &self.right)
            .finish()
    }
}

impl Profile1D {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, support: f64) -> Self {
        Self {
            f: Arc::new(f),
            support,
            left: 0.0,
            right: 0.0,
        }
    }

    pub fn with_limits(mut self, left: f64, right: f64) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.f)(y)
    }

    /// `∫ |f|` over the support (limits must be 0 for this to be the L¹ norm).
    pub fn l1_norm(&self) -> f64 {
        let (gx, gw) = gauss_legendre(8);
        let n = (2.0 * self.support / 0.05).ceil().max(1.0) as usize;
        let h = 2.0 * self.support / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            let a = -self.support + k as f64 * h;
            for (x, w) in gx.iter().zip(&gw) {
                acc += 0.5 * h * w * self.eval(a + 0.5 * h * (1.0 + x)).abs();
            }
        }
        acc
    }
}

/// `(P_s(·,t) ∗ U₀)(x)` at each `x`.
///
/// The core `[−support, support]` is split into panels no wider than the
/// data scale (0.1, growing linearly beyond |y| = 20) or the kernel scale
/// near `x`; outside the core the datum is replaced by its limits times the
/// kernel tail masses.
pub fn convolve(k: &Kernel1D, u0: &Profile1D, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("convolution time must be positive, got {t}")));
    }
    let sigma = t.powf(1.0 / (2.0 * k.s));
    let (gx, gw) = gauss_legendre(8);
    xs.par_iter()
        .map(|&x| {
            let l = u0.support;
            let mut acc = 0.0;
            let mut y = -l;
            while y < l {
                let data_w = if y.abs() <= 20.0 { 0.1 } else { 0.1 * y.abs() / 20.0 };
                let kern_w = (0.25 * sigma).max(0.1 * (y - x).abs());
                let b = (y + data_w.min(kern_w)).min(l);
                let half = 0.5 * (b - y);
                let mid = 0.5 * (b + y);
                for (g, w) in gx.iter().zip(&gw) {
                    let z = mid + half * g;
                    acc += half * w * k.eval(x - z, t)? * u0.eval(z);
                }
                y = b;
            }
            // y > L ⇔ x − y < x − L; y < −L ⇔ x − y > x + L.
            acc += u0.right * (k.mass() - k.upper_mass(x - l, t));
            acc += u0.left * k.upper_mass(x + l, t);
            Ok(acc)
        })
        .collect()
}

/// `v(x,t)/(‖v₀‖_{L¹} P_s(x,t))` extremes over a probe lattice.
pub fn harnack_constants(k: &Kernel1D, v0: &Profile1D, t_probe: &[f64], x_probe: &[f64]) -> Result<(f64, f64)> {
    let mass = v0.l1_norm();
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter("Harnack datum must not vanish".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &t in t_probe {
        let v = convolve(k, v0, t, x_probe)?;
        for (x, vx) in x_probe.iter().zip(v) {
            let r = vx / (mass * k.eval(*x, t)?);
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-positive Harnack ratio {r} at x = {x}, t = {t}"
                )));
            }
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok((lo, hi))
}

/// `∫ v(x,t) dx` for `v = P_s(·,t) ∗ u₀` with compactly supported `u₀`.
///
/// Integrates over `[−x_max, x_max]` on panels of width 0.1 that grow
/// geometrically past |x| = 20, then adds the far part as
/// `v(±x_max)/P_s(±x_max) · ∫_{|x|>x_max} P_s`.
pub fn output_mass(k: &Kernel1D, u0: &Profile1D, t: f64, x_max: f64) -> Result<f64> {
    let (gx, gw) = gauss_legendre(8);
    let mut edges = vec![0.0];
    let mut a: f64 = 0.0;
    while a < x_max {
        let w = if a < 20.0 { 0.1 } else { 0.1 * a / 20.0 };
        a = (a + w).min(x_max);
        edges.push(a);
    }
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for e in edges.windows(2) {
        let half = 0.5 * (e[1] - e[0]);
        let mid = 0.5 * (e[1] + e[0]);
        for (g, w) in gx.iter().zip(&gw) {
            for sign in [-1.0, 1.0] {
                xs.push(sign * (mid + half * g));
                ws.push(half * w);
            }
        }
    }
    xs.push(-x_max);
    xs.push(x_max);
    let v = convolve(k, u0, t, &xs)?;
    let n = ws.len();
    let core: f64 = v[..n].iter().zip(&ws).map(|(a, b)| a * b).sum();
    let far = k.upper_mass(x_max, t);
    let left = v[n] / k.eval(-x_max, t)?;
    let right = v[n + 1] / k.eval(x_max, t)?;
    Ok(core + (left + right) * far)
}

/// Largest relative mismatch between `∂ₜP_s` (central difference in t) and
/// `−(−∂²)ˢP_s(·,t)` (pair quadrature) over the probe lattice. The
/// denominator is floored at 1% of the lattice maximum of |∂ₜP_s| so sign
/// changes of `∂ₜP_s` do not blow up the ratio.
pub fn pde_residual(k: &Kernel1D, xs: &[f64], ts: &[f64]) -> Result<f64> {
    let mut rows = Vec::new();
    for &t in ts {
        let kk = k.clone();
        let field: crate::ScalarField = crate::field::AnalyticField::new(1, k.eval(0.0, t)?, move |x| {
            kk.eval(x[0], t).unwrap_or(f64::NAN)
        })
        .with_far_field(0.0)
        .into();
        let cut = 1e4 * t.powf(1.0 / (2.0 * k.s));
        let rule = crate::quad::QuadRule::new(crate::quad::PAIR_FLOOR * t.powf(1.0 / (2.0 * k.s)), cut)?;
        let h = 1e-4 * t;
        for &x in xs {
            let dt = (k.eval(x, t + h)? - k.eval(x, t - h)?) / (2.0 * h);
            let lap = crate::operator::frac_lap_1d(&field, x, k.s, &rule)?;
            rows.push((dt, lap));
        }
    }
    let scale = rows.iter().map(|(d, _)| d.abs()).fold(0.0, f64::max);
    Ok(rows
        .iter()
        .map(|(d, l)| (d - l).abs() / d.abs().max(1e-2 * scale))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;
    use std::sync::OnceLock;

    fn kernel() -> &'static Kernel1D {
        static K: OnceLock<Kernel1D> = OnceLock::new();
        K.get_or_init(|| Kernel1D::with_defaults(0.75).unwrap())
    }

    #[test]
    fn profile_at_origin_matches_gamma() {
        for (s, v) in [
            (0.75, 0.287_352_751_452_164_4),
            (0.6, 0.299_420_059_179_828_9),
            (0.9, 0.283_068_758_591_619_0),
        ] {
            let (f0, fp0) = fourier_profile(s, 0.0);
            assert!((f0 - v).abs() < 1e-12, "s = {s}: {f0}");
            assert!((f0 - gamma(1.0 + 1.0 / (2.0 * s)) / PI).abs() < 1e-12);
            assert_eq!(fp0, 0.0);
        }
    }

    #[test]
    fn cauchy_profile_at_one_half() {
        for r in [0.0, 0.3, 1.0, 2.5, 7.0, 30.0, 120.0] {
            let (f, fp) = fourier_profile(0.5, r);
            let exact = 1.0 / (PI * (1.0 + r * r));
            assert!((f - exact).abs() < 1e-6, "r = {r}: {f} vs {exact}");
            let dexact = -2.0 * r / (PI * (1.0 + r * r).powi(2));
            assert!((fp - dexact).abs() < 1e-6);
        }
    }

    #[test]
    fn table_is_positive_decreasing_unit_mass() {
        let k = kernel();
        assert!(k.is_strictly_decreasing());
        assert!(k.table_values().iter().all(|v| *v > 0.0));
        assert!((k.mass() - 1.0).abs() < 1e-6, "mass {}", k.mass());
    }

    #[test]
    fn scaling_and_evenness() {
        let k = kernel();
        for (x, t) in [(0.3f64, 0.5f64), (2.0, 3.0), (17.0, 0.25)] {
            let scale = t.powf(-1.0 / 1.5);
            let a = k.eval(x, t).unwrap();
            let b = scale * k.eval(x * scale, 1.0).unwrap();
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300) * 4.0);
            assert_eq!(k.eval(-x, t).unwrap(), a);
        }
        assert!(k.eval(1.0, 0.0).is_err());
    }

    #[test]
    fn tail_is_continuous_at_table_end() {
        let k = kernel();
        let inside = k.profile(k.r_max - 1e-9);
        let outside = k.profile(k.r_max + 1e-9);
        assert!((inside - outside).abs() < 1e-9 * inside);
    }

    #[test]
    fn two_sided_bound_constants_positive() {
        let (c1, c2) = kernel().tail_constants;
        assert!(c1 > 0.0 && c2 >= c1 && c2.is_finite());
    }

    #[test]
    fn constant_datum_is_preserved() {
        let u0 = Profile1D::new(|_| 1.0, 5.0).with_limits(1.0, 1.0);
        let v = convolve(kernel(), &u0, 0.7, &[-3.0, 0.0, 4.5, 30.0]).unwrap();
        for x in v {
            assert!((x - 1.0).abs() < 1e-6, "{x}");
        }
    }

    #[test]
    fn semigroup_property() {
        let k = kernel();
        let kk = k.clone();
        let u0 = Profile1D::new(move |y| kk.eval(y, 0.5).unwrap(), 2000.0);
        let xs = [0.0, 0.7, 2.0, 5.0];
        let v = convolve(k, &u0, 1.0, &xs).unwrap();
        for (x, vx) in xs.iter().zip(v) {
            let exact = k.eval(*x, 1.5).unwrap();
            assert!((vx - exact).abs() < 1e-6, "x = {x}: {vx} vs {exact}");
        }
    }

    #[test]
    fn bump_solution_even_and_decreasing() {
        let u0 = Profile1D::new(|y: f64| (-y * y / 4.0).exp(), 14.0);
        let xs: Vec<f64> = (0..20).map(|k| 0.5 * k as f64).collect();
        let v = convolve(kernel(), &u0, 0.5, &xs).unwrap();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        let vn = convolve(kernel(), &u0, 0.5, &neg).unwrap();
        for (a, b) in v.iter().zip(&vn) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn harnack_scale_invariance() {
        let k = kernel();
        let ts = [1.0, 2.0];
        let xs = [0.0, 1.0, 5.0, 15.0];
        let a = Profile1D::new(|y: f64| if y.abs() < 1.0 { (1.0 - 1.0 / (1.0 - y * y)).exp() } else { 0.0 }, 1.0);
        let b = Profile1D::new(|y: f64| 3.0 * if y.abs() < 1.0 { (1.0 - 1.0 / (1.0 - y * y)).exp() } else { 0.0 }, 1.0);
        let (a1, a2) = harnack_constants(k, &a, &ts, &xs).unwrap();
        let (b1, b2) = harnack_constants(k, &b, &ts, &xs).unwrap();
        assert!(a1 > 0.0 && a2 < f64::INFINITY && a1 <= a2);
        assert!((a1 - b1).abs() < 1e-12 * a1 && (a2 - b2).abs() < 1e-12 * a2);
    }

    #[test]
    fn convolution_conserves_mass() {
        let u0 = Profile1D::new(|y: f64| if y.abs() < 1.0 { 1.0 - y.abs() } else { 0.0 }, 1.0);
        let m = output_mass(kernel(), &u0, 1.0, 400.0).unwrap();
        assert!((m - 1.0).abs() < 1e-5, "mass {m}");
    }

    #[test]
    fn kernel_solves_the_heat_equation() {
        let r = pde_residual(kernel(), &[0.0, 0.5, 1.5, 4.0], &[0.5, 1.0]).unwrap();
        assert!(r < 1e-3, "residual {r}");
    }
}
