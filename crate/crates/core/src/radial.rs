//! Radial and one-dimensional lifts between profiles on ℝ and fields on ℝⁿ,
//! and the classical radial solution built from the 1D heat kernel.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{AnalyticField, FieldFlags, ScalarField};
use crate::heat1d::{convolve, Kernel1D, Profile1D};
use crate::operator::{frac_lap_1d, ifl_with_hint, GradientHint, OperatorConfig};

/// `Φ` on `[0, ∞)`, evaluated through its even extension.
#[derive(Clone)]
pub struct RadialProfile {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub nonincreasing: bool,
    /// `Φ(r) = limit` for `r ≥ support`.
    pub support: f64,
    pub limit: f64,
    pub bound: f64,
    /// Radii where `Φ` jumps or kinks.
    pub breaks: Vec<f64>,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("nonincreasing", &self.nonincreasing)
            .field("support", &self.support)
            .field("limit", &self.limit)
            .field("breaks", &self.breaks)
            .finish()
    }
}

impl RadialProfile {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, support: f64, limit: f64, bound: f64) -> Self {
        Self {
            f: Arc::new(f),
            nonincreasing: false,
            support,
            limit,
            bound,
            breaks: Vec::new(),
        }
    }

    pub fn nonincreasing(mut self) -> Self {
        self.nonincreasing = true;
        self
    }

    pub fn with_breaks(mut self, radii: Vec<f64>) -> Self {
        self.breaks = radii;
        self
    }

    /// `Φ(|r|)`.
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r.abs())
    }

    /// Samples `[0, support]` and reports whether the values never increase.
    pub fn spot_check_nonincreasing(&self, samples: usize) -> bool {
        let n = samples.max(2);
        let h = self.support / (n - 1) as f64;
        (1..n).all(|k| self.eval(k as f64 * h) <= self.eval((k - 1) as f64 * h))
    }

    /// The even extension as a [`Profile1D`] for convolution.
    pub fn even_extension(&self) -> Profile1D {
        let p = self.clone();
        Profile1D::new(move |y| p.eval(y), self.support).with_limits(self.limit, self.limit)
    }

    /// The even extension as a one-dimensional field.
    pub fn even_field(&self) -> ScalarField {
        let p = self.clone();
        let radii = self.breaks.clone();
        AnalyticField::new(1, self.bound, move |x| p.eval(x[0]))
            .with_far_field(self.limit)
            .with_breakpoints(move |x, y| sphere_crossings(x, y, &radii))
            .with_flags(FieldFlags {
                radial: true,
                radially_nonincreasing: self.nonincreasing,
                profile_1d: true,
            })
            .into()
    }
}

/// Positive `η` with `|x + ηy| = ρ` for each `ρ` in `radii` (unit `y`).
pub fn sphere_crossings(x: &[f64], y: &[f64], radii: &[f64]) -> Vec<f64> {
    let b: f64 = x.iter().zip(y).map(|(a, c)| a * c).sum();
    let xx: f64 = x.iter().map(|a| a * a).sum();
    let mut out = Vec::new();
    for rho in radii {
        let disc = b * b - (xx - rho * rho);
        if disc < 0.0 {
            continue;
        }
        let root = disc.sqrt();
        for eta in [-b - root, -b + root] {
            if eta > 0.0 {
                out.push(eta);
            }
        }
    }
    out
}

/// `x ↦ Φ(|x|)` on ℝⁿ.
pub fn lift_radial(p: &RadialProfile, dim: usize) -> ScalarField {
    let q = p.clone();
    let radii = p.breaks.clone();
    let field = AnalyticField::new(dim, p.bound, move |x| q.eval(crate::field::norm(x)))
        .with_far_field(p.limit)
        .with_flags(FieldFlags {
            radial: true,
            radially_nonincreasing: p.nonincreasing,
            profile_1d: dim == 1,
        });
    if radii.is_empty() {
        field.into()
    } else {
        field
            .with_breakpoints(move |x, y| sphere_crossings(x, y, &radii))
            .into()
    }
}

/// `x ↦ Φ(x₁)` on ℝⁿ. Along a ray the far value is the limit of `Φ` in the
/// direction of `y₁`; rays orthogonal to `e₁` keep `Φ(x₁)`.
pub fn lift_profile_x1(profile: &Profile1D, dim: usize, bound: f64, breaks: Vec<f64>) -> ScalarField {
    let f = profile.f.clone();
    let (left, right) = (profile.left, profile.right);
    let g = profile.f.clone();
    let mut field = AnalyticField::new(dim, bound, move |x| f(x[0]))
        .with_ray_limit(move |x, y| {
            if y[0] > 0.0 {
                right
            } else if y[0] < 0.0 {
                left
            } else {
                g(x[0])
            }
        })
        .with_flags(FieldFlags {
            radial: dim == 1 && left == right,
            radially_nonincreasing: false,
            profile_1d: true,
        });
    if left == right {
        field = field.with_far_field(left);
    }
    if !breaks.is_empty() {
        field = field.with_breakpoints(move |x, y| {
            if y[0] == 0.0 {
                return Vec::new();
            }
            breaks
                .iter()
                .map(|b| (b - x[0]) / y[0])
                .filter(|eta| *eta > 0.0)
                .collect()
        });
    }
    field.into()
}

/// Radial table of `v(r,t) = (P_s(·,t) ∗ Φ_even)(r)` with four-point cubic
/// interpolation; radii past the table are convolved on demand.
#[derive(Clone)]
struct RadialTable {
    dr: f64,
    values: Vec<f64>,
    kernel: Arc<Kernel1D>,
    datum: Profile1D,
    t: f64,
}

impl RadialTable {
    fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        let x = r / self.dr;
        let i = x.floor() as usize;
        if i + 2 >= self.values.len() {
            return convolve(&self.kernel, &self.datum, self.t, &[r])
                .map(|v| v[0])
                .unwrap_or(f64::NAN);
        }
        let u = x - i as f64;
        // Indices i−1..i+2; the table is even about r = 0.
        let at = |k: i64| self.values[k.unsigned_abs() as usize];
        let k = i as i64;
        let (p0, p1, p2, p3) = (at(k - 1), at(k), at(k + 1), at(k + 2));
        let w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        w0 * p0 + w1 * p1 + w2 * p2 + w3 * p3
    }
}

pub const SOLUTION_TABLE_DR: f64 = 0.01;
pub const SOLUTION_TABLE_MARGIN: f64 = 10.0;

/// The classical radial solution `u(x,t) = (P_s(·,t) ∗ Φ_even)(|x|)`.
pub fn classical_solution(p: &RadialProfile, k: &Kernel1D, t: f64, dim: usize) -> Result<ScalarField> {
    if !p.nonincreasing {
        return Err(Error::InvalidParameter(
            "classical radial solution needs a nonincreasing profile".into(),
        ));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(lift_radial(p, dim));
    }
    let datum = p.even_extension();
    let r_end = p.support + SOLUTION_TABLE_MARGIN;
    let n = (r_end / SOLUTION_TABLE_DR).ceil() as usize + 3;
    let radii: Vec<f64> = (0..n).map(|i| i as f64 * SOLUTION_TABLE_DR).collect();
    let values = convolve(k, &datum, t, &radii)?;
    let table = RadialTable {
        dr: SOLUTION_TABLE_DR,
        values,
        kernel: Arc::new(k.clone()),
        datum,
        t,
    };
    Ok(AnalyticField::new(dim, p.bound, move |x| table.eval(crate::field::norm(x)))
        .with_far_field(p.limit)
        .with_flags(FieldFlags {
            radial: true,
            radially_nonincreasing: true,
            profile_1d: dim == 1,
        })
        .into())
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionRow {
    pub x: Vec<f64>,
    pub ifl: f64,
    pub one_d: f64,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub rows: Vec<ReductionRow>,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares `Δ∞ˢφ(x)` with `−(−∂²)ˢΦ(|x|)` at each probe, where `Φ` is the
/// restriction of the radial field to the `e₁` axis. Probes at the origin
/// use the zero-gradient branch directly.
pub fn check_reduction(field: &ScalarField, probes: &[Vec<f64>], cfg: &OperatorConfig, tolerance: f64) -> Result<ReductionReport> {
    let dim = field.dim();
    let axis = move |r: f64| {
        let mut x = vec![0.0; dim];
        x[0] = r;
        x
    };
    let profile = {
        let g = field.clone();
        let h = field.clone();
        let mut a = AnalyticField::new(1, field.bound(), move |x| g.eval(&axis(x[0])));
        if let Some(c) = field.far_field() {
            a = a.with_far_field(c);
        }
        if field.has_breakpoints() {
            a = a.with_breakpoints(move |x, y| {
                let mut xe = vec![0.0; dim];
                xe[0] = x[0];
                let mut ye = vec![0.0; dim];
                ye[0] = y[0];
                h.breakpoints(&xe, &ye)
            });
        }
        ScalarField::from(a)
    };
    let rule = cfg.pair_rule();
    let rows = probes
        .par_iter()
        .map(|x| {
            let r = crate::field::norm(x);
            let hint = if r == 0.0 { GradientHint::Zero } else { GradientHint::Auto };
            let lhs = ifl_with_hint(field, x, cfg, &hint)?;
            let rhs = frac_lap_1d(&profile, r, cfg.s, &rule)?;
            Ok(ReductionRow {
                x: x.clone(),
                ifl: lhs,
                one_d: rhs,
                discrepancy: (lhs - rhs).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_discrepancy = rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    Ok(ReductionReport {
        rows,
        max_discrepancy,
        tolerance,
        pass: max_discrepancy <= tolerance,
    })
}
