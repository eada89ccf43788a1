//! Pointwise evaluation of the truncated operator `L_ε`, the infinity
//! fractional Laplacian `Δ∞ˢ`, its bracketing operators `Δ∞^{s,±}` and the
//! 1D fractional Laplacian.
//!
//! All operators reduce to ray integrals against `dη/η^{1+2s}`. The sup and
//! inf over unit directions are searched over a fixed antipodal
//! [`DirectionSet`], augmented with `±∇φ(x)/|∇φ(x)|` when the gradient is
//! resolved.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::check_order;
use crate::error::{Error, Result};
use crate::field::{norm, ScalarField};
use crate::quad::{self, PairIntegral, QuadRule, RayNodes, PAIR_FLOOR};
use crate::special::gamma;

/// `C_s = 4^s s Γ(1/2+s) / (√π Γ(1−s))`.
pub fn cs_constant(s: f64) -> Result<f64> {
    check_order(s)?;
    Ok(4f64.powf(s) * s * gamma(0.5 + s) / (PI.sqrt() * gamma(1.0 - s)))
}

/// The constant `c(s)` with `|L_ε[φ]| ≤ c(s) ‖∇φ‖^{2−2s} ‖D²φ‖^{2s−1}`.
///
/// Each of the sup and inf parts is bounded by
/// `A r^{2−2s}/(2(2−2s)) + 2B r^{1−2s}/(2s−1)` with `A = ‖D²φ‖`,
/// `B = ‖∇φ‖`; the minimum sits at `r = 4B/A`.
pub fn uniform_bound_constant(s: f64) -> Result<f64> {
    let cs = cs_constant(s)?;
    let per_part = 4f64.powf(2.0 - 2.0 * s) / (2.0 * (2.0 - 2.0 * s))
        + 2.0 * 4f64.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0);
    Ok(2.0 * cs * per_part)
}

/// Unit directions, stored so that `vectors[i + len/2] = −vectors[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl DirectionSet {
    /// `n = 1`: `{+1, −1}`. `n = 2`: `count` equally spaced angles.
    /// `n = 3`: a Fibonacci lattice on the upper hemisphere and its mirror.
    pub fn new(dim: usize, count: usize) -> Result<Self> {
        let half: Vec<Vec<f64>> = match dim {
            1 => vec![vec![1.0]],
            2 | 3 if count < 2 || !count.is_multiple_of(2) => {
                return Err(Error::InvalidParameter(format!(
                    "direction count must be even and at least 2, got {count}"
                )))
            }
            2 => (0..count / 2)
                .map(|k| {
                    let th = PI * k as f64 / (count / 2) as f64;
                    // cos(π/2) is 6e-17, not 0; snap so axis-orthogonal rays stay exact.
                    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
                    vec![snap(th.cos()), snap(th.sin())]
                })
                .collect(),
            3 => {
                let m = count / 2;
                let golden = PI * (3.0 - 5f64.sqrt());
                (0..m)
                    .map(|k| {
                        let z = (k as f64 + 0.5) / m as f64;
                        let r = (1.0 - z * z).sqrt();
                        let phi = golden * k as f64;
                        vec![r * phi.cos(), r * phi.sin(), z]
                    })
                    .collect()
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "direction sets are implemented for n ≤ 3, got {dim}"
                )))
            }
        };
        let mut vectors = half.clone();
        vectors.extend(half.iter().map(|v| v.iter().map(|a| -a).collect::<Vec<_>>()));
        Ok(Self { dim, vectors })
    }

    pub fn default_count(dim: usize) -> usize {
        match dim {
            1 => 2,
            2 => 256,
            _ => 1024,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// The first half; the second half holds the antipodes.
    pub fn half(&self) -> &[Vec<f64>] {
        &self.vectors[..self.vectors.len() / 2]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    pub s: f64,
    pub eps: f64,
    pub cs: f64,
    pub dirs: DirectionSet,
    /// Rule for the ray integrals of `L_ε`; `quad.eps` equals `eps`.
    pub quad: QuadRule,
    pub grad_tol: f64,
    pub fd_h: f64,
    /// Inner floor η₀ of integrals that start at η = 0.
    pub pair_floor: f64,
}

impl OperatorConfig {
    /// Defaults for a problem of the given dimension on a domain of the
    /// given diameter.
    pub fn new(s: f64, eps: f64, dim: usize, diameter: f64) -> Result<Self> {
        let cfg = Self {
            s,
            eps,
            cs: cs_constant(s)?,
            dirs: DirectionSet::new(dim, DirectionSet::default_count(dim))?,
            quad: QuadRule::for_domain(eps, diameter)?,
            grad_tol: 1e-6,
            fd_h: 1e-5,
            pair_floor: PAIR_FLOOR,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_directions(mut self, count: usize) -> Result<Self> {
        self.dirs = DirectionSet::new(self.dirs.dim(), count)?;
        Ok(self)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        self.eps = eps;
        self.quad = self.quad.with_eps(eps)?;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dirs.dim()
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.s)?;
        self.quad.validate()?;
        if !(self.cs > 0.0) {
            return Err(Error::InvalidParameter(format!("C_s must be positive, got {}", self.cs)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {}", self.eps)));
        }
        if self.quad.eps != self.eps {
            return Err(Error::InvalidRule(format!(
                "quadrature cutoff {} differs from eps {}",
                self.quad.eps, self.eps
            )));
        }
        for (name, v) in [("grad_tol", self.grad_tol), ("fd_h", self.fd_h), ("pair_floor", self.pair_floor)] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Rule for integrals from η = 0.
    pub fn pair_rule(&self) -> QuadRule {
        QuadRule {
            eps: self.pair_floor,
            ..self.quad.clone()
        }
    }

    fn check_point(&self, field: &ScalarField, x: &[f64]) -> Result<()> {
        if field.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: field.dim(),
            });
        }
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// How `ifl` decides between the two branches of the operator.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum GradientHint {
    /// Finite-difference gradient compared against `grad_tol`.
    #[default]
    Auto,
    /// `∇φ(x) = 0` is known (e.g. by symmetry).
    Zero,
    /// `∇φ(x)` is known to be nonzero and parallel to this vector.
    Direction(Vec<f64>),
}

/// Detail of an `L_ε` evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct LepsEval {
    pub value: f64,
    pub sup: f64,
    pub inf: f64,
    pub arg_sup: Vec<f64>,
    pub arg_inf: Vec<f64>,
}

/// `ζ = ∇φ(x)/|∇φ(x)|` when `|∇φ(x)| > grad_tol`.
pub fn gradient_direction(field: &ScalarField, x: &[f64], cfg: &OperatorConfig) -> Result<Option<Vec<f64>>> {
    let g = field.gradient_fd(x, cfg.fd_h)?;
    let n = norm(&g);
    Ok((n > cfg.grad_tol).then(|| g.iter().map(|a| a / n).collect()))
}

fn unit(v: &[f64]) -> Result<Vec<f64>> {
    let n = norm(v);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter(format!("cannot normalise {v:?}")));
    }
    Ok(v.iter().map(|a| a / n).collect())
}

fn candidates(cfg: &OperatorConfig, zeta: Option<&[f64]>) -> Vec<Vec<f64>> {
    let mut c = cfg.dirs.vectors().to_vec();
    if let Some(z) = zeta {
        c.push(z.to_vec());
        c.push(z.iter().map(|a| -a).collect());
    }
    c
}

/// Index of the max and min, first index winning ties.
fn arg_extrema(values: &[f64]) -> (usize, usize) {
    let (mut imax, mut imin) = (0, 0);
    for (k, v) in values.iter().enumerate() {
        if *v > values[imax] {
            imax = k;
        }
        if *v < values[imin] {
            imin = k;
        }
    }
    (imax, imin)
}

fn ray_values(field: &ScalarField, x: &[f64], cands: &[Vec<f64>], cfg: &OperatorConfig) -> Result<Vec<f64>> {
    let phi_x = field.try_eval(x)?;
    let shared: Option<RayNodes> = (!field.has_breakpoints()).then(|| cfg.quad.ray_nodes(cfg.s));
    cands
        .iter()
        .map(|y| match &shared {
            Some(nodes) => quad::ray_with_nodes(field, x, y, phi_x, &cfg.quad, nodes),
            None => {
                let nodes = cfg.quad.nodes(cfg.s, cfg.eps, &field.breakpoints(x, y));
                quad::ray_with_nodes(field, x, y, phi_x, &cfg.quad, &nodes)
            }
        })
        .collect()
}

/// `L_ε[φ](x)` with the sup/inf pair and the optimising directions.
pub fn l_eps_detail(field: &ScalarField, x: &[f64], cfg: &OperatorConfig) -> Result<LepsEval> {
    cfg.check_point(field, x)?;
    let zeta = gradient_direction(field, x, cfg)?;
    let cands = candidates(cfg, zeta.as_deref());
    let vals = ray_values(field, x, &cands, cfg)?;
    let (imax, imin) = arg_extrema(&vals);
    Ok(LepsEval {
        value: cfg.cs * (vals[imax] + vals[imin]),
        sup: vals[imax],
        inf: vals[imin],
        arg_sup: cands[imax].clone(),
        arg_inf: cands[imin].clone(),
    })
}

/// `L_ε[φ](x) = C_s (max_y ∫_ε^∞ (φ(x+ηy) − φ(x)) + min_y ∫_ε^∞ (…))`.
pub fn l_eps(field: &ScalarField, x: &[f64], cfg: &OperatorConfig) -> Result<f64> {
    Ok(l_eps_detail(field, x, cfg)?.value)
}

/// The same operator written as
/// `C_s (sup ∫_ε^∞ φ(x+ηy) + inf ∫_ε^∞ φ(x+ηy) − φ(x)/(s ε^{2s}))`.
/// Used only to cross-check [`l_eps`]; it suffers cancellation for small ε.
pub fn l_eps_direct(field: &ScalarField, x: &[f64], cfg: &OperatorConfig) -> Result<f64> {
    cfg.check_point(field, x)?;
    let zeta = gradient_direction(field, x, cfg)?;
    let cands = candidates(cfg, zeta.as_deref());
    let mut vals = Vec::with_capacity(cands.len());
    for y in &cands {
        let nodes = cfg.quad.nodes(cfg.s, cfg.eps, &field.breakpoints(x, y));
        let body = quad::ray_sum(field, x, y, 0.0, &nodes);
        let limit = match cfg.quad.tail_mode {
            quad::TailMode::ZeroTail => 0.0,
            quad::TailMode::AnalyticConstantTail => field.ray_limit(x, y).ok_or(Error::TailMismatch)?,
        };
        vals.push(body + nodes.tail * limit);
    }
    let (imax, imin) = arg_extrema(&vals);
    let phi_x = field.try_eval(x)?;
    Ok(cfg.cs * (vals[imax] + vals[imin] - phi_x / (cfg.s * cfg.eps.powf(2.0 * cfg.s))))
}

/// Directions maximising and minimising the `L_ε` ray integral over the
/// direction set alone (no gradient candidates). Ties go to the lowest index.
pub fn direction_argopt(field: &ScalarField, x: &[f64], cfg: &OperatorConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.check_point(field, x)?;
    let cands = cfg.dirs.vectors();
    let vals = ray_values(field, x, cands, cfg)?;
    let (imax, imin) = arg_extrema(&vals);
    Ok((cands[imax].clone(), cands[imin].clone()))
}

fn pair(field: &ScalarField, x: &[f64], y: &[f64], cfg: &OperatorConfig) -> Result<PairIntegral> {
    quad::integrate_pair(field, x, y, cfg.s, &cfg.pair_rule())
}

/// Zero-gradient branch: `C_s (max_y A(y) + min_y A(y))` with
/// `A(y) = ∫_0^∞ (φ(x+ηy) − φ(x)) dη/η^{1+2s}`. The inf over `y` of
/// `A(−y)` equals the min of `A` because the set is antipodal.
fn zero_branch(field: &ScalarField, x: &[f64], cfg: &OperatorConfig) -> Result<f64> {
    let rule = cfg.pair_rule();
    let mut vals = Vec::with_capacity(cfg.dirs.len());
    for y in cfg.dirs.vectors() {
        vals.push(quad::integrate_one_sided(field, x, y, cfg.s, &rule)?.value);
    }
    let (imax, imin) = arg_extrema(&vals);
    Ok(cfg.cs * (vals[imax] + vals[imin]))
}

/// `Δ∞ˢφ(x)` with an explicit branch hint.
pub fn ifl_with_hint(field: &ScalarField, x: &[f64], cfg: &OperatorConfig, hint: &GradientHint) -> Result<f64> {
    cfg.check_point(field, x)?;
    let zeta = match hint {
        GradientHint::Auto => gradient_direction(field, x, cfg)?,
        GradientHint::Zero => None,
        GradientHint::Direction(v) => Some(unit(v)?),
    };
    match zeta {
        Some(z) => Ok(cfg.cs * pair(field, x, &z, cfg)?.value),
        None => match zero_branch(field, x, cfg) {
            Err(Error::NotC11 { y, .. }) if *hint == GradientHint::Auto => {
                // Misclassified slope: retry the pair form once.
                let g = field.gradient_fd(x, cfg.fd_h)?;
                let z = if norm(&g) > 0.0 { unit(&g)? } else { y };
                Ok(cfg.cs * pair(field, x, &z, cfg)?.value)
            }
            other => other,
        },
    }
}

/// `Δ∞ˢφ(x)`: the pair integral along `∇φ(x)/|∇φ(x)|` when the gradient is
/// resolved, otherwise the decoupled sup + inf of one-sided integrals.
pub fn ifl(field: &ScalarField, x: &[f64], cfg: &OperatorConfig) -> Result<f64> {
    ifl_with_hint(field, x, cfg, &GradientHint::Auto)
}

fn pair_values(field: &ScalarField, x: &[f64], cfg: &OperatorConfig, hint: &GradientHint) -> Result<Vec<f64>> {
    cfg.check_point(field, x)?;
    let zeta = match hint {
        GradientHint::Auto => gradient_direction(field, x, cfg)?,
        GradientHint::Zero => None,
        GradientHint::Direction(v) => Some(unit(v)?),
    };
    let mut vals = Vec::with_capacity(cfg.dirs.len() / 2 + 1);
    for y in cfg.dirs.half() {
        vals.push(cfg.cs * pair(field, x, y, cfg)?.value);
    }
    if let Some(z) = zeta {
        vals.push(cfg.cs * pair(field, x, &z, cfg)?.value);
    }
    Ok(vals)
}

/// `Δ∞^{s,+}φ(x)`: max over directions of `C_s` times the pair integral.
pub fn ifl_plus(field: &ScalarField, x: &[f64], cfg: &OperatorConfig) -> Result<f64> {
    ifl_plus_with_hint(field, x, cfg, &GradientHint::Auto)
}

/// `Δ∞^{s,−}φ(x)`: min over directions of `C_s` times the pair integral.
pub fn ifl_minus(field: &ScalarField, x: &[f64], cfg: &OperatorConfig) -> Result<f64> {
    ifl_minus_with_hint(field, x, cfg, &GradientHint::Auto)
}

pub fn ifl_plus_with_hint(field: &ScalarField, x: &[f64], cfg: &OperatorConfig, hint: &GradientHint) -> Result<f64> {
    let v = pair_values(field, x, cfg, hint)?;
    Ok(v.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

pub fn ifl_minus_with_hint(field: &ScalarField, x: &[f64], cfg: &OperatorConfig, hint: &GradientHint) -> Result<f64> {
    let v = pair_values(field, x, cfg, hint)?;
    Ok(v.into_iter().fold(f64::INFINITY, f64::min))
}

/// All three of `Δ∞^{s,−}`, `Δ∞ˢ`, `Δ∞^{s,+}` at one point, sharing the
/// gradient classification.
pub fn ifl_bracket(field: &ScalarField, x: &[f64], cfg: &OperatorConfig) -> Result<(f64, f64, f64)> {
    let hint = match gradient_direction(field, x, cfg)? {
        Some(z) => GradientHint::Direction(z),
        None => GradientHint::Zero,
    };
    let mid = ifl_with_hint(field, x, cfg, &hint)?;
    let v = pair_values(field, x, cfg, &hint)?;
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, mid, hi))
}

/// `−(−∂²)ˢΦ(r) = C_s ∫_0^∞ (Φ(r+η) + Φ(r−η) − 2Φ(r)) dη/η^{1+2s}` for a
/// one-dimensional profile; `rule.eps` is the inner floor.
pub fn frac_lap_1d(profile: &ScalarField, r: f64, s: f64, rule: &QuadRule) -> Result<f64> {
    if profile.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: profile.dim(),
        });
    }
    Ok(cs_constant(s)? * quad::integrate_pair(profile, &[r], &[1.0], s, rule)?.value)
}
