//! Bounded scalar fields on ℝⁿ.
//!
//! A field is either an analytic rule or a grid-sampled table with a
//! far-field extension policy. Sampled fields interpolate multilinearly,
//! which keeps interpolation monotone in the node values.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pointwise rule `x ↦ φ(x)`.
pub type Rule = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Jump locations `η > 0` of `η ↦ φ(x + η y)` for a given `(x, y)`.
pub type BreakRule = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// Limit of `η ↦ φ(x + ηy)` as `η → ∞`, for a given `(x, y)`.
pub type LimitRule = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Upper bound on the number of nodes of a single grid.
pub const MAX_GRID_NODES: usize = 1 << 26;

/// Positions closer than this (in cell units) to a node snap onto it.
const NODE_SNAP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldFlags {
    pub radial: bool,
    pub radially_nonincreasing: bool,
    pub profile_1d: bool,
}

/// Uniform tensor grid. Nodes are stored row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    lo: Vec<f64>,
    hi: Vec<f64>,
    counts: Vec<usize>,
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let dim = lo.len();
        if dim == 0 || hi.len() != dim || counts.len() != dim {
            return Err(Error::InvalidGrid(
                "lo, hi and counts must have the same nonzero length".into(),
            ));
        }
        for a in 0..dim {
            if !(lo[a].is_finite() && hi[a].is_finite() && lo[a] < hi[a]) {
                return Err(Error::InvalidGrid(format!(
                    "axis {a}: need lo < hi, got [{}, {}]",
                    lo[a], hi[a]
                )));
            }
            if counts[a] < 2 {
                return Err(Error::InvalidGrid(format!(
                    "axis {a}: need at least 2 nodes, got {}",
                    counts[a]
                )));
            }
        }
        let total = counts
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m))
            .filter(|&n| n <= MAX_GRID_NODES)
            .ok_or_else(|| Error::InvalidGrid(format!("too many nodes: {counts:?}")))?;
        debug_assert!(total >= 2);
        Ok(Self { lo, hi, counts })
    }

    /// Same extent `[lo, hi]` and node count `m` on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64, m: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim], vec![m; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.counts[axis] - 1) as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| self.spacing(a)).collect()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l) * (h - l))
            .sum::<f64>()
            .sqrt()
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.counts[a + 1];
        }
        strides
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.counts[a];
            flat /= self.counts[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.counts)
            .fold(0, |acc, (&i, &m)| acc * m + i)
    }

    pub fn node(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(a, &i)| self.lo[a] + i as f64 * self.spacing(a))
            .collect()
    }

    pub fn node_flat(&self, flat: usize) -> Vec<f64> {
        self.node(&self.multi_index(flat))
    }

    /// Grid moved by `-y`, so that sampling the moved grid with the same
    /// values represents `x ↦ φ(x + y)`.
    pub fn shifted(&self, y: &[f64]) -> Self {
        Self {
            lo: self.lo.iter().zip(y).map(|(l, d)| l - d).collect(),
            hi: self.hi.iter().zip(y).map(|(h, d)| h - d).collect(),
            counts: self.counts.clone(),
        }
    }

    /// Same spacing and counts scaled by `factor` around the origin; node
    /// counts grow so the spacing is preserved.
    pub fn enlarged(&self, factor: usize) -> Result<Self> {
        let dim = self.dim();
        let mut lo = Vec::with_capacity(dim);
        let mut hi = Vec::with_capacity(dim);
        let mut counts = Vec::with_capacity(dim);
        for a in 0..dim {
            let cells = self.counts[a] - 1;
            let h = self.spacing(a);
            let extra = cells * (factor - 1);
            let left = extra / 2;
            let right = extra - left;
            lo.push(self.lo[a] - left as f64 * h);
            hi.push(self.hi[a] + right as f64 * h);
            counts.push(self.counts[a] + extra);
        }
        Self::new(lo, hi, counts)
    }
}

/// How a sampled field is continued outside its grid box.
#[derive(Clone)]
pub enum ExtensionPolicy {
    ConstantFarField(f64),
    ClampToNearestBoundaryValue,
    AnalyticTail(Rule),
}

impl fmt::Debug for ExtensionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ConstantFarField(c) => write!(f, "ConstantFarField({c})"),
            Self::ClampToNearestBoundaryValue => f.write_str("ClampToNearestBoundaryValue"),
            Self::AnalyticTail(_) => f.write_str("AnalyticTail(..)"),
        }
    }
}

#[derive(Clone)]
pub struct AnalyticField {
    dim: usize,
    rule: Rule,
    bound: f64,
    flags: FieldFlags,
    far_field: Option<f64>,
    ray_limit: Option<LimitRule>,
    breaks: Option<BreakRule>,
}

impl AnalyticField {
    pub fn new(dim: usize, bound: f64, rule: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            rule: Arc::new(rule),
            bound,
            flags: FieldFlags::default(),
            far_field: None,
            ray_limit: None,
            breaks: None,
        }
    }

    pub fn with_flags(mut self, flags: FieldFlags) -> Self {
        self.flags = flags;
        self
    }

    /// Declares that `φ(x) → c` as `|x| → ∞` and that `φ ≡ c` beyond the
    /// quadrature cut-off, so ray tails can be integrated in closed form.
    pub fn with_far_field(mut self, c: f64) -> Self {
        self.far_field = Some(c);
        self
    }

    /// Declares a direction-dependent limit along rays, for fields such as
    /// `tanh(x₁)` whose value at infinity depends on the direction. The
    /// field must equal that limit beyond the quadrature cut-off.
    pub fn with_ray_limit(
        mut self,
        limit: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.ray_limit = Some(Arc::new(limit));
        self
    }

    pub fn with_breakpoints(
        mut self,
        breaks: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.breaks = Some(Arc::new(breaks));
        self
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }
}

#[derive(Clone)]
pub struct SampledField {
    spec: GridSpec,
    values: Arc<[f64]>,
    ext: ExtensionPolicy,
}

impl fmt::Debug for SampledField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledField")
            .field("spec", &self.spec)
            .field("ext", &self.ext)
            .finish_non_exhaustive()
    }
}

impl SampledField {
    pub fn new(spec: GridSpec, values: Vec<f64>, ext: ExtensionPolicy) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                spec.len()
            )));
        }
        Ok(Self {
            spec,
            values: values.into(),
            ext,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extension(&self) -> &ExtensionPolicy {
        &self.ext
    }

    pub fn sup_norm(&self) -> f64 {
        let inner = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        match self.ext {
            ExtensionPolicy::ConstantFarField(c) => inner.max(c.abs()),
            _ => inner,
        }
    }

    /// Value at a lattice index that may lie outside the box. Only exact for
    /// constant and clamped extensions; analytic tails are evaluated at the
    /// lattice point.
    pub fn lattice_value(&self, idx: &[i64]) -> f64 {
        let counts = self.spec.counts();
        let inside = idx
            .iter()
            .zip(counts)
            .all(|(&i, &m)| i >= 0 && (i as usize) < m);
        if inside {
            let flat = idx
                .iter()
                .zip(counts)
                .fold(0usize, |acc, (&i, &m)| acc * m + i as usize);
            return self.values[flat];
        }
        match &self.ext {
            ExtensionPolicy::ConstantFarField(c) => *c,
            ExtensionPolicy::ClampToNearestBoundaryValue => {
                let clamped: Vec<usize> = idx
                    .iter()
                    .zip(counts)
                    .map(|(&i, &m)| i.clamp(0, m as i64 - 1) as usize)
                    .collect();
                self.values[self.spec.flat_index(&clamped)]
            }
            ExtensionPolicy::AnalyticTail(rule) => {
                let x: Vec<f64> = idx
                    .iter()
                    .enumerate()
                    .map(|(a, &i)| self.spec.lo[a] + i as f64 * self.spec.spacing(a))
                    .collect();
                rule(&x)
            }
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let dim = self.spec.dim();
        let mut pos = [0.0f64; 8];
        let mut big;
        let pos: &mut [f64] = if dim <= 8 {
            &mut pos[..dim]
        } else {
            big = vec![0.0; dim];
            &mut big
        };
        let mut inside = true;
        for a in 0..dim {
            let mut p = (x[a] - self.spec.lo[a]) / self.spec.spacing(a);
            let r = p.round();
            if (p - r).abs() < NODE_SNAP {
                p = r;
            }
            let top = (self.spec.counts[a] - 1) as f64;
            if !(0.0..=top).contains(&p) {
                inside = false;
            }
            pos[a] = p;
        }
        if !inside {
            match &self.ext {
                ExtensionPolicy::ConstantFarField(c) => return *c,
                ExtensionPolicy::AnalyticTail(rule) => return rule(x),
                ExtensionPolicy::ClampToNearestBoundaryValue => {
                    for a in 0..dim {
                        let top = (self.spec.counts[a] - 1) as f64;
                        pos[a] = pos[a].clamp(0.0, top);
                    }
                }
            }
        }
        self.interpolate(pos)
    }

    /// Multilinear interpolation at fractional grid coordinates inside the box.
    fn interpolate(&self, pos: &[f64]) -> f64 {
        let dim = pos.len();
        let counts = &self.spec.counts;
        let mut base = 0usize;
        let mut stride = 1usize;
        let mut strides = [0usize; 8];
        let mut fracs = [0.0f64; 8];
        debug_assert!(dim <= 8, "interpolation supports up to 8 dimensions");
        for a in (0..dim).rev() {
            let m = counts[a];
            let mut i = pos[a].floor() as usize;
            if i >= m - 1 {
                i = m - 2;
            }
            fracs[a] = pos[a] - i as f64;
            base += i * stride;
            strides[a] = stride;
            stride *= m;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << dim) {
            let mut w = 1.0;
            let mut off = 0usize;
            for a in 0..dim {
                if corner & (1 << a) != 0 {
                    w *= fracs[a];
                    off += strides[a];
                } else {
                    w *= 1.0 - fracs[a];
                }
            }
            if w != 0.0 {
                acc += w * self.values[base + off];
            }
        }
        acc
    }
}

/// A bounded scalar field on ℝⁿ.
#[derive(Clone)]
pub enum ScalarField {
    Analytic(AnalyticField),
    Sampled(SampledField),
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Analytic(a) => f
                .debug_struct("Analytic")
                .field("dim", &a.dim)
                .field("bound", &a.bound)
                .field("flags", &a.flags)
                .field("far_field", &a.far_field)
                .finish(),
            Self::Sampled(s) => f
                .debug_struct("Sampled")
                .field("spec", &s.spec)
                .field("ext", &s.ext)
                .finish(),
        }
    }
}

impl From<AnalyticField> for ScalarField {
    fn from(a: AnalyticField) -> Self {
        Self::Analytic(a)
    }
}

impl From<SampledField> for ScalarField {
    fn from(s: SampledField) -> Self {
        Self::Sampled(s)
    }
}

impl ScalarField {
    pub fn analytic(
        dim: usize,
        bound: f64,
        rule: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> AnalyticField {
        AnalyticField::new(dim, bound, rule)
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        AnalyticField::new(dim, c.abs(), move |_| c)
            .with_far_field(c)
            .with_flags(FieldFlags {
                radial: true,
                radially_nonincreasing: true,
                profile_1d: true,
            })
            .into()
    }

    pub fn sampled(spec: GridSpec, values: Vec<f64>, ext: ExtensionPolicy) -> Result<Self> {
        Ok(Self::Sampled(SampledField::new(spec, values, ext)?))
    }

    /// Samples `f` at the nodes of `spec`.
    pub fn sample(f: &ScalarField, spec: GridSpec, ext: ExtensionPolicy) -> Result<Self> {
        if f.dim() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                got: f.dim(),
            });
        }
        let values = (0..spec.len()).map(|k| f.eval(&spec.node_flat(k))).collect();
        Self::sampled(spec, values, ext)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Analytic(a) => a.dim,
            Self::Sampled(s) => s.spec.dim(),
        }
    }

    /// Declared sup-norm bound (sampled fields report their exact sup norm).
    pub fn bound(&self) -> f64 {
        match self {
            Self::Analytic(a) => a.bound,
            Self::Sampled(s) => s.sup_norm(),
        }
    }

    pub fn flags(&self) -> FieldFlags {
        match self {
            Self::Analytic(a) => a.flags,
            Self::Sampled(_) => FieldFlags::default(),
        }
    }

    /// Constant limit at infinity, when the field has one.
    pub fn far_field(&self) -> Option<f64> {
        match self {
            Self::Analytic(a) => a.far_field,
            Self::Sampled(s) => match s.ext {
                ExtensionPolicy::ConstantFarField(c) => Some(c),
                _ => None,
            },
        }
    }

    /// Limit of `φ(x + ηy)` as `η → ∞`, if the field declares one.
    pub fn ray_limit(&self, x: &[f64], y: &[f64]) -> Option<f64> {
        match self {
            Self::Analytic(AnalyticField {
                ray_limit: Some(l), ..
            }) => Some(l(x, y)),
            _ => self.far_field(),
        }
    }

    pub fn as_sampled(&self) -> Option<&SampledField> {
        match self {
            Self::Sampled(s) => Some(s),
            Self::Analytic(_) => None,
        }
    }

    /// Evaluation without validation.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Analytic(a) => (a.rule)(x),
            Self::Sampled(s) => s.eval(x),
        }
    }

    /// Evaluation that rejects non-finite input or output. With debug
    /// assertions on, the declared bound is also enforced.
    pub fn try_eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                x: x.to_vec(),
                value: f64::NAN,
            });
        }
        let value = self.eval(x);
        if !value.is_finite() {
            return Err(Error::NonFinite {
                x: x.to_vec(),
                value,
            });
        }
        if cfg!(debug_assertions) {
            self.check_value_bound(x, value)?;
        }
        Ok(value)
    }

    fn check_value_bound(&self, x: &[f64], value: f64) -> Result<()> {
        let bound = self.bound();
        if value.abs() > bound * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::BoundExceeded {
                x: x.to_vec(),
                value,
                bound,
            });
        }
        Ok(())
    }

    /// Jump locations of `η ↦ φ(x + ηy)`, for fields that declare them.
    pub fn breakpoints(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        match self {
            Self::Analytic(AnalyticField {
                breaks: Some(b), ..
            }) => b(x, y),
            _ => Vec::new(),
        }
    }

    pub fn has_breakpoints(&self) -> bool {
        matches!(self, Self::Analytic(AnalyticField { breaks: Some(_), .. }))
    }

    /// Central-difference gradient with step `h` on every axis.
    pub fn gradient_fd(&self, x: &[f64], h: f64) -> Result<Vec<f64>> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "finite-difference step must be positive, got {h}"
            )));
        }
        let mut probe = x.to_vec();
        let mut grad = vec![0.0; x.len()];
        for a in 0..x.len() {
            probe[a] = x[a] + h;
            let fp = self.try_eval(&probe)?;
            probe[a] = x[a] - h;
            let fm = self.try_eval(&probe)?;
            probe[a] = x[a];
            grad[a] = (fp - fm) / (2.0 * h);
        }
        Ok(grad)
    }

    /// The field `x ↦ φ(x + y)`.
    pub fn translate(&self, y: &[f64]) -> ScalarField {
        let y: Vec<f64> = y.to_vec();
        let moved = y.iter().any(|v| *v != 0.0);
        match self {
            Self::Analytic(a) => {
                let rule = a.rule.clone();
                let yr = y.clone();
                let shifted_rule: Rule = Arc::new(move |x: &[f64]| {
                    let z: Vec<f64> = x.iter().zip(&yr).map(|(p, d)| p + d).collect();
                    rule(&z)
                });
                let breaks = a.breaks.clone().map(|b| {
                    let yb = y.clone();
                    Arc::new(move |x: &[f64], d: &[f64]| {
                        let z: Vec<f64> = x.iter().zip(&yb).map(|(p, q)| p + q).collect();
                        b(&z, d)
                    }) as BreakRule
                });
                let mut flags = a.flags;
                if moved {
                    flags.radial = false;
                    flags.radially_nonincreasing = false;
                }
                Self::Analytic(AnalyticField {
                    dim: a.dim,
                    rule: shifted_rule,
                    bound: a.bound,
                    flags,
                    far_field: a.far_field,
                    ray_limit: a.ray_limit.clone().map(|l| {
                        let yl = y.clone();
                        Arc::new(move |x: &[f64], d: &[f64]| {
                            let z: Vec<f64> = x.iter().zip(&yl).map(|(p, q)| p + q).collect();
                            l(&z, d)
                        }) as LimitRule
                    }),
                    breaks,
                })
            }
            Self::Sampled(s) => {
                let ext = match &s.ext {
                    ExtensionPolicy::AnalyticTail(rule) => {
                        let rule = rule.clone();
                        let yr = y.clone();
                        ExtensionPolicy::AnalyticTail(Arc::new(move |x: &[f64]| {
                            let z: Vec<f64> = x.iter().zip(&yr).map(|(p, d)| p + d).collect();
                            rule(&z)
                        }))
                    }
                    other => other.clone(),
                };
                Self::Sampled(SampledField {
                    spec: s.spec.shifted(&y),
                    values: s.values.clone(),
                    ext,
                })
            }
        }
    }

    /// Sampling-based checks of the declared bound and flags. Boundedness on
    /// ℝⁿ is not decidable, so this only catches rule bugs.
    pub fn spot_check(&self, samples: usize, radius: f64, seed: u64) -> Result<()> {
        let dim = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flags = self.flags();
        for _ in 0..samples {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..radius)).collect();
            let v = self.try_eval(&x)?;
            self.check_value_bound(&x, v)?;
            if flags.radial || flags.radially_nonincreasing {
                let r = norm(&x);
                let dir = random_unit(dim, &mut rng);
                let rotated: Vec<f64> = dir.iter().map(|d| d * r).collect();
                let w = self.try_eval(&rotated)?;
                if flags.radial && (v - w).abs() > 1e-9 * (1.0 + v.abs()) {
                    return Err(Error::InvalidParameter(format!(
                        "field flagged radial but φ({x:?}) = {v} ≠ φ({rotated:?}) = {w}"
                    )));
                }
                if flags.radially_nonincreasing {
                    let farther: Vec<f64> = dir.iter().map(|d| d * (r + rng.gen_range(0.0..1.0))).collect();
                    let u = self.try_eval(&farther)?;
                    if u > w + 1e-12 * (1.0 + w.abs()) {
                        return Err(Error::InvalidParameter(format!(
                            "field flagged radially nonincreasing but increases from {w} to {u}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn random_unit(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.iter().map(|a| a / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line_01() -> ScalarField {
        let spec = GridSpec::new(vec![0.0], vec![1.0], vec![2]).unwrap();
        ScalarField::sampled(spec, vec![0.0, 1.0], ExtensionPolicy::ConstantFarField(0.0)).unwrap()
    }

    #[test]
    fn constant_field_evaluates_to_constant() {
        let f = ScalarField::constant(3, 2.0);
        assert_eq!(f.eval(&[0.3, -7.0, 1e6]), 2.0);
    }

    #[test]
    fn linear_interpolation_midpoint() {
        assert_eq!(line_01().eval(&[0.5]), 0.5);
    }

    #[test]
    fn constant_far_field_outside_box() {
        let f = line_01();
        assert_eq!(f.eval(&[100.0]), 0.0);
        assert_eq!(f.eval(&[-3.0]), 0.0);
    }

    #[test]
    fn clamp_extension_uses_boundary_value() {
        let spec = GridSpec::new(vec![0.0], vec![1.0], vec![2]).unwrap();
        let f = ScalarField::sampled(spec, vec![0.25, 1.0], ExtensionPolicy::ClampToNearestBoundaryValue)
            .unwrap();
        assert_eq!(f.eval(&[5.0]), 1.0);
        assert_eq!(f.eval(&[-5.0]), 0.25);
    }

    #[test]
    fn gradient_of_linear_is_exact() {
        let f: ScalarField = ScalarField::analytic(2, 10.0, |x| x[0]).into();
        let g = f.gradient_fd(&[0.0, 0.0], 0.1).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-14 && g[1] == 0.0);
        let c = ScalarField::constant(2, 3.0);
        assert_eq!(c.gradient_fd(&[1.0, 2.0], 0.1).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn gradient_of_gaussian() {
        let f: ScalarField =
            ScalarField::analytic(2, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).into();
        let g = f.gradient_fd(&[1.0, 0.0], 1e-4).unwrap();
        assert!((g[0] + 2.0 * (-1.0f64).exp()).abs() < 1e-6);
        assert!(g[1].abs() < 1e-12);
    }

    #[test]
    fn translate_examples() {
        let f: ScalarField = ScalarField::analytic(2, 10.0, |x| x[0]).into();
        let g = f.translate(&[1.0, 0.0]);
        assert_eq!(g.eval(&[2.0, 5.0]), 3.0);
        let ball: ScalarField = ScalarField::analytic(2, 1.0, |x| {
            if x[0] * x[0] + x[1] * x[1] < 1.0 { 1.0 } else { 0.0 }
        })
        .into();
        assert_eq!(ball.translate(&[2.0, 0.0]).eval(&[-2.0, 0.0]), 1.0);
        let same = f.translate(&[0.0, 0.0]);
        assert_eq!(same.eval(&[0.25, 0.5]), f.eval(&[0.25, 0.5]));
    }

    #[test]
    fn sampled_translation_shifts_grid() {
        let spec = GridSpec::cube(2, -1.0, 1.0, 5).unwrap();
        let f = ScalarField::sample(
            &ScalarField::analytic(2, 4.0, |x| x[0] + 2.0 * x[1]).into(),
            spec,
            ExtensionPolicy::ConstantFarField(0.0),
        )
        .unwrap();
        let g = f.translate(&[0.5, 0.0]);
        assert!((g.eval(&[0.0, 0.5]) - f.eval(&[0.5, 0.5])).abs() < 1e-15);
    }

    #[test]
    fn non_finite_rule_is_reported() {
        let f: ScalarField = ScalarField::analytic(1, 1.0, |x| 1.0 / x[0]).into();
        match f.try_eval(&[0.0]) {
            Err(Error::NonFinite { x, .. }) => assert_eq!(x, vec![0.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spot_check_catches_false_radial_flag() {
        let f: ScalarField = ScalarField::analytic(2, 1.0, |x| (-x[0] * x[0]).exp())
            .with_flags(FieldFlags {
                radial: true,
                ..Default::default()
            })
            .into();
        assert!(f.spot_check(64, 3.0, 7).is_err());
        let g: ScalarField = ScalarField::analytic(2, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1])).exp())
            .with_flags(FieldFlags {
                radial: true,
                radially_nonincreasing: true,
                profile_1d: false,
            })
            .into();
        g.spot_check(64, 3.0, 7).unwrap();
    }

    #[test]
    fn enlarged_grid_keeps_spacing() {
        let spec = GridSpec::cube(2, -1.0, 1.0, 9).unwrap();
        let big = spec.enlarged(2).unwrap();
        assert_eq!(big.counts(), &[17, 17]);
        assert_eq!(big.spacing(0), spec.spacing(0));
        assert_eq!(big.lo()[0], -2.0);
    }

    fn grid_values(m: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0f64..1.0, m * m)
    }

    proptest! {
        #[test]
        fn eval_is_exact_on_nodes(values in grid_values(6), k in 0usize..36) {
            let spec = GridSpec::new(vec![-1.3, 0.2], vec![2.9, 3.1], vec![6, 6]).unwrap();
            let f = ScalarField::sampled(spec.clone(), values.clone(), ExtensionPolicy::ConstantFarField(0.0)).unwrap();
            prop_assert_eq!(f.eval(&spec.node_flat(k)).to_bits(), values[k].to_bits());
        }

        #[test]
        fn interpolation_is_monotone(
            a in grid_values(5),
            bump in prop::collection::vec(0.0f64..1.0, 25),
            x0 in -2.0f64..2.0, x1 in -2.0f64..2.0,
        ) {
            let spec = GridSpec::cube(2, -1.5, 1.5, 5).unwrap();
            let b: Vec<f64> = a.iter().zip(&bump).map(|(p, q)| p + q).collect();
            let fa = ScalarField::sampled(spec.clone(), a, ExtensionPolicy::ConstantFarField(0.0)).unwrap();
            let fb = ScalarField::sampled(spec, b, ExtensionPolicy::ConstantFarField(0.5)).unwrap();
            prop_assert!(fa.eval(&[x0, x1]) <= fb.eval(&[x0, x1]) + 1e-15);
        }

        #[test]
        fn translation_round_trip(y0 in -3.0f64..3.0, y1 in -3.0f64..3.0, x0 in -2.0f64..2.0, x1 in -2.0f64..2.0) {
            let f: ScalarField = ScalarField::analytic(2, 1.0, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp()).into();
            let back = f.translate(&[y0, y1]).translate(&[-y0, -y1]);
            let v = f.eval(&[x0, x1]);
            prop_assert!((back.eval(&[x0, x1]) - v).abs() <= 1e-12);
        }
    }
}
