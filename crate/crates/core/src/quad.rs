//! Graded Gauss–Legendre quadrature for integrals against `dη/η^{1+2s}`.
//!
//! Panels are geometric in η, `panels_per_decade` per factor of ten, with
//! Gauss–Legendre nodes on each panel. The integrand is bounded and the
//! measure decays algebraically, so geometric panels equidistribute the
//! error. Beyond `cut` the field is assumed equal to its limit along the
//! ray, which makes the tail a closed form.

use serde::{Deserialize, Serialize};

use crate::check_order;
use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Inner panel floor for integrals starting at η = 0, relative to the
/// problem's length scale.
pub const PAIR_FLOOR: f64 = 1e-4;

/// Absolute size below which a growing innermost decade is treated as noise.
const DIVERGENCE_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailMode {
    AnalyticConstantTail,
    ZeroTail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadRule {
    pub eps: f64,
    pub cut: f64,
    pub panels_per_decade: usize,
    pub nodes_per_panel: usize,
    pub tail_mode: TailMode,
}

/// Nodes and weights on `[lower, cut]` with the measure folded in.
#[derive(Clone, Debug)]
pub struct RayNodes {
    pub eta: Vec<f64>,
    pub weight: Vec<f64>,
    /// `cut^{-2s}/(2s)`, the measure of `[cut, ∞)`.
    pub tail: f64,
    pub lower: f64,
}

/// Result of an integral that starts at η = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairIntegral {
    pub value: f64,
    /// Estimated error of the modelled `[0, η₀]` panel.
    pub inner_error: f64,
}

impl QuadRule {
    pub fn new(eps: f64, cut: f64) -> Result<Self> {
        let rule = Self {
            eps,
            cut,
            panels_per_decade: 16,
            nodes_per_panel: 8,
            tail_mode: TailMode::AnalyticConstantTail,
        };
        rule.validate()?;
        Ok(rule)
    }

    /// Default rule for a domain of the given diameter: `cut = 10·diameter`.
    pub fn for_domain(eps: f64, diameter: f64) -> Result<Self> {
        Self::new(eps, 10.0 * diameter)
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        let rule = Self { eps, ..self.clone() };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidRule(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.cut > self.eps && self.cut.is_finite()) {
            return Err(Error::InvalidRule(format!(
                "need eps < cut, got eps = {}, cut = {}",
                self.eps, self.cut
            )));
        }
        if self.panels_per_decade == 0 || self.nodes_per_panel == 0 {
            return Err(Error::InvalidRule(
                "panels_per_decade and nodes_per_panel must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Geometric panel edges on `[a, b]` with `breaks` inserted.
    pub fn edges(&self, a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
        let n = ((self.panels_per_decade as f64) * (b / a).log10() - 1e-9)
            .ceil()
            .max(1.0) as usize;
        let ratio = (b / a).powf(1.0 / n as f64);
        let mut edges: Vec<f64> = (0..n).map(|k| a * ratio.powi(k as i32)).collect();
        edges.push(b);
        let mut inner: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|&e| e.is_finite() && e > a && e < b)
            .collect();
        if !inner.is_empty() {
            edges.append(&mut inner);
            edges.sort_by(f64::total_cmp);
            edges.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs());
        }
        edges
    }

    /// Nodes on `[lower, cut]` with weights `w_k η_k^{-1-2s}`.
    pub fn nodes(&self, s: f64, lower: f64, breaks: &[f64]) -> RayNodes {
        let (gx, gw) = gauss_legendre(self.nodes_per_panel);
        let edges = self.edges(lower, self.cut, breaks);
        let cap = (edges.len() - 1) * gx.len();
        let mut eta = Vec::with_capacity(cap);
        let mut weight = Vec::with_capacity(cap);
        for pair in edges.windows(2) {
            let (l, u) = (pair[0], pair[1]);
            let half = 0.5 * (u - l);
            let mid = 0.5 * (u + l);
            for (x, w) in gx.iter().zip(&gw) {
                let e = mid + half * x;
                eta.push(e);
                weight.push(half * w * e.powf(-1.0 - 2.0 * s));
            }
        }
        RayNodes {
            eta,
            weight,
            tail: self.cut.powf(-2.0 * s) / (2.0 * s),
            lower,
        }
    }

    /// Nodes for integrals from `rule.eps` (the operator's ε).
    pub fn ray_nodes(&self, s: f64) -> RayNodes {
        self.nodes(s, self.eps, &[])
    }

    fn tail_value(&self, field: &ScalarField, x: &[f64], y: &[f64], phi_x: f64) -> Result<f64> {
        match self.tail_mode {
            TailMode::ZeroTail => Ok(0.0),
            TailMode::AnalyticConstantTail => field
                .ray_limit(x, y)
                .map(|c| c - phi_x)
                .ok_or(Error::TailMismatch),
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on the
/// three-term recurrence). `n ≥ 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre order must be positive");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_n(z) and P_{n-1}(z)
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `∫_ε^∞ dη/η^{1+2s} = ε^{-2s}/(2s)`.
pub fn tail_weight(eps: f64, s: f64) -> Result<f64> {
    check_order(s)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidRule(format!("eps must be positive, got {eps}")));
    }
    Ok(eps.powf(-2.0 * s) / (2.0 * s))
}

pub(crate) fn check_unit(y: &[f64]) -> Result<()> {
    let n2: f64 = y.iter().map(|a| a * a).sum();
    if (n2.sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit { y: y.to_vec() });
    }
    Ok(())
}

fn check_dims(field: &ScalarField, x: &[f64], y: &[f64]) -> Result<()> {
    let n = field.dim();
    for got in [x.len(), y.len()] {
        if got != n {
            return Err(Error::DimensionMismatch { expected: n, got });
        }
    }
    Ok(())
}

/// Σ_k w_k (φ(x+η_k y) − φ(x)) for precomputed nodes.
pub(crate) fn ray_sum(field: &ScalarField, x: &[f64], y: &[f64], phi_x: f64, nodes: &RayNodes) -> f64 {
    let mut p = x.to_vec();
    let mut acc = 0.0;
    for (e, w) in nodes.eta.iter().zip(&nodes.weight) {
        for a in 0..x.len() {
            p[a] = x[a] + e * y[a];
        }
        acc += w * (field.eval(&p) - phi_x);
    }
    acc
}

/// `∫_ε^∞ (φ(x+ηy) − φ(x)) dη/η^{1+2s}` with `ε = rule.eps`.
pub fn integrate_ray(field: &ScalarField, x: &[f64], y: &[f64], rule: &QuadRule, s: f64) -> Result<f64> {
    check_order(s)?;
    rule.validate()?;
    check_dims(field, x, y)?;
    check_unit(y)?;
    let phi_x = field.try_eval(x)?;
    let nodes = rule.nodes(s, rule.eps, &field.breakpoints(x, y));
    ray_with_nodes(field, x, y, phi_x, rule, &nodes)
}

pub(crate) fn ray_with_nodes(
    field: &ScalarField,
    x: &[f64],
    y: &[f64],
    phi_x: f64,
    rule: &QuadRule,
    nodes: &RayNodes,
) -> Result<f64> {
    let value = ray_sum(field, x, y, phi_x, nodes) + nodes.tail * rule.tail_value(field, x, y, phi_x)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteRay { y: y.to_vec() })
    }
}

/// Shared core of the integrals that start at η = 0. `pair` selects the
/// symmetric second difference; otherwise the one-sided difference.
fn from_zero(
    field: &ScalarField,
    x: &[f64],
    y: &[f64],
    s: f64,
    rule: &QuadRule,
    pair: bool,
) -> Result<PairIntegral> {
    check_order(s)?;
    rule.validate()?;
    check_dims(field, x, y)?;
    check_unit(y)?;
    let phi_x = field.try_eval(x)?;
    let minus_y: Vec<f64> = y.iter().map(|a| -a).collect();
    let mut breaks = field.breakpoints(x, y);
    if pair {
        breaks.extend(field.breakpoints(x, &minus_y));
    }
    let eta0 = rule.eps;
    let nodes = rule.nodes(s, eta0, &breaks);

    let mut p = x.to_vec();
    let mut q = x.to_vec();
    let mut diff = |e: f64| -> f64 {
        for a in 0..x.len() {
            p[a] = x[a] + e * y[a];
            q[a] = x[a] - e * y[a];
        }
        if pair {
            field.eval(&p) + field.eval(&q) - 2.0 * phi_x
        } else {
            field.eval(&p) - phi_x
        }
    };

    let (mut body, mut first, mut second) = (0.0, 0.0, 0.0);
    for (e, w) in nodes.eta.iter().zip(&nodes.weight) {
        let term = w * diff(*e);
        body += term;
        if *e < 10.0 * eta0 {
            first += term;
        } else if *e < 100.0 * eta0 {
            second += term;
        }
    }
    // A C^{1,1} integrand gives decade ratio 10^{2s-2}, a kink gives
    // 10^{2s-1}; split the difference.
    let threshold = 10f64.powf(2.0 * s - 1.5);
    if first.abs() > threshold * second.abs() && first.abs() > DIVERGENCE_FLOOR * (1.0 + phi_x.abs()) {
        return Err(Error::NotC11 {
            x: x.to_vec(),
            y: y.to_vec(),
        });
    }

    // Quadratic model D(η) ≈ D(η₀)(η/η₀)² on [0, η₀].
    let d0 = diff(eta0);
    let d1 = diff(2.0 * eta0);
    let scale = eta0.powf(-2.0 * s) / (2.0 - 2.0 * s);
    let inner = d0 * scale;
    let inner_error = (d0 - d1 / 4.0).abs() * scale;

    let mut tail = rule.tail_value(field, x, y, phi_x)?;
    if pair {
        tail += rule.tail_value(field, x, &minus_y, phi_x)?;
    }
    let value = inner + body + nodes.tail * tail;
    if !value.is_finite() {
        return Err(Error::NonFiniteRay { y: y.to_vec() });
    }
    Ok(PairIntegral { value, inner_error })
}

/// `∫_0^∞ (φ(x+ηy) + φ(x−ηy) − 2φ(x)) dη/η^{1+2s}`. `rule.eps` is the inner
/// floor η₀; `[0, η₀]` is integrated with a quadratic model of the second
/// difference.
pub fn integrate_pair(field: &ScalarField, x: &[f64], y: &[f64], s: f64, rule: &QuadRule) -> Result<PairIntegral> {
    from_zero(field, x, y, s, rule, true)
}

/// `∫_0^∞ (φ(x+ηy) − φ(x)) dη/η^{1+2s}`, convergent when `∇φ(x) = 0` and φ is
/// C^{1,1} at `x`.
pub fn integrate_one_sided(field: &ScalarField, x: &[f64], y: &[f64], s: f64, rule: &QuadRule) -> Result<PairIntegral> {
    from_zero(field, x, y, s, rule, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{AnalyticField, ScalarField};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gaussian2() -> ScalarField {
        AnalyticField::new(2, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1])).exp())
            .with_far_field(0.0)
            .into()
    }

    fn unit_ball2() -> ScalarField {
        AnalyticField::new(2, 1.0, |x| if x[0] * x[0] + x[1] * x[1] < 1.0 { 1.0 } else { 0.0 })
            .with_far_field(0.0)
            .with_breakpoints(|x, y| sphere_exits(x, y, 1.0))
            .into()
    }

    fn sphere_exits(x: &[f64], y: &[f64], r: f64) -> Vec<f64> {
        let b: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
        let c: f64 = x.iter().map(|p| p * p).sum::<f64>() - r * r;
        let disc = b * b - c;
        if disc <= 0.0 {
            return vec![];
        }
        let sq = disc.sqrt();
        [-b - sq, -b + sq].into_iter().filter(|e| *e > 0.0).collect()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 8, 16] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(deg as i32)).sum();
                assert!((got - exact).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn tail_weight_closed_form() {
        assert_relative_eq!(tail_weight(1.0, 0.75).unwrap(), 1.0 / 1.5, max_relative = 1e-15);
        assert_relative_eq!(tail_weight(0.5, 0.75).unwrap(), 1.885_618_083_164_127, max_relative = 1e-14);
        let a = tail_weight(0.3, 0.6).unwrap();
        let b = tail_weight(0.6, 0.6).unwrap();
        assert_relative_eq!(b / a, 2f64.powf(-1.2), max_relative = 1e-14);
        assert!(matches!(tail_weight(1.0, 0.4), Err(Error::OrderOutOfRange(_))));
    }

    #[test]
    fn edges_are_increasing_and_snap_breaks() {
        let rule = QuadRule::new(0.01, 100.0).unwrap();
        let e = rule.edges(0.01, 100.0, &[1.0 / 3.0, 7.0, 500.0]);
        assert_eq!(e.len(), 65 + 2);
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert!(e.contains(&(1.0 / 3.0)) && e.contains(&7.0));
    }

    #[test]
    fn constant_field_gives_zero() {
        let f = ScalarField::constant(2, 3.5);
        let rule = QuadRule::new(0.1, 40.0).unwrap();
        let y = [0.6, 0.8];
        assert_eq!(integrate_ray(&f, &[0.2, 0.1], &y, &rule, 0.75).unwrap(), 0.0);
        let pr = rule.with_eps(1e-4).unwrap();
        assert_eq!(integrate_pair(&f, &[0.2, 0.1], &y, 0.75, &pr).unwrap().value, 0.0);
    }

    #[test]
    fn unit_ball_exit_integral() {
        let f = unit_ball2();
        let rule = QuadRule::new(0.1, 40.0).unwrap();
        for th in [0.0f64, 0.3, 2.0] {
            let v = integrate_ray(&f, &[0.0, 0.0], &[th.cos(), th.sin()], &rule, 0.75).unwrap();
            assert!((v + 1.0 / 1.5).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn gaussian_ray_matches_high_precision_oracle() {
        // mpmath quad, 40 digits
        let rule = QuadRule::new(0.01, 40.0).unwrap();
        let v = integrate_ray(&gaussian2(), &[1.0, 0.0], &[1.0, 0.0], &rule, 0.75).unwrap();
        assert!((v - -12.762_410_916_070_93).abs() < 1e-8, "{v}");
    }

    #[test]
    fn cosine_pair_matches_symbol() {
        // ∫_0^∞ (2cos η − 2) η^{-2.5} dη = −1/C_{3/4}, mpmath
        let f: ScalarField = AnalyticField::new(1, 1.0, |x| x[0].cos()).into();
        let mut rule = QuadRule::new(1e-4, 2000.0).unwrap();
        rule.tail_mode = TailMode::ZeroTail;
        rule.panels_per_decade = 256;
        let v = integrate_pair(&f, &[0.0], &[1.0], 0.75, &rule).unwrap().value;
        // The cos tail beyond 2000 is O(cut^{-2.5}); the -2 part is analytic.
        let v = v - 2.0 * rule.cut.powf(-1.5) / 1.5;
        assert!((v - -3.342_171_032_841_334).abs() < 1e-6, "{v}");
    }

    #[test]
    fn pair_at_peak_is_negative() {
        let rule = QuadRule::new(1e-4, 40.0).unwrap();
        let v = integrate_pair(&gaussian2(), &[0.0, 0.0], &[0.0, 1.0], 0.75, &rule).unwrap();
        assert!(v.value < 0.0);
        assert!(v.inner_error < 1e-8);
    }

    #[test]
    fn kink_is_reported() {
        let f: ScalarField = AnalyticField::new(1, 1.0, |x| (-x[0].abs()).exp()).with_far_field(0.0).into();
        let rule = QuadRule::new(1e-4, 40.0).unwrap();
        for s in [0.55, 0.75, 0.95] {
            assert!(matches!(
                integrate_pair(&f, &[0.0], &[1.0], s, &rule),
                Err(Error::NotC11 { .. })
            ));
        }
        let g: ScalarField = AnalyticField::new(1, 1.0, |x| (-x[0] * x[0]).exp()).with_far_field(0.0).into();
        for s in [0.55, 0.75, 0.95] {
            integrate_pair(&g, &[0.3], &[1.0], s, &rule).unwrap();
        }
    }

    #[test]
    fn one_sided_with_slope_is_reported() {
        let f: ScalarField = AnalyticField::new(1, 1.0, |x| (-x[0] * x[0]).exp()).with_far_field(0.0).into();
        let rule = QuadRule::new(1e-4, 40.0).unwrap();
        assert!(matches!(
            integrate_one_sided(&f, &[0.5], &[1.0], 0.75, &rule),
            Err(Error::NotC11 { .. })
        ));
        integrate_one_sided(&f, &[0.0], &[1.0], 0.75, &rule).unwrap();
    }

    #[test]
    fn tail_mode_requires_far_field() {
        let f: ScalarField = AnalyticField::new(1, 1.0, |x| x[0].sin()).into();
        let rule = QuadRule::new(0.1, 40.0).unwrap();
        assert!(matches!(integrate_ray(&f, &[0.0], &[1.0], &rule, 0.75), Err(Error::TailMismatch)));
    }

    #[test]
    fn non_unit_direction_rejected() {
        let rule = QuadRule::new(0.1, 40.0).unwrap();
        assert!(matches!(
            integrate_ray(&gaussian2(), &[0.0, 0.0], &[1.0, 1.0], &rule, 0.75),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn exact_tail_for_compact_support() {
        // φ = 1 on B_2, 0 outside; from x = 0 the ray integral is
        // -∫_2^∞ = -2^{-2s}/(2s) for any cut ≥ 2.
        let f: ScalarField = AnalyticField::new(2, 1.0, |x| if x[0] * x[0] + x[1] * x[1] < 4.0 { 1.0 } else { 0.0 })
            .with_far_field(0.0)
            .with_breakpoints(|x, y| sphere_exits(x, y, 2.0))
            .into();
        for cut in [2.5, 10.0, 300.0] {
            let rule = QuadRule::new(0.05, cut).unwrap();
            let v = integrate_ray(&f, &[0.0, 0.0], &[1.0, 0.0], &rule, 0.7).unwrap();
            let exact = -tail_weight(2.0, 0.7).unwrap();
            assert!((v - exact).abs() < 1e-13, "cut {cut}: {v} vs {exact}");
        }
    }

    #[test]
    fn refinement_changes_little() {
        let mut rule = QuadRule::new(0.01, 40.0).unwrap();
        let a = integrate_ray(&gaussian2(), &[0.5, -0.2], &[0.8, 0.6], &rule, 0.75).unwrap();
        rule.panels_per_decade *= 2;
        let b = integrate_ray(&gaussian2(), &[0.5, -0.2], &[0.8, 0.6], &rule, 0.75).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn ray_integral_is_linear(alpha in -2.0f64..2.0, beta in -2.0f64..2.0, th in 0.0f64..std::f64::consts::TAU, x0 in -1.0f64..1.0) {
            let f = gaussian2();
            let g: ScalarField = AnalyticField::new(2, 1.0, |x| (-(x[0] - 0.5).powi(2) - 2.0 * x[1] * x[1]).exp()).with_far_field(0.0).into();
            let (fa, ga) = (f.clone(), g.clone());
            let h: ScalarField = AnalyticField::new(2, 4.0, move |x| alpha * fa.eval(x) + beta * ga.eval(x)).with_far_field(0.0).into();
            let rule = QuadRule::new(0.05, 40.0).unwrap();
            let y = [th.cos(), th.sin()];
            let x = [x0, 0.3];
            let lhs = integrate_ray(&h, &x, &y, &rule, 0.75).unwrap();
            let rhs = alpha * integrate_ray(&f, &x, &y, &rule, 0.75).unwrap() + beta * integrate_ray(&g, &x, &y, &rule, 0.75).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
