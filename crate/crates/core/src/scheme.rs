//! Explicit monotone scheme `U^{j+1} = U^j + τ L_ε[U^j]` on grid fields.
//!
//! For grids with a constant far field the operator is applied through a
//! precomputed stencil: every (direction, quadrature node) pair has a fixed
//! offset in index space and fixed multilinear weights, and rays that leave
//! the box pick up the far-field value times the remaining measure. The
//! sweep touches only index arithmetic, so translating the grid by whole
//! cells leaves every computed value unchanged.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ExtensionPolicy, GridSpec, SampledField, ScalarField};
use crate::operator::{self, OperatorConfig};

/// `τ = θ s ε^{2s} / C_s`.
pub fn cfl_tau(s: f64, eps: f64, cs: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, 1] for the CFL condition, got {theta}"
        )));
    }
    Ok(raw_tau(s, eps, cs, theta))
}

fn raw_tau(s: f64, eps: f64, cs: f64, theta: f64) -> f64 {
    theta * s * eps.powf(2.0 * s) / cs
}

/// Coefficient `1 − τ C_s/(s ε^{2s})` of `U^j(x)` in the update.
pub fn cfl_coefficient(tau: f64, s: f64, eps: f64, cs: f64) -> f64 {
    1.0 - tau * cs / (s * eps.powf(2.0 * s))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub op: OperatorConfig,
    pub theta: f64,
    pub t_end: f64,
    pub grid: GridSpec,
    #[serde(skip, default = "default_ext")]
    pub ext: ExtensionPolicy,
    /// Add `±∇U/|∇U|` (central differences on the lattice) to the direction
    /// candidates at every node.
    pub gradient_candidates: bool,
}

fn default_ext() -> ExtensionPolicy {
    ExtensionPolicy::ConstantFarField(0.0)
}

impl SchemeConfig {
    pub fn new(op: OperatorConfig, grid: GridSpec, far_field: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            op,
            theta: 0.5,
            t_end,
            grid,
            ext: ExtensionPolicy::ConstantFarField(far_field),
            gradient_candidates: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.op.validate()?;
        cfl_tau(self.op.s, self.op.eps, self.op.cs, self.theta)?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("T must be finite and ≥ 0, got {}", self.t_end)));
        }
        if self.grid.dim() != self.op.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.op.dim(),
                got: self.grid.dim(),
            });
        }
        Ok(())
    }

    /// Step size from `theta`. Not clamped, so configurations with
    /// `theta > 1` can be built deliberately to probe the CFL bound.
    pub fn tau(&self) -> f64 {
        raw_tau(self.op.s, self.op.eps, self.op.cs, self.theta)
    }

    pub fn n_steps(&self) -> usize {
        if self.t_end == 0.0 {
            0
        } else {
            (self.t_end / self.tau() - 1e-9).ceil().max(1.0) as usize
        }
    }
}

/// Precomputed stencil of `L_ε` on a grid with a constant far field.
#[derive(Clone, Debug)]
pub struct GridOperator {
    counts: Vec<usize>,
    pstrides: Vec<usize>,
    h: Vec<f64>,
    eta: Vec<f64>,
    w: Vec<f64>,
    /// `suffix[k] = Σ_{j≥k} w_j + tail`.
    suffix: Vec<f64>,
    corners: Vec<usize>,
    n_dir: usize,
    nk: usize,
    off: Vec<isize>,
    cw: Vec<f64>,
    /// Per axis, `exit[a][d * M_a + i]` is the first node index whose
    /// position leaves `[0, M_a − 1]` along direction `d` from index `i`.
    exit: Vec<Vec<u32>>,
    c_inf: f64,
    cs: f64,
    grad_tol: f64,
    gradient_candidates: bool,
}

impl GridOperator {
    pub fn new(op: &OperatorConfig, grid: &GridSpec, c_inf: f64, gradient_candidates: bool) -> Result<Self> {
        op.validate()?;
        if grid.dim() != op.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                got: grid.dim(),
            });
        }
        let dim = grid.dim();
        let counts = grid.counts().to_vec();
        let h = grid.spacings();
        let mut pstrides = vec![1usize; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            pstrides[a] = pstrides[a + 1] * (counts[a + 1] + 1);
        }
        let nodes = op.quad.ray_nodes(op.s);
        let nk = nodes.eta.len();
        let mut suffix = vec![nodes.tail; nk + 1];
        for k in (0..nk).rev() {
            suffix[k] = suffix[k + 1] + nodes.weight[k];
        }
        let corners: Vec<usize> = (0..1usize << dim)
            .map(|c| (0..dim).filter(|a| c & (1 << a) != 0).map(|a| pstrides[a]).sum())
            .collect();
        let dirs = op.dirs.vectors();
        let n_dir = dirs.len();
        let nc = corners.len();
        let mut off = vec![0isize; n_dir * nk];
        let mut cw = vec![0.0; n_dir * nk * nc];
        let mut exit: Vec<Vec<u32>> = counts.iter().map(|&m| vec![nk as u32; n_dir * m]).collect();
        for (d, y) in dirs.iter().enumerate() {
            for k in 0..nk {
                let mut o = 0isize;
                let mut frac = [0.0f64; 8];
                for a in 0..dim {
                    let delta = nodes.eta[k] * y[a] / h[a];
                    let fl = delta.floor();
                    frac[a] = delta - fl;
                    o += fl as isize * pstrides[a] as isize;
                }
                off[d * nk + k] = o;
                for c in 0..nc {
                    let mut wt = nodes.weight[k];
                    for (a, f) in frac.iter().enumerate().take(dim) {
                        wt *= if c & (1 << a) != 0 { *f } else { 1.0 - f };
                    }
                    cw[(d * nk + k) * nc + c] = wt;
                }
            }
            for a in 0..dim {
                let m = counts[a];
                for i in 0..m {
                    let top = (m - 1) as f64;
                    let k_exit = (0..nk)
                        .find(|&k| {
                            let p = i as f64 + nodes.eta[k] * y[a] / h[a];
                            !(0.0..=top).contains(&p)
                        })
                        .unwrap_or(nk);
                    exit[a][d * m + i] = k_exit as u32;
                }
            }
        }
        Ok(Self {
            counts,
            pstrides,
            h,
            eta: nodes.eta,
            w: nodes.weight,
            suffix,
            corners,
            n_dir,
            nk,
            off,
            cw,
            exit,
            c_inf,
            cs: op.cs,
            grad_tol: op.grad_tol,
            gradient_candidates,
        })
    }

    fn padded(&self, values: &[f64]) -> Vec<f64> {
        let dim = self.counts.len();
        let plen: usize = self.counts.iter().map(|m| m + 1).product();
        let mut p = vec![self.c_inf; plen];
        let mut idx = vec![0usize; dim];
        for v in values {
            let q: usize = idx.iter().zip(&self.pstrides).map(|(i, s)| i * s).sum();
            p[q] = *v;
            for a in (0..dim).rev() {
                idx[a] += 1;
                if idx[a] < self.counts[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        p
    }

    fn lattice(&self, padded: &[f64], idx: &[usize], axis: usize, step: isize) -> f64 {
        let j = idx[axis] as isize + step;
        if j < 0 || j >= self.counts[axis] as isize {
            return self.c_inf;
        }
        let q: usize = idx
            .iter()
            .enumerate()
            .map(|(a, &i)| if a == axis { j as usize } else { i } * self.pstrides[a])
            .sum();
        padded[q]
    }

    /// Ray integral along an arbitrary unit direction, in index space.
    fn free_ray(&self, padded: &[f64], idx: &[usize], y: &[f64], ux: f64) -> f64 {
        let dim = idx.len();
        let mut acc = 0.0;
        let mut k_exit = self.nk;
        let mut frac = [0.0f64; 8];
        'nodes: for k in 0..self.nk {
            let mut base = 0usize;
            for a in 0..dim {
                let p = idx[a] as f64 + self.eta[k] * y[a] / self.h[a];
                if !(0.0..=(self.counts[a] - 1) as f64).contains(&p) {
                    k_exit = k;
                    break 'nodes;
                }
                let fl = p.floor();
                frac[a] = p - fl;
                base += fl as usize * self.pstrides[a];
            }
            let mut v = 0.0;
            for (c, co) in self.corners.iter().enumerate() {
                let mut wt = 1.0;
                for (a, f) in frac.iter().enumerate().take(dim) {
                    wt *= if c & (1 << a) != 0 { *f } else { 1.0 - f };
                }
                if wt != 0.0 {
                    v += wt * (padded[base + co] - ux);
                }
            }
            acc += self.w[k] * v;
        }
        acc + (self.c_inf - ux) * self.suffix[k_exit]
    }

    fn node_value(&self, padded: &[f64], idx: &[usize], ux: f64) -> f64 {
        let dim = idx.len();
        let nc = self.corners.len();
        let q: usize = idx.iter().zip(&self.pstrides).map(|(i, s)| i * s).sum();
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for d in 0..self.n_dir {
            let mut k_exit = self.nk;
            for a in 0..dim {
                k_exit = k_exit.min(self.exit[a][d * self.counts[a] + idx[a]] as usize);
            }
            let mut acc = 0.0;
            let offs = &self.off[d * self.nk..d * self.nk + k_exit];
            let wts = &self.cw[d * self.nk * nc..(d * self.nk + k_exit) * nc];
            if nc == 4 {
                let (c1, c2, c3) = (self.corners[1], self.corners[2], self.corners[3]);
                for (o, w) in offs.iter().zip(wts.chunks_exact(4)) {
                    let b = (q as isize + o) as usize;
                    acc += w[0] * (padded[b] - ux)
                        + w[1] * (padded[b + c1] - ux)
                        + w[2] * (padded[b + c2] - ux)
                        + w[3] * (padded[b + c3] - ux);
                }
            } else {
                for (o, w) in offs.iter().zip(wts.chunks_exact(nc)) {
                    let b = (q as isize + o) as usize;
                    for (c, co) in self.corners.iter().enumerate() {
                        acc += w[c] * (padded[b + co] - ux);
                    }
                }
            }
            let v = acc + (self.c_inf - ux) * self.suffix[k_exit];
            hi = hi.max(v);
            lo = lo.min(v);
        }
        if self.gradient_candidates {
            let mut g = [0.0f64; 8];
            let mut gn = 0.0;
            for a in 0..dim {
                g[a] = (self.lattice(padded, idx, a, 1) - self.lattice(padded, idx, a, -1)) / (2.0 * self.h[a]);
                gn += g[a] * g[a];
            }
            let gn = gn.sqrt();
            if gn > self.grad_tol {
                let zeta: Vec<f64> = g[..dim].iter().map(|v| v / gn).collect();
                let minus: Vec<f64> = zeta.iter().map(|v| -v).collect();
                for y in [&zeta, &minus] {
                    let v = self.free_ray(padded, idx, y, ux);
                    hi = hi.max(v);
                    lo = lo.min(v);
                }
            }
        }
        self.cs * (hi + lo)
    }

    /// `L_ε` at every node of the grid.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let padded = self.padded(values);
        let counts = &self.counts;
        values
            .par_iter()
            .enumerate()
            .map(|(flat, &ux)| {
                let mut idx = [0usize; 8];
                let mut rem = flat;
                for a in (0..counts.len()).rev() {
                    idx[a] = rem % counts[a];
                    rem /= counts[a];
                }
                self.node_value(&padded, &idx[..counts.len()], ux)
            })
            .collect()
    }

    pub fn direction_count(&self) -> usize {
        self.n_dir
    }

    pub fn nodes_per_ray(&self) -> usize {
        self.nk
    }
}

/// Accumulated per-step monitor records.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Monitors {
    pub sup_norm: Vec<f64>,
    pub mass: Vec<f64>,
    pub wall_seconds: Vec<f64>,
}

impl Monitors {
    fn record(&mut self, u: &SampledField, wall: f64) {
        self.sup_norm.push(u.sup_norm());
        self.mass.push(trapezoid_mass(u));
        self.wall_seconds.push(wall);
    }
}

/// Trapezoidal integral of `U − c∞` over the grid box.
pub fn trapezoid_mass(u: &SampledField) -> f64 {
    let spec = u.spec();
    let c = match u.extension() {
        ExtensionPolicy::ConstantFarField(c) => *c,
        _ => 0.0,
    };
    let cell: f64 = spec.spacings().iter().product();
    let mut total = 0.0;
    for (flat, v) in u.values().iter().enumerate() {
        let idx = spec.multi_index(flat);
        let mut w = cell;
        for (a, &i) in idx.iter().enumerate() {
            if i == 0 || i + 1 == spec.counts()[a] {
                w *= 0.5;
            }
        }
        total += w * (v - c);
    }
    total
}

#[derive(Clone, Debug)]
pub struct SchemeState {
    pub j: usize,
    pub tau: f64,
    pub u: SampledField,
    pub monitors: Monitors,
}

impl SchemeState {
    pub fn initial(u0: &ScalarField, cfg: &SchemeConfig) -> Result<Self> {
        let u = match ScalarField::sample(u0, cfg.grid.clone(), cfg.ext.clone())? {
            ScalarField::Sampled(s) => s,
            ScalarField::Analytic(_) => unreachable!("sampling yields a grid field"),
        };
        Self::from_sampled(u, cfg)
    }

    pub fn from_sampled(u: SampledField, cfg: &SchemeConfig) -> Result<Self> {
        let mut monitors = Monitors::default();
        monitors.record(&u, 0.0);
        Ok(Self {
            j: 0,
            tau: cfg.tau(),
            u,
            monitors,
        })
    }

    pub fn time(&self) -> f64 {
        self.j as f64 * self.tau
    }

    pub fn field(&self) -> ScalarField {
        ScalarField::Sampled(self.u.clone())
    }
}

/// Applies the scheme step by step, reusing the precomputed stencil.
pub struct Stepper {
    cfg: SchemeConfig,
    kernel: Option<GridOperator>,
}

impl Stepper {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        cfg.op.validate()?;
        let kernel = match cfg.ext {
            ExtensionPolicy::ConstantFarField(c) => {
                Some(GridOperator::new(&cfg.op, &cfg.grid, c, cfg.gradient_candidates)?)
            }
            _ => None,
        };
        Ok(Self {
            cfg: cfg.clone(),
            kernel,
        })
    }

    /// `L_ε[U]` at every node.
    pub fn operator_values(&self, u: &SampledField) -> Result<Vec<f64>> {
        if u.spec().counts() != self.cfg.grid.counts() {
            return Err(Error::InvalidGrid("state grid differs from the configured grid".into()));
        }
        match (&self.kernel, u.extension()) {
            (Some(k), ExtensionPolicy::ConstantFarField(c)) if *c == k.c_inf => Ok(k.apply(u.values())),
            _ => {
                let field = ScalarField::Sampled(u.clone());
                let spec = u.spec();
                (0..spec.len())
                    .into_par_iter()
                    .map(|flat| operator::l_eps(&field, &spec.node_flat(flat), &self.cfg.op))
                    .collect()
            }
        }
    }

    pub fn step(&self, state: &SchemeState) -> Result<SchemeState> {
        let start = Instant::now();
        let tau = self.cfg.tau();
        let l = self.operator_values(&state.u)?;
        let mut next = Vec::with_capacity(l.len());
        for (flat, (u, lv)) in state.u.values().iter().zip(&l).enumerate() {
            let v = u + tau * lv;
            if !v.is_finite() {
                return Err(Error::SchemeAbort {
                    node: state.u.spec().node_flat(flat),
                    step: state.j + 1,
                });
            }
            next.push(v);
        }
        let u = SampledField::new(state.u.spec().clone(), next, state.u.extension().clone())?;
        let mut monitors = state.monitors.clone();
        monitors.record(&u, start.elapsed().as_secs_f64());
        Ok(SchemeState {
            j: state.j + 1,
            tau,
            u,
            monitors,
        })
    }
}

/// One step of the scheme.
pub fn step(state: &SchemeState, cfg: &SchemeConfig) -> Result<SchemeState> {
    Stepper::new(cfg)?.step(state)
}

/// The computed states `U^0, …, U^N` with `t_j = jτ`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub tau: f64,
    pub t_end: f64,
    pub states: Vec<SampledField>,
    pub monitors: Monitors,
}

impl Trajectory {
    pub fn last(&self) -> &SampledField {
        self.states.last().expect("trajectory holds U^0")
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.states.len()).map(|j| j as f64 * self.tau).collect()
    }

    pub fn snapshots(&self, times: &[f64]) -> Result<Vec<SampledField>> {
        times.iter().map(|&t| interpolate_time(self, t)).collect()
    }
}

pub fn evolve(u0: &ScalarField, cfg: &SchemeConfig) -> Result<Trajectory> {
    cfg.op.validate()?;
    let state = SchemeState::initial(u0, cfg)?;
    evolve_from(state, cfg)
}

pub fn evolve_from(mut state: SchemeState, cfg: &SchemeConfig) -> Result<Trajectory> {
    let stepper = Stepper::new(cfg)?;
    let mut states = vec![state.u.clone()];
    for _ in 0..cfg.n_steps() {
        state = stepper.step(&state)?;
        states.push(state.u.clone());
    }
    Ok(Trajectory {
        tau: cfg.tau(),
        t_end: cfg.t_end,
        states,
        monitors: state.monitors,
    })
}

/// `u_ε(·,t) = ((t_{j+1}−t)/τ) U^j + ((t−t_j)/τ) U^{j+1}`.
pub fn interpolate_time(traj: &Trajectory, t: f64) -> Result<SampledField> {
    if !(0.0..=traj.t_end).contains(&t) {
        return Err(Error::TimeOutOfRange { t, t_end: traj.t_end });
    }
    let last = traj.states.len() - 1;
    let x = t / traj.tau;
    let j = (x.floor() as usize).min(last);
    let r = x - j as f64;
    if r == 0.0 || j == last {
        return Ok(traj.states[j].clone());
    }
    let (a, b) = (&traj.states[j], &traj.states[j + 1]);
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(u, v)| (1.0 - r) * u + r * v)
        .collect();
    SampledField::new(a.spec().clone(), values, a.extension().clone())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulusSample {
    pub shift: Vec<i64>,
    pub distance: f64,
    pub initial: f64,
    pub worst: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AprioriReport {
    pub sup_norm: Vec<f64>,
    pub stability_pass: bool,
    pub space: Vec<ModulusSample>,
    /// `(t_j, ‖U^j − U^0‖_∞)` samples.
    pub time: Vec<(f64, f64)>,
    pub mass: Vec<f64>,
    pub tolerance: f64,
}

impl AprioriReport {
    pub fn pass(&self) -> bool {
        self.stability_pass && self.space.iter().all(|m| m.pass)
    }
}

/// `max_x |U(x + k h) − U(x)|` over lattice nodes (far field outside).
pub fn lattice_shift_norm(u: &SampledField, shift: &[i64]) -> f64 {
    let spec = u.spec();
    let mut worst = 0.0f64;
    let mut moved = vec![0i64; spec.dim()];
    for (flat, v) in u.values().iter().enumerate() {
        let idx = spec.multi_index(flat);
        for a in 0..spec.dim() {
            moved[a] = idx[a] as i64 + shift[a];
        }
        worst = worst.max((u.lattice_value(&moved) - v).abs());
    }
    worst
}

pub fn sup_distance(a: &SampledField, b: &SampledField) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Stability, space modulus and time modulus monitors over a trajectory.
/// Shifts are whole-cell multiples along each axis.
pub fn monitor_apriori(traj: &Trajectory, shifts: &[Vec<i64>], tolerance: f64) -> AprioriReport {
    let sup0 = traj.monitors.sup_norm.first().copied().unwrap_or(0.0);
    let stability_pass = traj.monitors.sup_norm.iter().all(|s| *s <= sup0 + tolerance);
    let u0 = &traj.states[0];
    let spec = u0.spec();
    let space = shifts
        .iter()
        .map(|k| {
            let distance = k
                .iter()
                .enumerate()
                .map(|(a, &i)| (i as f64 * spec.spacing(a)).powi(2))
                .sum::<f64>()
                .sqrt();
            let initial = lattice_shift_norm(u0, k);
            let worst = traj
                .states
                .par_iter()
                .map(|u| lattice_shift_norm(u, k))
                .reduce(|| 0.0, f64::max);
            ModulusSample {
                shift: k.clone(),
                distance,
                initial,
                worst,
                pass: worst <= initial + tolerance,
            }
        })
        .collect();
    let time = traj
        .states
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, u)| (j as f64 * traj.tau, sup_distance(u, u0)))
        .collect();
    AprioriReport {
        sup_norm: traj.monitors.sup_norm.clone(),
        stability_pass,
        space,
        time,
        mass: traj.monitors.mass.clone(),
        tolerance,
    }
}

/// Least-squares slope of `log y` against `log x`, skipping non-positive
/// entries.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::AnalyticField;
    use crate::operator::{cs_constant, l_eps};

    fn small_cfg(eps: f64, m: usize, t_end: f64) -> SchemeConfig {
        let grid = GridSpec::cube(2, -3.0, 3.0, m).unwrap();
        let op = OperatorConfig::new(0.75, eps, 2, grid.diameter()).unwrap().with_directions(32).unwrap();
        SchemeConfig::new(op, grid, 0.0, t_end).unwrap()
    }

    fn bump() -> ScalarField {
        AnalyticField::new(2, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).with_far_field(0.0).into()
    }

    #[test]
    fn cfl_tau_examples() {
        let cs = cs_constant(0.75).unwrap();
        assert!((cfl_tau(0.75, 1.0, cs, 1.0).unwrap() - 0.75 / cs).abs() < 1e-15);
        let a = cfl_tau(0.75, 0.1, cs, 0.5).unwrap();
        let b = cfl_tau(0.75, 0.2, cs, 0.5).unwrap();
        assert!((b / a - 2f64.powf(1.5)).abs() < 1e-13);
        assert!((a - 0.039_633_272_976_060_11).abs() < 1e-15);
        assert!(cfl_tau(0.75, 0.1, cs, 1.5).is_err());
        assert!(cfl_tau(0.75, 0.1, cs, 0.0).is_err());
    }

    #[test]
    fn theta_one_zeroes_the_diagonal() {
        for s in [0.6, 0.75, 0.9] {
            let cs = cs_constant(s).unwrap();
            for eps in [0.05, 0.1, 0.3] {
                let tau = cfl_tau(s, eps, cs, 1.0).unwrap();
                assert!(cfl_coefficient(tau, s, eps, cs).abs() <= 4.0 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn constant_data_is_steady() {
        let cfg = {
            let mut c = small_cfg(0.3, 17, 0.1);
            c.ext = ExtensionPolicy::ConstantFarField(2.5);
            c
        };
        let traj = evolve(&ScalarField::constant(2, 2.5), &cfg).unwrap();
        assert!(traj.states.len() > 1);
        for u in &traj.states {
            assert!(u.values().iter().all(|v| *v == 2.5));
        }
    }

    #[test]
    fn zero_horizon_returns_datum() {
        let cfg = small_cfg(0.3, 9, 0.0);
        let traj = evolve(&bump(), &cfg).unwrap();
        assert_eq!(traj.states.len(), 1);
        let direct = ScalarField::sample(&bump(), cfg.grid.clone(), cfg.ext.clone()).unwrap();
        assert_eq!(traj.states[0].values(), direct.as_sampled().unwrap().values());
    }

    #[test]
    fn fast_path_matches_pointwise_operator() {
        // Gradient candidates differ by construction (lattice vs probe
        // differences), so both sides search the direction set only.
        let mut cfg = small_cfg(0.2, 13, 0.1);
        cfg.gradient_candidates = false;
        cfg.op.grad_tol = f64::INFINITY;
        let state = SchemeState::initial(&bump(), &cfg).unwrap();
        let fast = Stepper::new(&cfg).unwrap().operator_values(&state.u).unwrap();
        let field = state.field();
        for flat in [0, 40, 84, 100, 168] {
            let x = cfg.grid.node_flat(flat);
            let slow = l_eps(&field, &x, &cfg.op).unwrap();
            assert!((fast[flat] - slow).abs() < 1e-9, "node {flat}: {} vs {slow}", fast[flat]);
        }
    }

    #[test]
    fn maximum_does_not_increase() {
        let cfg = small_cfg(0.2, 25, 0.1);
        let s0 = SchemeState::initial(&bump(), &cfg).unwrap();
        let s1 = step(&s0, &cfg).unwrap();
        let centre = cfg.grid.flat_index(&[12, 12]);
        assert!(s1.u.values()[centre] <= s0.u.values()[centre]);
    }

    #[test]
    fn time_interpolant() {
        let cfg = small_cfg(0.3, 9, 0.5);
        let traj = evolve(&bump(), &cfg).unwrap();
        let tau = traj.tau;
        assert_eq!(interpolate_time(&traj, tau).unwrap().values(), traj.states[1].values());
        let mid = interpolate_time(&traj, 1.5 * tau).unwrap();
        for ((m, a), b) in mid.values().iter().zip(traj.states[1].values()).zip(traj.states[2].values()) {
            assert!((m - 0.5 * (a + b)).abs() < 1e-15);
        }
        assert!(mid.sup_norm() <= traj.states[0].sup_norm() + 1e-12);
        assert!(matches!(interpolate_time(&traj, 0.51), Err(Error::TimeOutOfRange { .. })));
        assert!(matches!(interpolate_time(&traj, -0.01), Err(Error::TimeOutOfRange { .. })));
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|k| (k as f64, 3.0 * (k as f64).powf(0.4))).collect();
        assert!((loglog_slope(&pts).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn constant_modulus_is_zero() {
        let mut cfg = small_cfg(0.3, 9, 0.2);
        cfg.ext = ExtensionPolicy::ConstantFarField(1.0);
        let traj = evolve(&ScalarField::constant(2, 1.0), &cfg).unwrap();
        let rep = monitor_apriori(&traj, &[vec![1, 0], vec![0, 2]], 0.0);
        assert!(rep.pass());
        assert!(rep.space.iter().all(|m| m.worst == 0.0));
        assert!(rep.time.iter().all(|(_, d)| *d == 0.0));
    }
}
