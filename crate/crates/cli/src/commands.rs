//! Command runners. Each writes its artifacts under the output directory
//! and returns a JSON summary plus whether every check passed.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use ifl_core::catalog;
use ifl_core::field::{ExtensionPolicy, GridSpec, SampledField, ScalarField};
use ifl_core::heat1d::{self, build_profile, Kernel1D};
use ifl_core::io::{fmt_value, save_grid};
use ifl_core::operator::{ifl_bracket, l_eps, OperatorConfig};
use ifl_core::scheme::{evolve, interpolate_time, SchemeConfig, Trajectory};
use ifl_core::verify::{run_suite, VerifyOptions};
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::CliError;

pub struct Outcome {
    pub summary: Value,
    pub pass: bool,
}

/// Slack for the discrete maximum principle and the operator ordering.
const ROUNDOFF: f64 = 1e-12;
const ORDERING_TOL: f64 = 1e-8;

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    fs::create_dir_all(&cfg.output.dir).map_err(ifl_core::Error::from)?;
    let start = Instant::now();
    let command = cfg.command.unwrap_or(Command::Evolve);
    let mut out = match command {
        Command::OpEval => op_eval(cfg)?,
        Command::Evolve => run_evolve(cfg)?,
        Command::Kernel => kernel(cfg)?,
        Command::Verify => verify(cfg)?,
        Command::Harnack => harnack(cfg)?,
    };
    let meta = json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "wall_seconds": start.elapsed().as_secs_f64(),
        "pass": out.pass,
        "result": out.summary,
    });
    let path = cfg.output.dir.join(format!("{}.json", command.name()));
    write_json(&path, &meta)?;
    out.summary = meta;
    Ok(out)
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(ifl_core::Error::from)?;
    fs::write(path, text + "\n").map_err(ifl_core::Error::from)?;
    Ok(())
}

fn grid(cfg: &RunConfig) -> Result<GridSpec, CliError> {
    let p = &cfg.problem;
    Ok(GridSpec::cube(p.dim, p.lo, p.hi, p.m)?)
}

fn operator(cfg: &RunConfig) -> Result<OperatorConfig, CliError> {
    let p = &cfg.problem;
    let o = &cfg.operator;
    let diameter = (p.hi - p.lo) * (p.dim as f64).sqrt();
    let mut op = OperatorConfig::new(p.s, o.eps, p.dim, diameter)?;
    if let Some(n) = o.n_dir {
        op = op.with_directions(n)?;
    }
    op.quad.panels_per_decade = o.panels_per_decade;
    op.grad_tol = o.grad_tol;
    op.validate()?;
    Ok(op)
}

fn datum(cfg: &RunConfig) -> Result<ScalarField, CliError> {
    Ok(catalog::datum(&cfg.problem.datum, cfg.problem.dim, &cfg.datum)?)
}

fn scheme_config(cfg: &RunConfig, u0: &ScalarField) -> Result<SchemeConfig, CliError> {
    let far = cfg.scheme.far_field.or_else(|| u0.far_field());
    let mut sc = SchemeConfig::new(operator(cfg)?, grid(cfg)?, far.unwrap_or(0.0), cfg.scheme.t_end)?;
    sc.theta = cfg.scheme.theta;
    sc.gradient_candidates = cfg.scheme.gradient_candidates;
    if far.is_none() {
        sc.ext = ExtensionPolicy::ClampToNearestBoundaryValue;
    }
    sc.validate()?;
    Ok(sc)
}

fn op_eval(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let field = datum(cfg)?;
    let op = operator(cfg)?;
    let dim = cfg.problem.dim;
    let points = if cfg.op_eval.points.is_empty() {
        [0.0, 0.5, 1.0]
            .iter()
            .map(|&a| {
                let mut x = vec![0.0; dim];
                x[0] = a;
                x
            })
            .collect()
    } else {
        cfg.op_eval.points.clone()
    };
    let mut rows = Vec::new();
    let mut pass = true;
    for x in &points {
        let (minus, mid, plus) = ifl_bracket(&field, x, &op)?;
        let leps = l_eps(&field, x, &op)?;
        let ordered = minus <= mid + ORDERING_TOL && mid <= plus + ORDERING_TOL;
        pass &= ordered;
        println!("x = {x:?}: L_eps {leps:.10e}, minus {minus:.10e}, operator {mid:.10e}, plus {plus:.10e}");
        rows.push(json!({
            "x": x,
            "l_eps": leps,
            "ifl": mid,
            "ifl_minus": minus,
            "ifl_plus": plus,
            "ordered": ordered,
        }));
    }
    Ok(Outcome {
        summary: json!({ "cs": op.cs, "points": rows, "ordering_tolerance": ORDERING_TOL }),
        pass,
    })
}

fn save_snapshots(cfg: &RunConfig, traj: &Trajectory, times: &[f64]) -> Result<Vec<Value>, CliError> {
    let mut files = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let u = interpolate_time(traj, t)?;
        let name = format!("snapshot_{i:03}.csv");
        save_grid(&cfg.output.dir.join(&name), &u, json!({ "t": t, "index": i }))?;
        files.push(json!({ "file": name, "t": t, "sup_norm": u.sup_norm() }));
    }
    Ok(files)
}

fn value_range(u: &SampledField) -> (f64, f64) {
    u.values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
}

fn run_evolve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let u0 = datum(cfg)?;
    let sc = scheme_config(cfg, &u0)?;
    let start = Instant::now();
    let traj = evolve(&u0, &sc)?;
    let wall = start.elapsed().as_secs_f64();
    let files = save_snapshots(cfg, &traj, &cfg.snapshot_times())?;

    let (lo0, hi0) = value_range(&traj.states[0]);
    let (lo, hi) = traj
        .states
        .iter()
        .map(value_range)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    let slack = ROUNDOFF * hi0.abs().max(lo0.abs()).max(1.0);
    let bounded = hi <= hi0 + slack && lo >= lo0 - slack;
    let m = &traj.monitors;
    Ok(Outcome {
        summary: json!({
            "tau": traj.tau,
            "steps": traj.states.len() - 1,
            "wall_seconds": wall,
            "snapshots": files,
            "monitors": {
                "sup_norm_first": m.sup_norm.first(),
                "sup_norm_last": m.sup_norm.last(),
                "mass_first": m.mass.first(),
                "mass_last": m.mass.last(),
                "step_seconds_total": m.wall_seconds.iter().sum::<f64>(),
            },
            "checks": [{
                "description": "values stay within the range of the datum",
                "range_datum": [lo0, hi0],
                "range_trajectory": [lo, hi],
                "tolerance": slack,
                "pass": bounded,
            }],
        }),
        pass: bounded,
    })
}

fn write_kernel_table(path: &Path, k: &Kernel1D) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(ifl_core::Error::from)?;
    let mut w = BufWriter::new(file);
    let mut go = || -> std::io::Result<()> {
        writeln!(w, "r,profile")?;
        for (r, f) in k.table() {
            writeln!(w, "{},{}", fmt_value(r), fmt_value(f))?;
        }
        w.flush()
    };
    go().map_err(ifl_core::Error::from)?;
    Ok(())
}

fn kernel(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = cfg.problem.s;
    let k = build_profile(s, cfg.kernel.r_max, cfg.kernel.dr)?;
    write_kernel_table(&cfg.output.dir.join("kernel_profile.csv"), &k)?;
    let decreasing = k.is_strictly_decreasing();
    let mass = k.mass();
    let mass_ok = (mass - 1.0).abs() <= 1e-6;
    Ok(Outcome {
        summary: json!({
            "s": s,
            "r_max": k.r_max,
            "dr": k.dr,
            "rows": k.len(),
            "tail_c": k.tail_c,
            "tail_constants": [k.tail_constants.0, k.tail_constants.1],
            "checks": [
                { "description": "profile strictly decreasing", "pass": decreasing },
                { "description": "unit mass", "measured": mass, "tolerance": 1e-6, "pass": mass_ok },
            ],
        }),
        pass: decreasing && mass_ok,
    })
}

fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let opts = VerifyOptions {
        seed: cfg.run.seed,
        probes: cfg.verify.probes,
        quick: cfg.verify.quick,
        ..VerifyOptions::default()
    };
    let report = run_suite(&cfg.verify.suite, &opts)?;
    print!("{}", report.to_text());
    let path = cfg.output.dir.join(format!("report_{}.json", report.suite));
    fs::write(&path, report.to_json()?).map_err(ifl_core::Error::from)?;
    Ok(Outcome {
        pass: report.passed(),
        summary: json!({
            "suite": report.suite,
            "report": path.file_name().and_then(|f| f.to_str()),
            "checks": report.records.iter().filter(|r| !r.informational).count(),
            "failures": report.failures().iter().map(|r| r.description.clone()).collect::<Vec<_>>(),
        }),
    })
}

fn harnack(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = cfg.problem.s;
    let u0 = datum(cfg)?;
    let sc = scheme_config(cfg, &u0)?;
    let k = Kernel1D::with_defaults(s)?;
    let traj = evolve(&u0, &sc)?;
    let times: Vec<f64> = cfg.snapshot_times().into_iter().filter(|t| *t > 0.0).collect();
    let files = save_snapshots(cfg, &traj, &times)?;
    let spec = grid(cfg)?;
    let mut rows = Vec::new();
    let mut pass = true;
    for &t in &times {
        let u = interpolate_time(&traj, t)?;
        let (mut kr, mut sr) = ((f64::INFINITY, 0.0f64), (f64::INFINITY, 0.0f64));
        let mut min_u = f64::INFINITY;
        for (flat, v) in u.values().iter().enumerate() {
            let r = spec.node_flat(flat).iter().map(|v| v * v).sum::<f64>().sqrt();
            let a = v / k.eval(r, t)?;
            let b = v / heat1d::algebraic_shape(r, t, s);
            kr = (kr.0.min(a), kr.1.max(a));
            sr = (sr.0.min(b), sr.1.max(b));
            min_u = min_u.min(*v);
        }
        let ok = min_u > 0.0 && kr.0 > 0.0 && kr.1.is_finite() && sr.0 > 0.0 && sr.1.is_finite();
        pass &= ok;
        println!("t = {t}: u/P_s in [{:.4e}, {:.4e}], algebraic constants [{:.4e}, {:.4e}], min u {min_u:.4e}", kr.0, kr.1, sr.0, sr.1);
        rows.push(json!({
            "t": t,
            "kernel_ratio": [kr.0, kr.1],
            "algebraic_constants": [sr.0, sr.1],
            "min_u": min_u,
            "pass": ok,
        }));
    }
    if times.is_empty() {
        pass = false;
    }
    Ok(Outcome {
        summary: json!({ "tau": traj.tau, "times": rows, "snapshots": files }),
        pass,
    })
}
