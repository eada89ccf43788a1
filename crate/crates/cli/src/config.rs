//! Run configuration: a TOML file with flat sections, overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use ifl_core::catalog::{self, DatumParams};
use ifl_core::heat1d::{DEFAULT_DR, DEFAULT_R_MAX};
use ifl_core::operator::DirectionSet;
use ifl_core::verify::{DEFAULT_SEED, SUITES};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{key}: {message}")]
    Invalid { key: &'static str, message: String },
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    OpEval,
    Evolve,
    Kernel,
    Verify,
    Harnack,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::OpEval => "op-eval",
            Self::Evolve => "evolve",
            Self::Kernel => "kernel",
            Self::Verify => "verify",
            Self::Harnack => "harnack",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Problem {
    pub s: f64,
    pub dim: usize,
    pub datum: String,
    /// The grid is the cube `[lo, hi]^dim` with `m` nodes per axis.
    pub lo: f64,
    pub hi: f64,
    pub m: usize,
}

impl Default for Problem {
    fn default() -> Self {
        Self {
            s: 0.75,
            dim: 2,
            datum: "gaussian".into(),
            lo: -6.0,
            hi: 6.0,
            m: 64,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Operator {
    pub eps: f64,
    /// Defaults to the per-dimension direction count.
    pub n_dir: Option<usize>,
    pub panels_per_decade: usize,
    pub grad_tol: f64,
}

impl Default for Operator {
    fn default() -> Self {
        Self {
            eps: 0.1,
            n_dir: None,
            panels_per_decade: 16,
            grad_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scheme {
    pub theta: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    /// Snapshot times; empty means `[0, T]`.
    pub snapshots: Vec<f64>,
    /// Value outside the grid box; defaults to the datum's far field, or 0.
    pub far_field: Option<f64>,
    pub gradient_candidates: bool,
}

impl Default for Scheme {
    fn default() -> Self {
        Self {
            theta: 0.5,
            t_end: 0.25,
            snapshots: Vec::new(),
            far_field: None,
            gradient_candidates: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Run {
    pub seed: u64,
    /// Worker threads; unset uses every core.
    pub threads: Option<usize>,
}

impl Default for Run {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, threads: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Verify {
    pub suite: String,
    pub quick: bool,
    pub probes: usize,
}

impl Default for Verify {
    fn default() -> Self {
        Self {
            suite: "all".into(),
            quick: false,
            probes: 100,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Kernel {
    pub r_max: f64,
    pub dr: f64,
}

impl Default for Kernel {
    fn default() -> Self {
        Self {
            r_max: DEFAULT_R_MAX,
            dr: DEFAULT_DR,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpEval {
    /// Evaluation points; empty means the origin and two points on the x₁ axis.
    pub points: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub problem: Problem,
    pub datum: DatumParams,
    pub operator: Operator,
    pub scheme: Scheme,
    pub output: Output,
    pub run: Run,
    pub verify: Verify,
    pub kernel: Kernel,
    pub op_eval: OpEval,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub s: Option<f64>,
    pub eps: Option<f64>,
    pub theta: Option<f64>,
    pub t_end: Option<f64>,
    pub dim: Option<usize>,
    pub datum: Option<String>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub suite: Option<String>,
    pub quick: bool,
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    /// Builds the configuration for `command`: file (if any), then flags,
    /// then validation.
    pub fn resolve(command: Command, file: Option<&Path>, o: &Overrides) -> Result<Self, ConfigError> {
        let mut cfg = match file {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(c) = cfg.command {
            if c != command {
                return Err(invalid(
                    "command",
                    format!("file names {:?} but {:?} was requested", c.name(), command.name()),
                ));
            }
        }
        cfg.command = Some(command);
        cfg.apply(o);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.s {
            self.problem.s = v;
        }
        if let Some(v) = o.eps {
            self.operator.eps = v;
        }
        if let Some(v) = o.theta {
            self.scheme.theta = v;
        }
        if let Some(v) = o.t_end {
            self.scheme.t_end = v;
        }
        if let Some(v) = o.dim {
            self.problem.dim = v;
        }
        if let Some(v) = &o.datum {
            self.problem.datum = v.clone();
        }
        if let Some(v) = &o.out {
            self.output.dir = v.clone();
        }
        if o.threads.is_some() {
            self.run.threads = o.threads;
        }
        if let Some(v) = o.seed {
            self.run.seed = v;
        }
        if let Some(v) = &o.suite {
            self.verify.suite = v.clone();
        }
        if o.quick {
            self.verify.quick = true;
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.problem;
        ifl_core::check_order(p.s).map_err(|e| invalid("problem.s", e.to_string()))?;
        if !(1..=8).contains(&p.dim) {
            return Err(invalid("problem.dim", format!("must lie in 1..=8, got {}", p.dim)));
        }
        if !(p.lo.is_finite() && p.hi.is_finite() && p.lo < p.hi) {
            return Err(invalid("problem.lo", format!("need finite lo < hi, got [{}, {}]", p.lo, p.hi)));
        }
        if p.m < 2 {
            return Err(invalid("problem.m", format!("need at least 2 nodes per axis, got {}", p.m)));
        }
        catalog::datum(&p.datum, p.dim, &self.datum).map_err(|e| invalid("problem.datum", e.to_string()))?;

        let op = &self.operator;
        if !(op.eps > 0.0 && op.eps.is_finite()) {
            return Err(invalid("operator.eps", format!("must be positive, got {}", op.eps)));
        }
        if let Some(n) = op.n_dir {
            DirectionSet::new(p.dim, n).map_err(|e| invalid("operator.n_dir", e.to_string()))?;
        }
        if op.panels_per_decade == 0 {
            return Err(invalid("operator.panels_per_decade", "must be positive"));
        }
        if !(op.grad_tol > 0.0 && op.grad_tol.is_finite()) {
            return Err(invalid("operator.grad_tol", format!("must be positive, got {}", op.grad_tol)));
        }

        let sc = &self.scheme;
        if !(sc.theta > 0.0 && sc.theta <= 1.0) {
            return Err(invalid(
                "scheme.theta",
                format!("must lie in (0, 1] so that tau satisfies the CFL condition, got {}", sc.theta),
            ));
        }
        if !(sc.t_end >= 0.0 && sc.t_end.is_finite()) {
            return Err(invalid("scheme.T", format!("must be finite and non-negative, got {}", sc.t_end)));
        }
        if let Some(t) = sc.snapshots.iter().find(|t| !(**t >= 0.0 && **t <= sc.t_end)) {
            return Err(invalid("scheme.snapshots", format!("time {t} lies outside [0, {}]", sc.t_end)));
        }
        if let Some(c) = sc.far_field {
            if !c.is_finite() {
                return Err(invalid("scheme.far_field", "must be finite"));
            }
        }

        let v = &self.verify;
        if v.suite != "all" && !SUITES.contains(&v.suite.as_str()) {
            return Err(invalid(
                "verify.suite",
                format!("unknown suite {:?}; known: all, {}", v.suite, SUITES.join(", ")),
            ));
        }
        let k = &self.kernel;
        if !(k.r_max > 0.0 && k.dr > 0.0 && k.dr < k.r_max) {
            return Err(invalid("kernel.dr", format!("need 0 < dr < r_max, got dr {} r_max {}", k.dr, k.r_max)));
        }
        if let Some(pt) = self.op_eval.points.iter().find(|pt| pt.len() != p.dim) {
            return Err(invalid(
                "op_eval.points",
                format!("point {pt:?} has {} coordinates, expected {}", pt.len(), p.dim),
            ));
        }
        if self.run.threads == Some(0) {
            return Err(invalid("run.threads", "must be at least 1"));
        }
        Ok(())
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        if self.scheme.snapshots.is_empty() {
            if self.scheme.t_end == 0.0 {
                vec![0.0]
            } else {
                vec![0.0, self.scheme.t_end]
            }
        } else {
            self.scheme.snapshots.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::from_toml(text, Path::new("test.toml"))
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse("[scheme]\nT = 0.5\n").unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.scheme.t_end, 0.5);
        assert_eq!(cfg.problem.s, 0.75);
        assert_eq!(cfg.snapshot_times(), vec![0.0, 0.5]);
    }

    #[test]
    fn unknown_key_names_its_location() {
        let err = parse("[operator]\nepsilon = 0.1\n").unwrap_err().to_string();
        assert!(err.contains("epsilon"), "{err}");
        assert!(err.contains("line 2") || err.contains("2:"), "{err}");
    }

    #[test]
    fn order_outside_range_rejected() {
        let mut cfg = RunConfig::default();
        cfg.problem.s = 0.4;
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("s must lie in (1/2,1)"), "{err}");
    }

    #[test]
    fn theta_above_one_rejected() {
        let o = Overrides {
            theta: Some(1.5),
            ..Overrides::default()
        };
        let err = RunConfig::resolve(Command::Evolve, None, &o).unwrap_err().to_string();
        assert!(err.starts_with("scheme.theta"), "{err}");
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "[problem]\ns = 0.6\ndatum = \"indicator\"\n").unwrap();
        let o = Overrides {
            s: Some(0.8),
            ..Overrides::default()
        };
        let cfg = RunConfig::resolve(Command::OpEval, Some(&path), &o).unwrap();
        assert_eq!(cfg.problem.s, 0.8);
        assert_eq!(cfg.problem.datum, "indicator");
    }

    #[test]
    fn mismatched_command_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "command = \"kernel\"\n").unwrap();
        assert!(RunConfig::resolve(Command::Evolve, Some(&path), &Overrides::default()).is_err());
    }

    #[test]
    fn unknown_datum_and_suite_rejected() {
        let mut cfg = RunConfig::default();
        cfg.problem.datum = "square".into();
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.verify.suite = "everything".into();
        assert!(cfg.validate().is_err());
    }
}
