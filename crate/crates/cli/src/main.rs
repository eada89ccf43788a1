//! `ifl`: command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 on a check failure, 2 on usage
//! or configuration errors, 3 when the numerics abort. Errors are printed
//! to stderr as one JSON object.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use config::{Command, ConfigError, Overrides, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] ifl_core::Error),
    #[error("cannot start the worker pool: {0}")]
    Threads(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Threads(_) => "usage",
            Self::Core(e) if is_numerical(e) => "numerical",
            Self::Core(ifl_core::Error::Io(_)) => "io",
            Self::Core(_) => "invalid",
        }
    }

    fn exit_code(&self) -> u8 {
        if self.kind() == "numerical" {
            3
        } else {
            2
        }
    }
}

fn is_numerical(e: &ifl_core::Error) -> bool {
    use ifl_core::Error as E;
    matches!(
        e,
        E::NonFinite { .. }
            | E::BoundExceeded { .. }
            | E::NonFiniteRay { .. }
            | E::NotC11 { .. }
            | E::SchemeAbort { .. }
            | E::NegativeProfile { .. }
    )
}

#[derive(Debug, Parser)]
#[command(name = "ifl", version, about = "Solver and verification harness for the parabolic infinity fractional Laplacian")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate the operator, its one-sided variants and L_ε at points.
    OpEval,
    /// Run the explicit scheme and write snapshot CSVs.
    Evolve,
    /// Tabulate the self-similar profile of the 1D fractional heat kernel.
    Kernel,
    /// Run a verification suite (`all` runs every suite).
    Verify {
        /// Suite name; overrides --suite.
        suite: Option<String>,
    },
    /// Evolve a datum and measure the two-sided kernel bounds.
    Harnack,
}

#[derive(Debug, Args)]
struct Flags {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    s: Option<f64>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Final time.
    #[arg(long = "T", global = true)]
    t_end: Option<f64>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    datum: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Shrunken verification sizes.
    #[arg(long, global = true)]
    quick: bool,
}

fn report(err: &CliError) -> ExitCode {
    let code = err.exit_code();
    let body = json!({
        "error": { "kind": err.kind(), "message": err.to_string() },
        "exit_code": code,
    });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            if code != 0 {
                eprintln!("{}", json!({ "error": { "kind": "usage", "message": e.kind().to_string() }, "exit_code": 2 }));
            }
            return ExitCode::from(code);
        }
    };
    let f = cli.flags;
    let (command, suite) = match cli.command {
        Cmd::OpEval => (Command::OpEval, f.suite),
        Cmd::Evolve => (Command::Evolve, f.suite),
        Cmd::Kernel => (Command::Kernel, f.suite),
        Cmd::Verify { suite } => (Command::Verify, suite.or(f.suite)),
        Cmd::Harnack => (Command::Harnack, f.suite),
    };
    let overrides = Overrides {
        s: f.s,
        eps: f.eps,
        theta: f.theta,
        t_end: f.t_end,
        dim: f.dim,
        datum: f.datum,
        out: f.out,
        threads: f.threads,
        seed: f.seed,
        suite,
        quick: f.quick,
    };
    let cfg = match RunConfig::resolve(command, f.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => return report(&e.into()),
    };
    if let Some(n) = cfg.run.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return report(&CliError::Threads(e.to_string()));
        }
    }
    match commands::run(&cfg) {
        Ok(out) if out.pass => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("{}", json!({ "error": { "kind": "check", "message": "one or more checks failed" }, "exit_code": 1 }));
            ExitCode::from(1)
        }
        Err(e) => report(&e),
    }
}
