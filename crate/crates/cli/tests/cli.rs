use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ifl_core::catalog::{self, DatumParams};
use ifl_core::io::load_grid;
use ifl_core::GridSpec;

fn ifl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifl")).args(args).output().expect("binary runs")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).expect("JSON error line");
    serde_json::from_str(line).unwrap()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn kernel_table_is_strictly_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let out = ifl(&["kernel", "--s", "0.75", "--out", path_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("kernel_profile.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,profile"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(values.len() > 1000);
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("kernel.json")).unwrap()).unwrap();
    assert_eq!(meta["pass"], true);
    assert_eq!(meta["config"]["problem"]["s"], 0.75);
}

#[test]
fn zero_horizon_writes_the_datum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[problem]\ndatum = \"tilted\"\nm = 17\nlo = -3.0\nhi = 3.0\n").unwrap();
    let out = ifl(&["evolve", "--config", path_arg(&cfg), "--T", "0", "--out", path_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let snaps: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".csv"))
        .collect();
    assert_eq!(snaps.len(), 1);
    let u = load_grid(&dir.path().join("snapshot_000.csv")).unwrap();
    let spec = GridSpec::cube(2, -3.0, 3.0, 17).unwrap();
    let u0 = catalog::datum("tilted", 2, &DatumParams::default()).unwrap();
    for (flat, v) in u.values().iter().enumerate() {
        assert_eq!(*v, u0.eval(&spec.node_flat(flat)));
    }
}

#[test]
fn order_below_one_half_is_a_config_error() {
    let out = ifl(&["evolve", "--s", "0.4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["exit_code"], 2);
    assert!(err["error"]["message"].as_str().unwrap().contains("s must lie in (1/2,1)"));
}

#[test]
fn theta_above_cfl_is_rejected() {
    let out = ifl(&["evolve", "--theta", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["error"]["message"].as_str().unwrap().contains("scheme.theta"));
}

#[test]
fn unknown_key_and_datum_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[scheme]\ntheta = 0.5\nsteps = 4\n").unwrap();
    let out = ifl(&["evolve", "--config", path_arg(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["error"]["message"].as_str().unwrap().contains("steps"));

    let out = ifl(&["op-eval", "--datum", "square"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(ifl(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn evolve_is_deterministic_and_bounded() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = a.path().join("run.toml");
    fs::write(
        &cfg,
        "[problem]\ndatum = \"ghp-bump\"\nm = 16\nlo = -3.0\nhi = 3.0\n[operator]\neps = 0.3\nn_dir = 16\n[scheme]\nT = 0.1\nsnapshots = [0.0, 0.05, 0.1]\n",
    )
    .unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "2")] {
        let out = ifl(&["evolve", "--config", path_arg(&cfg), "--threads", threads, "--out", path_arg(dir.path())]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for i in 0..3 {
        let name = format!("snapshot_{i:03}.csv");
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.path().join("evolve.json")).unwrap()).unwrap();
    assert_eq!(meta["result"]["checks"][0]["pass"], true);
    assert_eq!(meta["result"]["snapshots"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_closed_forms_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ifl(&["verify", "closed-forms", "--out", path_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report_closed-forms.json")).unwrap()).unwrap();
    assert!(report["records"].as_array().unwrap().iter().all(|r| r["pass"] == true));
    assert!(ifl(&["verify", "nonsense"]).status.code() == Some(2));
}

#[test]
fn op_eval_reports_ordered_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let out = ifl(&["op-eval", "--datum", "tilted", "--out", path_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("op-eval.json")).unwrap()).unwrap();
    for p in meta["result"]["points"].as_array().unwrap() {
        assert_eq!(p["ordered"], true);
        assert!(p["ifl_minus"].as_f64().unwrap() <= p["ifl_plus"].as_f64().unwrap() + 1e-8);
    }
}
