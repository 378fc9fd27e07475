use std::path::{Path, PathBuf};
use std::process::Command;

use chauffeur::cli::{main_with_args, ScenarioFile};

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/5v5_reference.json")
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("chauffeur").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn scenario_round_trip_is_idempotent() {
    let text = std::fs::read_to_string(bundled()).unwrap();
    let parsed = ScenarioFile::parse(&text).unwrap();
    let once = parsed.to_json();
    assert_eq!(once, text);
    let again = ScenarioFile::parse(&once).unwrap().to_json();
    assert_eq!(again, once);
    let sc = parsed.to_scenario().unwrap();
    assert_eq!(ScenarioFile::from_scenario(&sc).to_json(), once);
}

#[test]
fn malformed_scenario_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        "{\"goal\": \"half_plane_y_leq_0\", \"pursuers\": [], \"evaders\": [], \"extra\": 1}",
    )
    .unwrap();
    let (code, _, err) = call(&["certify", "--scenario", path_str(&bad), "--all"]);
    assert_eq!(code, 1);
    assert!(err.contains("malformed scenario"), "{err}");
}

#[test]
fn run_bundled_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let ev = dir.path().join("events.jsonl");
    let (code, out, err) = call(&[
        "run",
        "--scenario",
        path_str(&bundled()),
        "--out",
        path_str(&csv),
        "--events-out",
        path_str(&ev),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("captures=5"), "{out}");
    assert!(out.contains("goal_arrivals=0"), "{out}");
    let traj = std::fs::read_to_string(&csv).unwrap();
    let mut lines = traj.lines();
    assert_eq!(lines.next().unwrap(), chauffeur::cli::TRAJECTORY_HEADER);
    assert!(lines.count() > 1000);
    let events = std::fs::read_to_string(&ev).unwrap();
    let captures = events
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|v| v["kind"] == "capture")
        .count();
    assert_eq!(captures, 5);
}

#[test]
fn run_rejects_zero_dt() {
    let (code, _, err) = call(&["run", "--scenario", path_str(&bundled()), "--dt", "0"]);
    assert_eq!(code, 1);
    assert!(err.contains("dt must be positive"), "{err}");
}

#[test]
fn run_reports_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = call(&[
        "run",
        "--scenario",
        path_str(&bundled()),
        "--max-time",
        "0.1",
        "--out",
        path_str(&dir.path().join("t.csv")),
        "--events-out",
        path_str(&dir.path().join("e.jsonl")),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("horizon"));
}

#[test]
fn certify_all_pairs() {
    let (code, out, _) = call(&["certify", "--scenario", path_str(&bundled()), "--all"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 25);
    let wins: Vec<&str> = lines.iter().copied().filter(|l| !l.contains("kind=None")).collect();
    assert_eq!(wins.len(), 4);
    for (pair, kind) in [
        ("1,4", "Theorem5"),
        ("3,3", "Theorem2"),
        ("4,2", "Theorem2"),
        ("5,1", "Theorem5"),
    ] {
        assert!(
            wins.iter().any(|l| l.contains(&format!("pair={pair} kind={kind}"))),
            "{pair}"
        );
    }
    let t5 = wins.iter().find(|l| l.contains("pair=1,4")).unwrap();
    assert!(!t5.contains("delta=-") && !t5.contains("rho_hat=-"));
}

#[test]
fn certify_single_and_out_of_range() {
    let (code, out, _) = call(&["certify", "--scenario", path_str(&bundled()), "--pair", "3,3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("pair=3,3 kind=Theorem2"));
    assert!(out.contains("region=IV"));
    let (code, _, err) = call(&["certify", "--scenario", path_str(&bundled()), "--pair", "6,1"]);
    assert_eq!(code, 1);
    assert!(err.contains("out of range"));
    let (code, _, _) = call(&["certify", "--scenario", path_str(&bundled())]);
    assert_eq!(code, 1);
}

#[test]
fn sweep_regions_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let (code, _, _) = call(&[
        "sweep-regions",
        "--alpha-min",
        "1.2",
        "--alpha-max",
        "7",
        "--samples",
        "30",
        "--out",
        path_str(&out_path),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# alpha0=1.4655712"));
    assert_eq!(lines.next().unwrap(), "alpha,h_alpha,h_bar,eq15_rhs");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 30);
    for r in &rows {
        assert!(r[1] <= r[2] + 1e-9);
    }
    let (code, _, _) = call(&["sweep-regions", "--alpha-min", "0.5"]);
    assert_eq!(code, 1);
}

#[test]
fn oracle_compare_small() {
    let (code, out, err) = call(&["oracle-compare", "--trials", "3", "--seed", "5", "--grid", "180"]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("trials=3 violations=0"));
    let (again, _, _) = call(&["oracle-compare", "--trials", "3", "--seed", "5", "--grid", "180"]);
    assert_eq!(again, code);
    let (code, _, _) = call(&["oracle-compare", "--trials", "0"]);
    assert_eq!(code, 1);
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_chauffeur"))
        .args(["certify", "--scenario", path_str(&bundled()), "--pair", "1,4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("kind=Theorem5"));
}
