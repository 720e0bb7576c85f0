//! Golden cases and helpers for running the `rescue` binary.
#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn tehran() -> PathBuf {
    repo_root().join("scenarios/tehran")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn rescue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rescue"))
        .args(args)
        .current_dir(repo_root())
        .output()
        .expect("run rescue")
}

/// Drops search statistics, the only run-dependent stdout lines.
pub fn strip_stats(stdout: &str) -> String {
    stdout
        .lines()
        .filter(|l| !l.starts_with("expanded="))
        .map(|l| format!("{l}\n"))
        .collect()
}

pub const CRANE: &str = "at(crane_1,'Saadi Sq.')";
pub const TRUCK: &str = "at(truck_1,'Saadi Sq.')";

pub struct Case {
    pub golden: &'static str,
    pub args: Vec<String>,
    pub exit: i32,
}

fn case(golden: &'static str, exit: i32, args: &[&str]) -> Case {
    Case {
        golden,
        args: args.iter().map(|s| s.to_string()).collect(),
        exit,
    }
}

/// Every case runs from the repository root.
pub fn golden_cases() -> Vec<Case> {
    let s = "scenarios/tehran";
    let ev = |name: &str| format!("scenarios/tehran/events/{name}.facts");
    let (empty, second, cleared) = (ev("empty"), ev("second_edge_fire"), ev("fires_cleared"));
    vec![
        case("query_safe_area.out", 0, &["query", "--scenario", s, "--query", "safe_area(X)"]),
        case(
            "query_imam_safe.out",
            0,
            &["query", "--scenario", s, "--query", "safe_area('Imam Khomeini RIP Sq.')"],
        ),
        case(
            "query_unsafe_areas.out",
            0,
            &["query", "--scenario", s, "--query", "node(X), not safe_area(X)"],
        ),
        case("query_horr_safe.out", 0, &["query", "--scenario", s, "--query", "safe_area('Horr Sq.')"]),
        case("plan_crane.out", 0, &["plan", "--scenario", s, "--goal", CRANE]),
        case("plan_truck.out", 1, &["plan", "--scenario", s, "--goal", TRUCK]),
        case("plan_crane_depth1.out", 3, &["plan", "--scenario", s, "--goal", CRANE, "--max-depth", "1"]),
        case("plan_default_goal.out", 0, &["plan", "--scenario", s]),
        case(
            "plan_truck_fires_cleared.out",
            0,
            &["plan", "--scenario", s, "--goal", TRUCK, "--events", &cleared],
        ),
        case(
            "simulate_crane_empty.out",
            0,
            &["simulate", "--scenario", s, "--goal", CRANE, "--events", &empty],
        ),
        case(
            "simulate_crane_second_edge_fire.out",
            1,
            &["simulate", "--scenario", s, "--goal", CRANE, "--events", &second],
        ),
        case(
            "simulate_crane_fires_cleared.out",
            0,
            &["simulate", "--scenario", s, "--goal", CRANE, "--events", &cleared],
        ),
        case(
            "simulate_truck_fires_cleared.out",
            0,
            &["simulate", "--scenario", s, "--goal", TRUCK, "--events", &cleared],
        ),
    ]
}

/// Runs a case; returns a description of the mismatch, if any.
pub fn check_case(c: &Case) -> Result<(), String> {
    let args: Vec<&str> = c.args.iter().map(String::as_str).collect();
    let out = rescue(&args);
    let code = out.status.code().unwrap_or(-1);
    if code != c.exit {
        return Err(format!(
            "{}: exit {code}, expected {}\n{}",
            c.golden,
            c.exit,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let got = strip_stats(&String::from_utf8(out.stdout).map_err(|e| e.to_string())?);
    let path = golden_dir().join(c.golden);
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        std::fs::write(&path, &got).map_err(|e| e.to_string())?;
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if got != want {
        return Err(format!("{}: stdout differs\n--- want\n{want}--- got\n{got}", c.golden));
    }
    Ok(())
}
