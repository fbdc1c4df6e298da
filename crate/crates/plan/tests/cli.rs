use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

const GOLDEN_OBJECTIVE: f64 = 88142319.5489999;
const GOLDEN_PER_UE: [f64; 5] =
    [45964800.0, 42177519.5489999, 34915639.9900963, 32473264.762310505, 20295218.12408234];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn plan_with_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_miab-plan"));
    cmd.args(args).env_remove("MIAB_PLAN_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn plan(args: &[&str]) -> Run {
    plan_with_env(args, &[])
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn evaluate_reproduces_golden_values() {
    let r = plan(&["evaluate", path(&fixture("golden_v0.json")), path(&fixture("golden_v0_assignment.json"))]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let doc = r.json();
    let e = &doc["evaluation"];
    assert!(rel_close(e["objective_bps"].as_f64().unwrap(), GOLDEN_OBJECTIVE, 1e-9));
    let caps: Vec<f64> = e["ues"].as_array().unwrap().iter().map(|u| u["capacity_bps"].as_f64().unwrap()).collect();
    for (got, want) in caps.iter().zip(GOLDEN_PER_UE) {
        assert!(rel_close(*got, want, 1e-9), "{got} vs {want}");
    }
    assert_eq!(e["feasible"], Value::Bool(true));
    assert_eq!(doc["manifest"]["run"]["command"], "evaluate");
}

#[test]
fn missing_ue_is_an_input_error_naming_the_ue() {
    let r = plan(&["evaluate", path(&fixture("golden_v0.json")), path(&fixture("missing_ue_assignment.json"))]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("UE 4"), "{}", r.stderr);
}

#[test]
fn backhaul_overload_exits_infeasible() {
    let r = plan(&["evaluate", path(&fixture("golden_miab.json")), path(&fixture("overload_assignment.json"))]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    let doc = r.json();
    assert!(doc["evaluation"]["violations"]["backhaul_deficit_bps"].as_f64().unwrap() > 0.0);
    assert!(doc["evaluation"]["backhauls"][0]["deficit_bps"].as_f64().unwrap() > 0.0);
}

#[test]
fn unknown_field_reports_location() {
    let r = plan(&["evaluate", path(&fixture("unknown_field.json")), path(&fixture("golden_v0_assignment.json"))]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("colour"), "{}", r.stderr);
    assert!(r.stderr.contains("line"), "{}", r.stderr);
}

#[test]
fn malformed_arguments_exit_two() {
    assert_eq!(plan(&["solve"]).code, 2);
    assert_eq!(plan(&["frobnicate"]).code, 2);
}

#[test]
fn solve_is_deterministic_per_seed() {
    let sc = fixture("desk.json");
    let args = ["solve", path(&sc), "--seed", "11", "--generations", "20"];
    let a = plan(&args);
    let b = plan(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);

    let env = plan_with_env(&["solve", path(&sc), "--generations", "20"], &[("MIAB_PLAN_SEED", "11")]);
    assert_eq!(env.stdout, a.stdout);
    let flag_wins = plan_with_env(&args, &[("MIAB_PLAN_SEED", "12")]);
    assert_eq!(flag_wins.stdout, a.stdout);
}

#[test]
fn more_generations_never_hurt() {
    let sc = fixture("desk.json");
    let objective = |g: &str| {
        let r = plan(&["solve", path(&sc), "--seed", "3", "--generations", g]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        r.json()["evaluation"]["objective_bps"].as_f64().unwrap()
    };
    assert!(objective("200") >= objective("1"));
}

#[test]
fn solve_writes_monotone_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let r = plan(&["solve", path(&fixture("desk.json")), "--generations", "15", "--trace", path(&trace)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("generation,best_objective_bps,feasible_fraction"));
    let best: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(best.len(), 15);
    assert!(best.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn solve_corner_scenario_lands_near_oracle_optimum() {
    let sc = fixture("corner_los.json");
    let oracle = plan(&["oracle", path(&sc), "--grid-step", "1"]);
    assert_eq!(oracle.code, 0, "{}", oracle.stderr);
    let pos = |doc: &Value| {
        let p = &doc["best_assignment"]["miab_positions"][0];
        (p[0].as_f64().unwrap(), p[1].as_f64().unwrap())
    };
    let (ox, oy) = pos(&oracle.json());
    let solved = plan(&["solve", path(&sc), "--seed", "0"]);
    assert_eq!(solved.code, 0, "{}", solved.stderr);
    let (gx, gy) = pos(&solved.json());
    assert!(((gx - ox).powi(2) + (gy - oy).powi(2)).sqrt() <= 10.0, "({gx}, {gy}) vs ({ox}, {oy})");
}

#[test]
fn oracle_without_miab_matches_evaluate() {
    let sc = fixture("golden_v0.json");
    let oracle = plan(&["oracle", path(&sc)]);
    assert_eq!(oracle.code, 0, "{}", oracle.stderr);
    let doc = oracle.json();
    assert!(doc["tie_break"].is_string());
    let evaluated = plan(&["evaluate", path(&sc), path(&fixture("golden_v0_assignment.json"))]).json();
    assert_eq!(doc["evaluation"], evaluated["evaluation"]);
}

#[test]
fn oracle_refuses_oversized_enumeration() {
    let r = plan(&["oracle", path(&fixture("golden_miab.json")), "--grid-step", "1"]);
    assert_eq!(r.code, 5);
    assert!(r.stderr.contains("10000000"), "{}", r.stderr);
}

#[test]
fn oracle_refinement_never_decreases_objective() {
    let sc = fixture("desk.json");
    let objective = |step: &str| {
        let r = plan(&["oracle", path(&sc), "--grid-step", step]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        r.json()["evaluation"]["objective_bps"].as_f64().unwrap()
    };
    assert!(objective("10") >= objective("20"));
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const CAMPAIGN_FILES: [&str; 8] = [
    "records.csv",
    "cdf_V0.csv",
    "cdf_V1.csv",
    "cdf_V2.csv",
    "cdf_V3.csv",
    "cdf_V4.csv",
    "cdf_V5.csv",
    "campaign.json",
];

fn campaign(dir: &Path, extra: &[&str]) -> Run {
    let mut args = vec!["campaign", "--out-dir", path(dir), "--generations", "10"];
    args.extend_from_slice(extra);
    plan(&args)
}

#[test]
fn campaign_writes_one_row_per_run_and_replays_identically() {
    let first = tempfile::tempdir().unwrap();
    let again = tempfile::tempdir().unwrap();
    let r = campaign(first.path(), &["--seed", "5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(campaign(again.path(), &["--seed", "5"]).code, 0);

    let records = read(first.path(), "records.csv");
    assert_eq!(records.lines().count(), 1 + 150);
    for f in CAMPAIGN_FILES {
        assert_eq!(read(first.path(), f), read(again.path(), f), "{f}");
    }

    for v in 0..6 {
        let cdf = read(first.path(), &format!("cdf_V{v}.csv"));
        let rows: Vec<(f64, f64)> = cdf
            .lines()
            .skip(1)
            .map(|l| {
                let (a, b) = l.split_once(',').unwrap();
                (a.parse().unwrap(), b.parse().unwrap())
            })
            .collect();
        assert!(rows.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1), "V{v}");
        if let Some(last) = rows.last() {
            assert_eq!(last.1, 1.0);
        }
    }

    let doc: Value = serde_json::from_str(&read(first.path(), "campaign.json")).unwrap();
    assert_eq!(doc["records"], 150);
    assert_eq!(doc["manifest"]["master_seed"], 5);
}

#[test]
fn campaign_replays_from_its_manifest_with_any_worker_count() {
    let base = tempfile::tempdir().unwrap();
    let r = campaign(base.path(), &["--seed", "9", "--scenarios-per-area", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let manifest = base.path().join("campaign.json");
    for workers in ["1", "3"] {
        let out = tempfile::tempdir().unwrap();
        let r = plan(&["--workers", workers, "campaign", "--manifest", path(&manifest), "--out-dir", path(out.path())]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        for f in CAMPAIGN_FILES {
            assert_eq!(read(base.path(), f), read(out.path(), f), "{f} with {workers} workers");
        }
    }
}

#[test]
fn solve_replays_from_its_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.json");
    let r = plan(&["solve", path(&fixture("desk.json")), "--seed", "4", "--generations", "10", "--out", path(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let again = plan(&["solve", "--manifest", path(&out)]);
    assert_eq!(again.code, 0, "{}", again.stderr);
    assert_eq!(again.stdout, std::fs::read_to_string(&out).unwrap());
}

#[test]
fn schema_is_printed_for_every_document() {
    for kind in ["scenario", "assignment", "campaign", "ga", "manifest"] {
        let r = plan(&["schema", kind]);
        assert_eq!(r.code, 0);
        let doc = r.json();
        assert!(doc["$schema"].is_string(), "{kind}");
    }
    let scenario = plan(&["schema"]).json();
    assert!(scenario["properties"]["special_team"].is_object());
}
