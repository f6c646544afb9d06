use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn rsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    std::fs::write(&p, text).unwrap();
    p
}

fn objective(json: &str) -> u64 {
    let v: Value = serde_json::from_str(json).unwrap();
    v["objective"].as_u64().unwrap()
}

#[test]
fn solve_fig1_exact_and_greedy() {
    for solver in ["exact", "mlf", "relaxed", "brute"] {
        let out = rsep(&["solve", "--scenario", "fig1", "--solver", solver]);
        assert_eq!(out.status.code(), Some(0), "{solver}: {}", stderr(&out));
        assert_eq!(objective(&stdout(&out)), 16, "{solver}");
    }
}

#[test]
fn result_json_layout() {
    let out = rsep(&["solve", "--scenario", "fig1", "--solver", "mlf"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["solver", "objective", "certified", "elapsed_ms", "allocation"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["solver"], "mlf");
    assert_eq!(v["allocation"].as_array().unwrap().len(), 2);
}

#[test]
fn overloaded_instance_exits_2() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "over.json", r#"{"M":1,"B":2,"N_RB":1,"T":2,"Y":[[0,1],[1,0]],"L":[[3,1]]}"#);
    let out = rsep(&["solve", "--instance", &inst]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("BS 0"));
}

#[test]
fn malformed_json_exits_1_with_position() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "bad.json", "{\"M\": 1,\n \"B\": oops}");
    let out = rsep(&["solve", "--instance", &inst]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bad.json:2:"), "{}", stderr(&out));
}

#[test]
fn asymmetric_adjacency_exits_1() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "asym.json", r#"{"M":1,"B":2,"N_RB":1,"T":2,"Y":[[0,1],[0,0]],"L":[[1,1]]}"#);
    let out = rsep(&["solve", "--instance", &inst]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("symmetric"), "{}", stderr(&out));
}

#[test]
fn unknown_scenario_exits_1() {
    let out = rsep(&["solve", "--scenario", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("fig1"));
}

#[test]
fn exhausted_budget_exits_3_and_writes_incumbent() {
    let dir = TempDir::new().unwrap();
    let mut hit = 0;
    for seed in 0..10 {
        let inst = path(&dir, &format!("i{seed}.json"));
        let seed = seed.to_string();
        let gen = rsep(&["gen", "-m", "4", "-b", "4", "--n-rb", "2", "--n-sf", "3", "--seed", &seed, "--out", &inst]);
        assert_eq!(gen.status.code(), Some(0));
        let res = path(&dir, "res.json");
        let out = rsep(&["solve", "--instance", &inst, "--node-budget", "3", "--out", &res]);
        match out.status.code() {
            Some(3) => {
                hit += 1;
                let text = std::fs::read_to_string(&res).unwrap();
                let v: Value = serde_json::from_str(&text).unwrap();
                assert_eq!(v["certified"], false);
                let check = rsep(&["validate", "--instance", &inst, "--allocation", &res]);
                assert_eq!(check.status.code(), Some(0));
            }
            Some(0) => {}
            other => panic!("unexpected exit {other:?}: {}", stderr(&out)),
        }
    }
    assert!(hit > 0);
}

#[test]
fn validate_misaligned_fig1() {
    let dir = TempDir::new().unwrap();
    let first = "[0,0,0,0,1,1,1,1,1,1,1,1,2,2,2,2]";
    let second = "[2,2,2,2,0,0,0,0,1,1,1,1,1,1,1,1]";
    let alloc = write(&dir, "a.json", &format!("[{first},{second}]"));
    let out = rsep(&["validate", "--scenario", "fig1", "--allocation", &alloc]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("linked RBs: 4"), "{}", stdout(&out));
}

#[test]
fn validate_overlap_exits_4() {
    let dir = TempDir::new().unwrap();
    let row = "[[0,1],0,0,0,1,1,1,1,1,1,1,1,2,2,2,2]";
    let alloc = write(&dir, "a.json", &format!("[{row},{row}]"));
    let out = rsep(&["validate", "--scenario", "fig1", "--allocation", &alloc]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("(b=0, n=0, t=0)"), "{}", stdout(&out));
}

#[test]
fn validate_wrong_shape_exits_1() {
    let dir = TempDir::new().unwrap();
    let alloc = write(&dir, "a.json", "[[0,0],[0,0]]");
    let out = rsep(&["validate", "--scenario", "fig1", "--allocation", &alloc]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_solve_validate_round_trip() {
    let dir = TempDir::new().unwrap();
    for seed in 0..4 {
        let inst = path(&dir, "inst.json");
        let s = seed.to_string();
        let gen = rsep(&["gen", "-m", "3", "-b", "3", "--n-rb", "2", "--n-sf", "3", "--load", "0.8", "--seed", &s, "--out", &inst]);
        assert_eq!(gen.status.code(), Some(0));
        for solver in ["exact", "relaxed", "mlf"] {
            let res = path(&dir, "res.json");
            let solve = rsep(&["solve", "--instance", &inst, "--solver", solver, "--seed", &s, "--out", &res]);
            assert_eq!(solve.status.code(), Some(0), "{}", stderr(&solve));
            let expected = objective(&std::fs::read_to_string(&res).unwrap());
            let check = rsep(&["validate", "--instance", &inst, "--allocation", &res]);
            assert_eq!(check.status.code(), Some(0));
            assert!(stdout(&check).contains(&format!("linked RBs: {expected}")));
        }
    }
}

#[test]
fn solve_is_deterministic() {
    let a = rsep(&["solve", "--scenario", "appendix_shape", "--solver", "relaxed", "--seed", "5"]);
    let b = rsep(&["solve", "--scenario", "appendix_shape", "--solver", "relaxed", "--seed", "5"]);
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_str(&stdout(o)).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn sweep_writes_records_and_summary() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", r#"{"m": 2, "b": 2, "n_rb": 2, "n_sf": 2}"#);
    let out_csv = path(&dir, "records.csv");
    let summary = path(&dir, "summary.csv");
    let out = rsep(&[
        "sweep", "--spec", &spec, "--sweep-m", "2..3", "--sweep-b", "2..3", "--reps", "2", "--aggregate",
        "--out", &out_csv, "--summary", &summary,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), rsep_core::bench::CSV_HEADER);
    // 4 cells × 2 reps × 2 reduction settings × 3 solvers
    assert_eq!(lines.count(), 48);
    let summary_text = std::fs::read_to_string(&summary).unwrap();
    assert!(summary_text.starts_with("m,b,series,metric,mean,std,count"));
    assert!(Path::new(&summary).exists());
}

#[test]
fn sweep_rejects_bad_range() {
    let out = rsep(&["sweep", "--sweep-m", "5..2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn aggregate_maps_an_optimal_solution() {
    let dir = TempDir::new().unwrap();
    let res = path(&dir, "res.json");
    let solve = rsep(&["solve", "--scenario", "appendix_shape", "--out", &res]);
    assert_eq!(solve.status.code(), Some(0));
    let out = rsep(&["aggregate", "--scenario", "appendix_shape", "--allocation", &res]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["k"], 2);
    assert_eq!(v["links"].as_u64().unwrap(), 2 * v["aggregated_links"].as_u64().unwrap());
}

#[test]
fn aggregate_reports_non_aggregable() {
    let out = rsep(&["aggregate", "--scenario", "fig1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["aggregable"], true);
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", r#"{"M":2,"B":2,"N_RB":1,"T":3,"Y":[[0,1],[1,0]],"L":[[1,2],[2,1]]}"#);
    let out = rsep(&["aggregate", "--instance", &inst]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["aggregable"], false);
}
