use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freezetag"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const LSHAPE: &str = r#"{"version":1,"outer":[[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]],"holes":[],"robots":[[1.5,0.5],[0.5,1.5],[0.2,0.2]],"source":0}"#;

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("l.json");
    std::fs::write(&inst, LSHAPE).unwrap();
    for algo in ["cfa", "ptas", "exact"] {
        let out = dir.path().join(format!("{algo}.json"));
        let res = run(&["solve", s(&inst), "--algo", algo, "--out", s(&out)]);
        assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
        let summary: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
        assert!(summary["makespan_all"].as_f64().unwrap() > 0.0);
        let res = run(&["verify", s(&inst), s(&out)]);
        assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    }
}

#[test]
fn tampered_schedule_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("l.json");
    std::fs::write(&inst, LSHAPE).unwrap();
    let out = dir.path().join("s.json");
    assert!(run(&["solve", s(&inst), "--out", s(&out)]).status.success());
    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    v["wake_times"]["1"] = serde_json::json!(0.001);
    std::fs::write(&out, v.to_string()).unwrap();
    let res = run(&["verify", s(&inst), s(&out)]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn exact_size_cap() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("big.json");
    let res = run(&[
        "gen",
        "--seed",
        "3",
        "--n",
        "9",
        "--profile",
        "convex",
        "--out",
        s(&inst),
    ]);
    assert!(res.status.success());
    let res = run(&["solve", s(&inst), "--algo", "exact"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("size cap"));
}

#[test]
fn usage_and_validation_codes() {
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "x.json", "--algo", "magic"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"version":1,"outer":[[0,0],[4,0],[4,4],[0,4]],"holes":[[[1,1],[2,1],[2,2],[1,2]]],"robots":[[0.5,0.5]],"source":0}"#,
    )
    .unwrap();
    let res = run(&["solve", s(&bad)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("hole-orientation"));
}

#[test]
fn render_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("l.json");
    std::fs::write(&inst, LSHAPE).unwrap();
    let sched = dir.path().join("s.json");
    assert!(run(&["solve", s(&inst), "--out", s(&sched)]).status.success());
    let res = run(&[
        "render",
        s(&inst),
        "--schedule",
        s(&sched),
        "--spanner",
        "--path",
        "0",
        "1",
    ]);
    assert!(res.status.success());
    let svg = String::from_utf8(res.stdout).unwrap();
    assert_eq!(svg.matches("marker-end=").count(), 3);
    assert_eq!(svg.matches("class=\"geodesic\"").count(), 1);

    let res = run(&["stats", s(&inst)]);
    assert!(res.status.success());
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(v["reflex_vertices"], 1);
    assert_eq!(v["steiner_robots"], 1);
    let k = v["spanner"]["k_measured"].as_f64().unwrap();
    let bound = 6.0 * (2.0 * k - 1.0) * v["diameter"].as_f64().unwrap();
    assert!(v["cfa"]["makespan_all"].as_f64().unwrap() <= bound + 1e-9);
}
