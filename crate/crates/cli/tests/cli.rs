use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knn-lrta")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("m.map");
    let scen = dir.path().join("m.scen");
    let db = dir.path().join("m.db");
    let spec = dir.path().join("runs.toml");
    let report = dir.path().join("report.csv");

    ok(&["gen-map", "--width", "64", "--height", "64", "--room", "15", "--seed", "2", "--out", p(&map)]);
    ok(&["gen-problems", p(&map), "--count", "6", "--seed", "1", "--out", p(&scen)]);
    ok(&["build-db", p(&map), "--records", "40", "--seed", "5", "--out", p(&db)]);
    assert!(ok(&["validate-db", p(&map), p(&db)]).contains("0 violations"));

    for algo in ["astar", "lrta", "tba"] {
        let out = ok(&["solve", p(&map), p(&scen), "--algo", algo]);
        assert_eq!(out.lines().count(), 7, "{algo}: {out}");
    }
    let out = ok(&["solve", p(&map), p(&scen), "--algo", "knn", "--db", p(&db), "--paths"]);
    assert_eq!(out.lines().filter(|l| l.starts_with("path ")).count(), 6);
    // A* rows report zero suboptimality
    let astar = ok(&["solve", p(&map), p(&scen), "--algo", "astar"]);
    assert!(astar.lines().skip(1).all(|l| l.split(' ').nth(3) == Some("0.00")));

    std::fs::write(
        &spec,
        format!(
            "[[run]]\nalgo = \"astar\"\n\n[[run]]\nalgo = \"knn\"\nrecords = 10\n\n[[run]]\nalgo = \"knn\"\nrecords = 30\n\n\
             [[run]]\nalgo = \"knn\"\ndb = \"{}\"\nlabel = \"file\"\n\n[[run]]\nalgo = \"tba\"\nslice = 20\n",
            p(&db)
        ),
    )
    .unwrap();
    ok(&["bench", p(&map), p(&scen), "--spec", p(&spec), "--out", p(&report)]);
    let rows = std::fs::read_to_string(&report).unwrap();
    assert!(rows.starts_with("algorithm,param,problem,cost,optimal,subopt_pct"));
    assert_eq!(rows.lines().count(), 1 + 5 * 6);
    let summary = std::fs::read_to_string(dir.path().join("report.summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 5);
    assert!(summary.contains(",file,"));
}

#[test]
fn validate_db_rejects_a_foreign_map() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, db) = (dir.path().join("a.map"), dir.path().join("b.map"), dir.path().join("a.db"));
    ok(&["gen-map", "--width", "32", "--height", "32", "--kind", "random", "--seed", "1", "--out", p(&a)]);
    ok(&["gen-map", "--width", "40", "--height", "32", "--kind", "random", "--seed", "1", "--out", p(&b)]);
    ok(&["build-db", p(&a), "--records", "5", "--out", p(&db)]);
    let out = run(&["validate-db", p(&b), p(&db)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn bad_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.map");
    let out = run(&["validate-db", p(&missing), p(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.map"));

    let map = dir.path().join("m.map");
    let spec = dir.path().join("bad.toml");
    let scen = dir.path().join("m.scen");
    ok(&["gen-map", "--width", "16", "--height", "16", "--kind", "random", "--density", "0.1", "--out", p(&map)]);
    ok(&["gen-problems", p(&map), "--count", "2", "--min-cost", "50", "--out", p(&scen)]);
    std::fs::write(&spec, "[[run]]\nalgo = \"knn\"\n").unwrap();
    let out = run(&["bench", p(&map), p(&scen), "--spec", p(&spec), "--out", p(&dir.path().join("r.csv"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("records"));

    let out = run(&["solve", p(&map), p(&scen), "--algo", "knn", "--quota", "0.5"]);
    assert!(!out.status.success());
}
