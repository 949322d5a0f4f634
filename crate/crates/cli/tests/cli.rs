use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cqb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqb")).args(args).output().unwrap()
}

fn json_of(args: &[&str], dir: &Path) -> (Output, Value) {
    let path = dir.join("report.json");
    let mut all = args.to_vec();
    all.extend(["--json", path.to_str().unwrap()]);
    let out = cqb(&all);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("{}", String::from_utf8_lossy(&out.stderr)));
    (out, serde_json::from_str(&text).unwrap())
}

fn p3(dir: &Path) -> String {
    let path = dir.join("p3.el");
    std::fs::write(&path, "3 2\n1 2 1\n2 3 1\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_path_graph() {
    let dir = tempfile::tempdir().unwrap();
    let input = p3(dir.path());
    let (out, r) = json_of(&["solve", "--input", &input, "--l", "1", "--u", "1"], dir.path());
    assert!(out.status.success());
    assert_eq!(r["opt_value"], 1.0);
    assert_eq!(r["status"], "optimal");
    assert_eq!(r["bound_variant"], "sdp");
    for key in ["n", "density%", "partition", "node_count", "wall_time_s", "root_LB", "incumbent_trace"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["partition"]["side1"].as_array().unwrap().len(), 1);
}

#[test]
fn solve_generated_torus_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--gen", "toroidal:4x5", "--seed", "1", "--bisection"];
    let (out, solved) = json_of(&[&["solve"], &args[..]].concat(), dir.path());
    assert!(out.status.success());
    let (_, oracle) = json_of(&[&["oracle"], &args[..]].concat(), dir.path());
    assert_eq!(solved["opt_value"], oracle["opt_value"]);
    assert!(solved["node_count"].as_u64().unwrap() >= 1);
    let trace = solved["incumbent_trace"].as_array().unwrap();
    assert_eq!(trace.last().unwrap()["value"], solved["opt_value"]);
}

#[test]
fn single_threaded_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["solve", "--gen", "random:14:0.4", "--seed", "3", "--bound", "eig"];
    let (_, a) = json_of(&args, dir.path());
    let (_, b) = json_of(&args, dir.path());
    assert_eq!(a["partition"], b["partition"]);
    assert_eq!(a["node_count"], b["node_count"]);
    assert_eq!(a["root_LB"], b["root_LB"]);
}

#[test]
fn bounds_do_not_exceed_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..3 {
        let s = seed.to_string();
        let (out, r) = json_of(&["bound", "--gen", "mixed:3x4", "--seed", &s], dir.path());
        assert!(out.status.success());
        let opt = r["opt"].as_f64().unwrap();
        assert!(r["LB1"].as_f64().unwrap() <= opt + 1e-6);
        assert!(r["LB2"].as_f64().unwrap() <= opt + 1e-6);
    }
}

#[test]
fn generate_de_bruijn_then_solve_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("graph.el");
    let out = cqb(&["generate", "--gen", "debruijn:5", "--output", file.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("32 "));

    let out = cqb(&["generate", "--gen", "debruijn:3", "--output", file.to_str().unwrap()]);
    assert!(out.status.success());
    let (_, oracle) = json_of(&["oracle", "--input", file.to_str().unwrap()], dir.path());
    let (_, solved) = json_of(&["solve", "--input", file.to_str().unwrap()], dir.path());
    assert_eq!(oracle["opt_value"], solved["opt_value"]);
}

#[test]
fn check_reports_conditions_and_descent() {
    let dir = tempfile::tempdir().unwrap();
    let input = p3(dir.path());
    let point = dir.path().join("x.txt");

    std::fs::write(&point, "1 0 0\n").unwrap();
    let (out, r) = json_of(&["check", "--input", &input, "--l", "1", "--u", "1", "--point", point.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    assert_eq!(r["local_min"], true);
    assert_eq!(r["p4"], Value::Null);
    assert_eq!(r["descent"], Value::Null);

    std::fs::write(&point, "0, 1, 0").unwrap();
    let (_, r) = json_of(&["check", "--input", &input, "--l", "1", "--u", "1", "--point", point.to_str().unwrap()], dir.path());
    assert_eq!(r["local_min"], false);
    let d = &r["descent"];
    assert!(d["f_after"].as_f64().unwrap() < d["f_before"].as_f64().unwrap());
}

#[test]
fn limits_and_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let (out, r) = json_of(&["solve", "--gen", "debruijn:6", "--max-nodes", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(r["status"], "node_limit");

    assert_eq!(cqb(&["solve", "--input", "/definitely/missing.el"]).status.code(), Some(1));
    assert_eq!(cqb(&["solve", "--gen", "hexagonal:3x3"]).status.code(), Some(1));
    assert_eq!(cqb(&["solve", "--gen", "random:5:0.5", "--l", "4", "--u", "2"]).status.code(), Some(1));
    let bad = dir.path().join("bad.el");
    std::fs::write(&bad, "3 1\n1 9 1\n").unwrap();
    let out = cqb(&["solve", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range"));
    assert!(!cqb(&["oracle", "--gen", "debruijn:5"]).status.success());
}
