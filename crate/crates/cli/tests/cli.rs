use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    report: Value,
    stdout: String,
}

fn run_in(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_groupeq"));
    cmd.current_dir(dir).args(args).env_remove("GROUPEQ_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {stdout}"));
    Run { code: out.status.code().unwrap(), report, stdout }
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

/// A scratch directory with the fixture files every test uses.
fn fixtures() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let w = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).unwrap();
    w("tri.col", "c triangle\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n");
    w("k4.col", "p edge 4 6\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n");
    w("sat.cnf", "p cnf 3 3\n1 2 -3 0\n-1 2 3 0\n-2 -3 1 0\n");
    w("contra.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    w("s3.group", "kind = perm\ndegree = 3\ngen = 1 0 2\ngen = 1 2 0\n");
    w("d6.eq", "group = builtin:dihedral(6)\nlhs = [x0,x1]\nrhs = g2\ndomain x0 = {0, 1, 2}\n");
    w("s3.eq", "group = s3.group\nlhs = [x0,x1]\nrhs = 1\n");
    w("unbound.eq", "group = builtin:cyclic(3)\nlhs = x0\nrhs = 1\ndomain x4 = {1}\n");
    w("broken.eq", "group = builtin:cyclic(3)\nlhs = x0 * \nrhs = 1\n");
    w("big.eq", "group = builtin:symmetric(5)\nlhs = x0*x1*x2*x3*x4\nrhs = 1\n");
    dir
}

#[test]
fn structure_of_a4_is_case1_with_exponent_3() {
    let dir = fixtures();
    let r = run_in(dir.path(), &["structure", "builtin:alternating(4)"], &[]);
    assert_eq!(r.code, 0);
    let c = &r.report["result"]["classification"];
    assert_eq!(c["kind"], "Case1");
    assert_eq!(c["exponent"], 3);
    assert_eq!(r.report["result"]["fitting"]["order"], 4);
    assert!(r.report.get("error").is_none());
}

#[test]
fn group_info_from_a_spec_file() {
    let dir = fixtures();
    let r = run_in(dir.path(), &["group-info", "s3.group"], &[]);
    assert_eq!(r.code, 0);
    let res = &r.report["result"];
    assert_eq!((res["order"].as_u64(), res["exponent"].as_u64()), (Some(6), Some(6)));
    assert_eq!(res["solvable"], true);
    assert_eq!(res["nilpotent"], false);
    assert_eq!(r.report["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn verify_triangle_agrees() {
    let dir = fixtures();
    let r = run_in(dir.path(), &["verify", "builtin:alternating(4)", "tri.col", "--gadget", "coloring"], &[]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let v = &r.report["result"]["verification"];
    assert_eq!(v["agreement"], true);
    assert_eq!(v["decided"], true);
    assert_eq!(v["translated"]["kind"], "coloring");
}

#[test]
fn verify_identity_variants() {
    let dir = fixtures();
    let r = run_in(dir.path(), &["verify", "builtin:alternating(4)", "k4.col", "--gadget", "coloring", "--variant", "id"], &[]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["result"]["verification"]["decided"], true);
    let r = run_in(dir.path(), &["verify", "builtin:dihedral(6)", "contra.cnf", "--gadget", "sat", "--variant", "id"], &[]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["result"]["verification"]["agreement"], true);
}

#[test]
fn reduce_writes_three_files_that_solve_reads() {
    let dir = fixtures();
    let r = run_in(dir.path(), &["reduce", "builtin:dihedral(6)", "sat.cnf", "--gadget", "sat", "--out", "out/sat"], &[]);
    // The output directory does not exist: nothing may be written.
    assert_eq!(r.code, 2);
    assert!(!dir.path().join("out").exists());

    std::fs::create_dir(dir.path().join("out")).unwrap();
    let r = run_in(dir.path(), &["reduce", "builtin:dihedral(6)", "sat.cnf", "--gadget", "sat", "--out", "out/sat"], &[]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let mut names: Vec<String> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["sat.eq", "sat.group", "sat.roles.json"]);
    let roles: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/sat.roles.json")).unwrap()).unwrap();
    assert_eq!(roles["role_map"]["gadget"], "sat");
    assert_eq!(roles["role_map"]["flip"], 3);

    let s = run_in(dir.path(), &["solve", "out/sat.eq"], &[]);
    assert_eq!(s.code, 0, "{}", s.stdout);
    assert_eq!(s.report["result"]["solvable"], true);
    assert_eq!(s.report["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn solve_and_check_id() {
    let dir = fixtures();
    let r = run_in(dir.path(), &["solve", "d6.eq"], &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["result"]["witness"], serde_json::json!([2, 3]));
    let r = run_in(dir.path(), &["check-id", "s3.eq"], &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["result"]["holds"], false);
    assert!(r.report["result"]["counterexample"].is_array());
}

#[test]
fn exit_codes_match_error_objects() {
    let dir = fixtures();
    let cases: &[(&[&str], i32, &str)] = &[
        (&["solve", "unbound.eq"], 2, "invalid-input"),
        (&["solve", "broken.eq"], 2, "parse"),
        (&["solve", "missing.eq"], 2, "io"),
        (&["group-info", "builtin:dihedral(5)"], 2, "group"),
        (&["construct", "builtin:quaternion", "--mode", "eq"], 3, "structure"),
        (&["verify", "builtin:dihedral(6)", "tri.col", "--gadget", "coloring"], 3, "precondition"),
        (&["verify", "builtin:alternating(4)", "sat.cnf", "--gadget", "sat"], 3, "precondition"),
        (&["--cap", "1000", "solve", "big.eq"], 4, "search-space-too-large"),
        (&["solve"], 2, "usage"),
    ];
    for (args, code, kind) in cases {
        let r = run_in(dir.path(), args, &[]);
        assert_eq!(r.code, *code, "{args:?}: {}", r.stdout);
        assert_eq!(r.report["error"]["kind"], *kind, "{args:?}");
        assert_eq!(r.report["error"]["exit_code"], *code);
    }
}

#[test]
fn workers_flag_overrides_environment() {
    let dir = fixtures();
    let r = run_in(dir.path(), &["solve", "d6.eq"], &[("GROUPEQ_WORKERS", "3")]);
    assert_eq!(r.report["command"]["workers"], 3);
    let r = run_in(dir.path(), &["--workers", "2", "solve", "d6.eq"], &[("GROUPEQ_WORKERS", "3")]);
    assert_eq!(r.report["command"]["workers"], 2);
}

#[test]
fn reports_are_deterministic_modulo_timings() {
    let dir = fixtures();
    std::fs::create_dir(dir.path().join("a")).unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["group-info", "builtin:sl23"],
        vec!["structure", "builtin:symmetric(4)"],
        vec!["construct", "builtin:sl23", "--mode", "eq"],
        vec!["construct", "builtin:sl23", "--mode", "id"],
        vec!["reduce", "builtin:alternating(4)", "tri.col", "--gadget", "coloring", "--out", "a/tri"],
        vec!["solve", "d6.eq"],
        vec!["check-id", "s3.eq"],
        vec!["verify", "builtin:alternating(4)", "k4.col", "--gadget", "coloring"],
        vec!["verify", "builtin:dihedral(6)", "sat.cnf", "--gadget", "sat", "--variant", "id"],
        vec!["solve", "unbound.eq"],
    ];
    for args in &commands {
        let one = run_in(dir.path(), args, &[]);
        let two = run_in(dir.path(), args, &[]);
        assert_eq!(one.code, two.code, "{args:?}");
        assert_eq!(without_timings(one.report.clone()), without_timings(two.report), "{args:?}");
        // Worker count is echoed but must not change results.
        let mut wide_args = vec!["--workers", "4"];
        wide_args.extend(args.iter());
        let mut wide = without_timings(run_in(dir.path(), &wide_args, &[]).report);
        wide["command"]["workers"] = 1.into();
        assert_eq!(without_timings(one.report), wide, "{args:?}");
    }
    let outputs: Vec<PathBuf> = ["a/tri.group", "a/tri.eq", "a/tri.roles.json"].iter().map(|p| dir.path().join(p)).collect();
    assert!(outputs.iter().all(|p| p.exists()));
}
