use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn repzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repzeta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn scratch_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("repzeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn compare_gl3_borel() {
    let out = repzeta(&["zeta", "compare", "--family", "gl3_borel", "--p", "3", "--r", "1", "--L", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["exact_up_to"], 3);
    let coeffs: Vec<i64> = v["coefficients"].as_array().unwrap().iter().map(|r| r[1].as_i64().unwrap()).collect();
    assert_eq!(coeffs, vec![27, 0, 42, 12]);
}

#[test]
fn vanish_division() {
    let out = repzeta(&["vanish", "--family", "division", "--n", "1", "--d", "2", "--r", "1", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], 0);
}

#[test]
fn non_fab_custom_lattice_is_rejected() {
    let path = scratch_file("heisenberg.json", r#"{"n":3,"m_plus_1":2,"labels":["Y","Z","X"],"constants":[[3,1,2,1]]}"#);
    let out = repzeta(&["zeta", "oracle", "--lattice", path.to_str().unwrap(), "--p", "3", "--r", "1", "--L", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("RelativeFAbViolation"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(repzeta(&["zeta", "oracle", "--p", "3", "--L", "2"]).status.code(), Some(2));
    assert_eq!(repzeta(&["zeta", "oracle", "--family", "gl3_borel", "--L", "2"]).status.code(), Some(2));
    assert_eq!(repzeta(&["frobnicate"]).status.code(), Some(2));
    let out = repzeta(&["zeta", "oracle", "--family", "max_parabolic", "--n", "4", "--p", "3", "--L", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_needs_allow_large() {
    let args = ["zeta", "oracle", "--family", "gl3_borel", "--p", "3", "--L", "6"];
    let out = repzeta(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--allow-large"));
}

#[test]
fn oracle_output_is_independent_of_workers() {
    let base = ["zeta", "oracle", "--family", "u3_borel", "--p", "3", "--L", "2"];
    let one = repzeta(&[&base[..], &["--workers", "1"]].concat());
    let four = repzeta(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn csv_and_out_file() {
    let out = repzeta(&["zeta", "oracle", "--family", "gl3_borel", "--p", "3", "--L", "2", "--format", "csv"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "e,coefficient\n0,27\n1,0\n2,42\n");
    let target = scratch_file("tally.json", "");
    let out = repzeta(&["zeta", "oracle", "--family", "gl3_borel", "--p", "3", "--L", "2", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with(r#"{"q":3,"r":1,"L":2,"exact_up_to":2,"coefficients":[[0,27],"#));
    // no CSV for a yes/no check
    assert_eq!(repzeta(&["feq", "--family", "gl3_borel", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn functional_equation_and_abscissa() {
    let out = repzeta(&["feq", "--family", "u3_borel", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["exponent"], -9);
    let out = repzeta(&["abscissa", "--family", "gl3_borel"]);
    assert_eq!(json(&out)["abscissa"], "1/6");
    let out = repzeta(&["abscissa", "--family", "max_parabolic", "--n", "3", "--t", "1"]);
    assert_eq!(json(&out)["abscissa"], 0);
}

#[test]
fn division_functional_equation_exponent() {
    // with d = 2 the complement has rank 4 over Z_p, but the symmetry holds with dn − 2rnd²
    let out = repzeta(&["feq", "--family", "division", "--n", "1", "--d", "2", "--r", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
    let out = repzeta(&["feq", "--family", "division", "--n", "1", "--d", "2", "--r", "1", "--exponent", "-6"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn xi_commands() {
    let spec = scratch_file(
        "xi.json",
        r#"{"u":1,"d":1,"lambda":[[-1,-1],[-1,-1]],"beta":[[0,0],[1,0]],"eps":[0,0],"delta":[0,0],"N":1}"#,
    );
    let s = spec.to_str().unwrap();
    let out = repzeta(&["xi", "inversion", "--spec", s]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["sign"], 1);
    let out = repzeta(&["xi", "compare", "--spec", s]);
    assert_eq!(json(&out)["pass"], true);
    let out = repzeta(&["xi", "truncate", "--spec", s, "--k-max", "1", "--e-max", "1", "--format", "csv"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.starts_with("k,e,count\n"));
    assert!(text.contains("\n1,0,1\n"));
    let bad = scratch_file("bad.json", r#"{"u":1,"d":1,"lambda":[[1,-1],[-1,-1]],"beta":[[0,0],[1,0]],"eps":[0,0],"delta":[0,0],"N":1}"#);
    assert_eq!(repzeta(&["xi", "rational", "--spec", bad.to_str().unwrap()]).status.code(), Some(1));
    let junk = scratch_file("junk.json", "{");
    assert_eq!(repzeta(&["xi", "rational", "--spec", junk.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tree_commands() {
    let out = repzeta(&["tree", "zeta", "--branching", "2,2,2"]);
    assert_eq!(json(&out)["dimensions"], serde_json::json!([[1, 1], [1, 1], [2, 1], [4, 1]]));
    let out = repzeta(&["tree", "orbits", "--branching", "3,3"]);
    assert_eq!(out.status.code(), Some(0));
    let out = repzeta(&["tree", "layers", "--p", "3", "--n", "2", "--depth", "1"]);
    assert_eq!(json(&out)["branching"], serde_json::json!([13]));
    let out = repzeta(&["tree", "witness", "--p", "2", "--n", "1", "--depth", "2", "--x", "[1,2]", "--y", "[3,2]"]);
    assert_eq!(json(&out)["matrix"], serde_json::json!([[1, 0], [1, 1]]));
    let out = repzeta(&["tree", "witness", "--p", "2", "--n", "1", "--depth", "2", "--x", "[1,2]", "--y", "[1,1]"]);
    assert_eq!(out.status.code(), Some(2));
    let out = repzeta(&["tree", "boundary", "--tail", "3", "--count", "4"]);
    assert_eq!(json(&out)["dimensions"], serde_json::json!([1, 2, 6, 18]));
    assert_eq!(json(&out)["abscissa"], 0);
    let out = repzeta(&["zeta", "closed", "--family", "gelfand_gl", "--n", "1", "--q", "2", "--e-max", "4"]);
    assert_eq!(json(&out)["dimensions"], serde_json::json!([1, 2, 3, 6, 12]));
}

#[test]
fn orbit_commands() {
    let out = repzeta(&["orbits", "--family", "heisenberg", "--p", "3", "--L", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let total: u64 = v["orbits"].as_array().unwrap().iter().map(|o| o["size"].as_u64().unwrap()).sum();
    assert_eq!(total, 729);
    let out = repzeta(&["mult", "--family", "heisenberg", "--p", "3", "--L", "2", "--omega", "0,1,0", "--eta", "0"]);
    assert_eq!(json(&out)["multiplicity"], 1);
    let out = repzeta(&["mult", "--family", "heisenberg", "--p", "3", "--L", "2", "--omega", "0,1", "--eta", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
