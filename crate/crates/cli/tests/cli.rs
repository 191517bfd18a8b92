use std::path::PathBuf;
use std::process::{Command, Output};

use factorium::algebra::{parse_algebra, Term, ZeroOneSpec};
use factorium::gallery::build_l;
use factorium::malcev::MalcevFamily;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_factorium")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("factorium-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn gallery_build_matches_library() {
    let out = run(&["gallery", "build", "L3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(parse_algebra(&String::from_utf8(out.stdout).unwrap()).unwrap(), build_l(3, false).unwrap());
}

#[test]
fn reads_algebra_files() {
    let l2 = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/L2.json");
    let out = run(&["congruences", "--algebra", l2, "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["count"], 2);
}

#[test]
fn eval_exit_code_follows_truth() {
    let yes = run(&["eval", "--algebra", "gallery:L2", "--expr", "(exists u (not (= u x)))", "--assign", "x=0"]);
    assert_eq!(code(&yes), 0);
    let no = run(&["eval", "--algebra", "gallery:T", "--expr", "(exists u (not (= u x)))", "--assign", "x=0"]);
    assert_eq!(code(&no), 1);
    let unassigned = run(&["eval", "--algebra", "gallery:L2", "--expr", "(= x y)", "--assign", "x=0"]);
    assert_eq!(code(&unassigned), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["decompose", "--algebra", "gallery:Q7"])), 2);
    assert_eq!(code(&run(&["decompose", "--algebra", "/nonexistent.json"])), 2);
    assert_eq!(code(&run(&["counterexample"])), 2);
    assert_eq!(code(&run(&["counterexample", "--n", "3"])), 2);
}

#[test]
fn counterexample_report() {
    let out = run(&["counterexample", "--n", "5", "--json"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["game"]["winner"], "Exists");
    assert_eq!(r["maps"]["maps_checked"], 3328);
    assert_eq!(r["holds"], true);
}

#[test]
fn game_expectation_sets_exit_code() {
    let args = ["ef-game", "--algebra", "gallery:L2", "--other", "gallery:L3", "--rounds", "2"];
    assert_eq!(code(&run(&[&args[..], &["--expect", "forall"]].concat())), 0);
    assert_eq!(code(&run(&[&args[..], &["--expect", "exists"]].concat())), 1);
}

#[test]
fn dfc_and_sigma_on_semilattice_product() {
    assert_eq!(code(&run(&["dfc-check", "--algebra", "gallery:L2vxL5v"])), 0);
    assert_eq!(code(&run(&["sigma-check", "--algebra", "gallery:L2vxL5v", "--e", "(0,1)", "--f", "(1,0)"])), 0);
    let out = run(&["sigma-check", "--algebra", "gallery:L2vxL5v", "--e", "(1,2)", "--f", "(0,3)", "--json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["holds"], false);
    // No ∨ and no formula: nothing to check against.
    assert_eq!(code(&run(&["sigma-check", "--algebra", "gallery:L2xL3"])), 2);
}

#[test]
fn malcev_family_file() {
    let fam = MalcevFamily::from_fn(2, ZeroOneSpec::standard(), vec![], vec![], |_, _| Term::var("x")).unwrap();
    let path = scratch("family.json", &fam.to_json());
    let p = path.to_str().unwrap();
    assert_eq!(code(&run(&["malcev-check", "--algebra", "gallery:T", "--family", p])), 0);
    let out = run(&["malcev-check", "--algebra", "gallery:L2", "--family", p, "--json"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    let failures: Vec<&serde_json::Value> = report["identities"].as_array().unwrap().iter().filter(|i| i["holds"] == false).collect();
    assert!(!failures.is_empty() && failures.iter().all(|i| i["counter_assignment"].is_object()));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn figures_and_u_chain() {
    let out = run(&["figures", "--json"]);
    assert_eq!(code(&out), 0);
    let values: Vec<bool> = json(&out)["transport"].as_array().unwrap().iter().map(|s| s["value"].as_bool().unwrap()).collect();
    assert_eq!(values, [true, true, false]);
    assert_eq!(code(&run(&["u-chain"])), 0);
    assert_eq!(code(&run(&["u-chain", "--algebra", "gallery:D3", "--search", "1"])), 0);
}
