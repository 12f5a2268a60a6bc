use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn stit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stit"))
        .args(args)
        .env_remove("STIT_DEFAULT_BOUND")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn dumped() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let out = stit(&["reproduce", "--all", "--dump", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    dir
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn model_checking_on_the_tuple_model() {
    let dir = dumped();
    let s = path(dir.path(), "s.json");
    let out = stit(&[
        "mc", "--model", &s, "--moment", "dag", "--history", "dag>t0000p", "--formula",
        "<>([1]p & [2](p->q))",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "true\n");
    let out = stit(&["mc", "--model", &s, "--moment", "dag", "--history", "dag>t0000p", "--formula", "[2]p"]);
    assert_eq!((code(&out), stdout(&out).as_str()), (1, "false\n"));
    let out = stit(&["mc", "--model", &s, "--formula", "[]p -> [3]p"]);
    assert_eq!(code(&out), 0);
    let out = stit(&["mc", "--model", &s, "--moment", "dag", "--history", "nope", "--formula", "p"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn validation_and_bisimulation_files() {
    let dir = dumped();
    let (s, s2, b) = (
        path(dir.path(), "s.json"),
        path(dir.path(), "s_prime.json"),
        path(dir.path(), "b.json"),
    );
    assert_eq!(code(&stit(&["validate-model", "--model", &s])), 0);
    let out = stit(&["bisim", "--model", &s, "--model", &s2, "--relation", &b, "--vars", "q", "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pairs"], 512);
    // p is not shared, so atoms fail on p
    assert_eq!(code(&stit(&["bisim", "--model", &s, "--model", &s2, "--relation", &b])), 1);
    let out = stit(&["maxbisim", "--model", &s, "--model", &s2, "--vars", "q", "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["relation"]["pairs"].as_array().unwrap().len(), 512);

    let mut spec: Value = serde_json::from_str(&fs::read_to_string(&s).unwrap()).unwrap();
    let cells = spec["choice"]["dag"]["1"].as_array_mut().unwrap();
    let cell = cells[1].as_array_mut().unwrap();
    cell.retain(|h| h != "dag>t1111p");
    cells.push(serde_json::json!(["dag>t1111p"]));
    let broken = dir.path().join("broken.json");
    fs::write(&broken, spec.to_string()).unwrap();
    let out = stit(&["validate-model", "--model", broken.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["violations"][0]["constraint"], "IA");
}

#[test]
fn proof_scripts() {
    let dir = dumped();
    let out = stit(&["prove", "--script", &path(dir.path(), "counterexample.prf")]);
    assert_eq!(code(&out), 0);
    let bad = dir.path().join("bad.prf");
    fs::write(&bad, "1. p -> p ; taut\n2. q ; mp 1 3\n").unwrap();
    let out = stit(&["prove", "--script", bad.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["line"], 2);
    assert_eq!(code(&stit(&["prove", "--script", "/nonexistent.prf"])), 2);
}

#[test]
fn derivations_round_trip_through_prove() {
    let dir = tempfile::tempdir().unwrap();
    let out = stit(&["derive", "counterexample", "--agents", "5,6,2,3", "--vars", "a,b,c"]);
    assert_eq!(code(&out), 0);
    let file = dir.path().join("d.prf");
    fs::write(&file, stdout(&out)).unwrap();
    assert_eq!(code(&stit(&["prove", "--script", file.to_str().unwrap()])), 0);

    let out = stit(&["derive", "settled", "--formula", "p & q", "--agents", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).trim_end().ends_with("[](p & q) -> [2][](p & q) ; mp 32 34"));

    let premise = dir.path().join("premise.prf");
    fs::write(
        &premise,
        "1. []q -> q ; ax:T([])\n\
         2. [1]p -> p ; ax:T([1])\n\
         3. ([]q -> q) -> ([1]p -> p) -> ([]q & [1]p) -> (p & q) ; taut\n\
         4. ([1]p -> p) -> ([]q & [1]p) -> (p & q) ; mp 1 3\n\
         5. ([]q & [1]p) -> (p & q) ; mp 2 4\n",
    )
    .unwrap();
    let pre = premise.to_str().unwrap();
    assert_eq!(code(&stit(&["prove", "--script", pre])), 0);
    let out = stit(&[
        "derive", "technical3", "--formula", "q", "--formula", "p", "--formula", "p & q", "--agents",
        "1", "--script", pre, "--json",
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["conclusion"], "[]q & <>[1]p -> <>[1](p & q)");
    // wrong parameters for the premise
    let out = stit(&[
        "derive", "technical3", "--formula", "q", "--formula", "p", "--formula", "q", "--agents", "1",
        "--script", pre,
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&stit(&["derive", "s-counterexample", "--agents", "1,1"])), 2);
}

#[test]
fn bounded_searches() {
    let out = stit(&["sat", "--formula", "<>p & <>~p", "--bound", "2", "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["frame"]["histories"].as_array().unwrap().len(), 2);
    assert_eq!(code(&stit(&["sat", "--formula", "<>[1]p & <>[2]~p"])), 1);
    assert_eq!(code(&stit(&["valid", "--formula", "p -> []p"])), 1);
    assert_eq!(code(&stit(&["valid", "--formula", "<>[1]p -> ~<>[2]~p", "--workers", "3"])), 0);
    assert_eq!(code(&stit(&["sat", "--formula", "p", "--bound", "5"])), 2);
    assert_eq!(code(&stit(&["sat", "--formula", "p", "--bound", "4", "--large"])), 0);
    assert_eq!(code(&stit(&["sat", "--formula", "p &"])), 2);
}

#[test]
fn bound_defaults_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_stit"))
        .args(["valid", "--formula", "p -> p", "--json"])
        .env("STIT_DEFAULT_BOUND", "2")
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["bound"], 2);
}

#[test]
fn interpolation_and_separation() {
    let out = stit(&["interpolate", "--formula", "<>[1]p", "--formula", "~<>[2]~p", "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["outcome"], "found");
    let out = stit(&["interpolate", "--formula", "<>[1]p", "--formula", "~<>[2]~p", "--mode", "srcip"]);
    assert_eq!(code(&out), 1);
    let out = stit(&["interpolate", "--formula", "p & q", "--formula", "q | r"]);
    assert!(stdout(&out).starts_with("found: q "));
    assert_eq!(code(&stit(&["interpolate", "--formula", "p", "--formula", "q"])), 1);
    assert_eq!(code(&stit(&["interpolate", "--formula", "[1]p", "--formula", "<1>p"])), 2);
    assert_eq!(code(&stit(&["separate", "--gamma", "p", "--delta", "~p"])), 0);
    assert_eq!(code(&stit(&["separate", "--gamma", "p", "--delta", "q", "--size-bound", "5"])), 1);
}

#[test]
fn json_output_is_byte_identical() {
    for args in [
        &["reproduce", "--all", "--json"][..],
        &["sat", "--formula", "<>[1]p & <>[2]q & ~p", "--json", "--workers", "4"][..],
        &["parse", "--formula", "[d:3](p | ~q) -> <2>r", "--json"][..],
    ] {
        let (a, b) = (stit(args), stit(args));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn parse_reports_core_form() {
    let out = stit(&["parse", "--formula", "~p", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["core"], "p -> false");
    assert_eq!(code(&stit(&["parse", "--formula", "[0]p"])), 2);
    assert_eq!(code(&stit(&["frobnicate"])), 2);
}

#[test]
fn frames_as_model_sources() {
    let dir = tempfile::tempdir().unwrap();
    let frame = dir.path().join("f.json");
    fs::write(
        &frame,
        r#"{"histories":["a","b"],"partitions":{"1":[["a"],["b"]]},"valuation":{"a":["p"]}}"#,
    )
    .unwrap();
    let f = frame.to_str().unwrap();
    assert_eq!(code(&stit(&["validate-model", "--frame", f])), 0);
    let out = stit(&["mc", "--frame", f, "--history", "a", "--formula", "[1]p & <>~p"]);
    assert_eq!((code(&out), stdout(&out).as_str()), (0, "true\n"));
    fs::write(
        &frame,
        r#"{"histories":["a","b"],"partitions":{"1":[["a"],["b"]],"2":[["a"],["b"]]},"valuation":{}}"#,
    )
    .unwrap();
    assert_eq!(code(&stit(&["validate-model", "--frame", f])), 2);
}
