use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn volcano(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_volcano"))
        .args(args)
        .env_remove("VOLCANO_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn validate(doc: &Value, schema_file: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema").join(schema_file);
    let schema: Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:#?}");
}

#[test]
fn classes_over_gf5() {
    let out = volcano(&["classes", "--p", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    validate(&doc, "classes.v1.json");
    let classes = doc["classes"].as_array().unwrap();
    assert!(classes.iter().any(|c| c["t"] == 2 && c["order"] == 4 && c["f"] == 2 && c["d_l"] == -4));
}

#[test]
fn input_errors_exit_2() {
    let out = volcano(&["classes", "--p", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("4 is not prime"));
    let out = volcano(&["classes", "--p", "5", "--t", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("supersingular"));
    assert_eq!(volcano(&["volcano", "--p", "5", "--t", "2", "--ell", "5"]).status.code(), Some(2));
    assert_eq!(volcano(&["crosscheck", "--p-max", "7", "--ell", "4"]).status.code(), Some(2));
    assert_eq!(volcano(&["classes"]).status.code(), Some(2));
}

#[test]
fn volcano_dot_draws_two_levels() {
    let out = volcano(&["volcano", "--p", "5", "--t", "2", "--ell", "2", "--format", "dot"]);
    assert_eq!(out.status.code(), Some(0));
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph "));
    assert_eq!(dot.matches("rank=same").count(), 2);
    assert_eq!(dot.matches(" -> ").count(), 4);
    assert!(dot.trim_end().ends_with('}'));
}

#[test]
fn special_j_component_is_flagged_not_fatal() {
    let args = ["volcano", "--p", "5", "--t", "2", "--ell", "2"];
    let (a, b) = (volcano(&args), volcano(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    validate(&doc, "volcano.v1.json");
    let c = &doc["components"][0];
    assert_eq!(c["flags"]["contains_j0_1728"], true);
    assert_eq!(c["validation"]["strict"], false);
    assert_eq!(doc["passed"], true);
}

#[test]
fn volcano_table_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["volcano", "--p", "11", "--t", "4", "--ell", "2"];
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_volcano")).args(args).env("VOLCANO_CACHE_DIR", dir.path()).output().unwrap()
    };
    let cold = run();
    let warm = run();
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, volcano(&args).stdout);
    let files: Vec<_> = walk(dir.path());
    assert_eq!(files.len(), 1, "{files:?}");
    let table = volcano(&["volcano", "--p", "11", "--t", "4", "--ell", "2", "--format", "table"]);
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.contains("kronecker") && text.contains("ok"));
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn sha_of_x3_plus_x_over_its_own_function_field() {
    let out = volcano(&["sha", "--e", "5;1,0", "--f", "5;1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    validate(&doc, "sha.v1.json");
    assert_eq!(doc["tag"], "isogenous");
    assert_eq!(doc["structure"], serde_json::json!([2, 2]));
    assert_eq!(doc["order"], 4);
    assert_eq!(doc["crosschecks"]["hom_oracle"]["2"]["passed"], true);
    assert_eq!(doc["crosschecks"]["bsd"]["passed"], true);
}

#[test]
fn sha_routes_non_isogenous_and_rejects_supersingular() {
    let out = volcano(&["sha", "--e", "5;1,0", "--f", "5;1,1"]);
    let doc = json(&out);
    validate(&doc, "sha.v1.json");
    assert_eq!(doc["tag"], "non-isogenous");
    let d = doc["e"]["order"].as_i64().unwrap() - doc["f"]["order"].as_i64().unwrap();
    assert_eq!(doc["order"].as_i64().unwrap(), d * d);
    let out = volcano(&["sha", "--e", "7;1,0", "--f", "7;1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("p-group"));
}

#[test]
fn selmer_triples_for_each_clause() {
    // l = 2 component over GF(11), t = 4: crater (1,9) at height 1, floor (2,10).
    let cases = [
        ("11;1,9", "2", "11;1,9", [1, 3, 2], [1, 0, 1], "clause1"),
        ("11;2,10", "0", "11;1,9", [3, 3, 0], [0, 1, 1], "clause3"),
        ("11;1,1", "0", "11;1,1", [2, 2, 0], [0, 0, 0], "clause2"),
    ];
    for (e, k, f, sigma, heights, case) in cases {
        let out = volcano(&["selmer", "--e", e, "--kernel", k, "--ell", "2", "--f", f]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let doc = json(&out);
        validate(&doc, "selmer.v1.json");
        assert_eq!(doc["triple"]["sigma"], serde_json::json!(sigma));
        assert_eq!(doc["triple"]["heights"], serde_json::json!(heights));
        assert_eq!(doc["triple"]["case"], case);
        assert_eq!(doc["shape"]["rank"], sigma[1]);
    }
    let out = volcano(&["selmer", "--e", "11;1,1", "--kernel", "3", "--ell", "2", "--f", "11;1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn small_crosscheck_is_schema_valid_and_deterministic() {
    let args = ["crosscheck", "--p-max", "17", "--ell", "2", "--descent-p-max", "13"];
    let a = volcano(&args);
    let b = volcano(&[&args[..], &["--jobs", "2"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    validate(&doc, "crosscheck.v1.json");
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let table = volcano(&[&args[..], &["--format", "table"]].concat());
    assert!(String::from_utf8(table.stdout).unwrap().contains("annihilation"));
}

#[test]
fn injected_fault_names_the_failed_clause() {
    let out = volcano(&["crosscheck", "--p-max", "11", "--ell", "2", "--descent-p-max", "5", "--inject-fault", "11:4:2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("suite volcano failed 1 of"), "{err}");
    assert!(err.contains("degree"), "{err}");
    assert_eq!(json(&out)["passed"], false);
}
