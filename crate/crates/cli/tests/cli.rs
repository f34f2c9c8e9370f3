use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use unilab_core::{Relation, UniformityBase};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_str().unwrap().to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn unilab(args: &[&str]) -> Run {
    unilab_env(args, &[])
}

fn unilab_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_unilab")).args(args).envs(env.iter().copied()).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn golden(args: &[&str], code: i32, stdout: &str) {
    let run = unilab(args);
    assert_eq!(run.code, code, "args {args:?}, stderr {}", run.stderr);
    assert_eq!(run.stdout, format!("{stdout}\n"), "args {args:?}");
}

fn error_message(run: &Run) -> String {
    let v: Value = serde_json::from_str(&run.stderr).expect("stderr is JSON");
    v["error"].as_str().expect("error field").to_string()
}

#[test]
fn validate_discrete_metric() {
    golden(
        &["validate", "--metric", &fixture("disc3.json")],
        0,
        r#"{"is_metric":true,"level":"inf","valid":true}"#,
    );
}

#[test]
fn validate_reports_triangle_witness() {
    golden(
        &["validate", "--metric", &fixture("bad_triangle.json")],
        1,
        r#"{"is_metric":true,"level":"q:1","valid":false,"violations":[{"axiom":"triangle","witness":[0,1,2]}]}"#,
    );
}

#[test]
fn validate_level_override() {
    // 3 ≤ max(1, 1) fails, so the same metric is not an ultrametric either.
    let run = unilab(&["validate", "--metric", &fixture("bad_triangle.json"), "--level", "inf"]);
    assert_eq!(run.code, 1);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(v["level"], "inf");
    assert_eq!(v["violations"][0]["witness"], serde_json::json!([0, 1, 2]));
}

#[test]
fn validate_base() {
    golden(&["validate", "--base", &fixture("two_blocks.json")], 0, r#"{"size":4,"valid":true}"#);
}

#[test]
fn topology_of_two_blocks() {
    golden(
        &["topology", "--base", &fixture("two_blocks.json")],
        0,
        r#"{"hausdorff":false,"open_count":4,"opens":[[],[0,1],[0,1,2,3],[2,3]],"size":4}"#,
    );
}

#[test]
fn closure_of_a_point() {
    golden(
        &["closure", "--base", &fixture("two_blocks.json"), "--set", "0"],
        0,
        r#"{"closed":false,"closure":[0,1],"interior":[],"open":false,"set":[0]}"#,
    );
}

#[test]
fn chain_components_and_witness() {
    golden(
        &["chain", "--base", &fixture("chain4.json"), "--set", "0,1,2,3"],
        0,
        concat!(
            r#"{"components":[[0,1,2],[3]],"connected":false,"set":[0,1,2,3],"witness":{"element":0,"#,
            r#""relation":{"pairs":[[0,0],[0,1],[0,2],[1,0],[1,1],[1,2],[2,0],[2,1],[2,2],[3,3]],"size":4},"#,
            r#""split":[[0,1,2],[3]]}}"#
        ),
    );
    golden(
        &["chain", "--base", &fixture("chain4.json"), "--set", "0,2"],
        0,
        r#"{"components":[[0,2]],"connected":true,"set":[0,2],"witness":null}"#,
    );
}

#[test]
fn dim0_of_two_blocks() {
    golden(
        &["dim0", "--base", &fixture("two_blocks.json")],
        0,
        concat!(
            r#"{"hausdorff":false,"strongly_totally_separated":false,"strongly_zero_dimensional":true,"#,
            r#""strongly_zero_dimensional_at":[true,true,true,true],"topological_dimension_zero":true,"#,
            r#""totally_separated":false,"uniformly_zero_dimensional":true}"#
        ),
    );
}

#[test]
fn padic_valuation() {
    golden(&["padic", "--p", "2", "--x", "12/1"], 0, r#"{"abs":"1/4","valuation":2}"#);
    golden(&["padic", "--p", "3", "--x", "-9/20"], 0, r#"{"abs":"1/9","valuation":2}"#);
    golden(&["padic", "--p", "5", "--x", "3/50"], 0, r#"{"abs":"25","valuation":-2}"#);
}

#[test]
fn padic_rejects_zero_and_composite() {
    let zero = unilab(&["padic", "--p", "3", "--x", "0"]);
    assert_eq!(zero.code, 2);
    assert!(error_message(&zero).contains("zero"));
    let composite = unilab(&["padic", "--p", "4", "--x", "2"]);
    assert_eq!(composite.code, 2);
    assert!(error_message(&composite).contains("not prime"));
}

#[test]
fn qchain_small() {
    golden(
        &["qchain", "--from", "0", "--to", "1", "--r", "1/4"],
        0,
        r#"{"from":"0","length":9,"points":["0","1/8","1/4","3/8","1/2","5/8","3/4","7/8","1"],"r":"1/4","to":"1"}"#,
    );
}

#[test]
fn absval_check_squared_standard_breaks_triangle() {
    // |x|² fails |x + y|² ≤ |x|² + |y|² at x = y.
    let run = unilab(&["absval-check", "--kind", "standard", "--power", "2", "--height", "4"]);
    assert_eq!(run.code, 1);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(v["level"], "q:1");
    assert_eq!(v["violations"][0]["axiom"], "level");
    let w = &v["violations"][0]["witness"];
    assert_eq!(w[0], w[1]);
}

#[test]
fn absval_check_padic_is_ultrametric() {
    let run = unilab(&["absval-check", "--kind", "padic", "--p", "5", "--height", "6"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["level"], "inf");
    let samples = v["samples"].as_u64().unwrap();
    assert_eq!(v["pairs_checked"].as_u64().unwrap(), samples * samples);
}

#[test]
fn group_analyze_subgroup() {
    let run = unilab(&["group", "analyze", "--group", &fixture("z4.json"), "--subset", "0,2"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(v["subgroup"]["is_subgroup"], true);
    assert_eq!(v["subgroup"]["is_normal"], true);
    assert_eq!(v["left_equals_right"], true);
    assert_eq!(v["generated_subgroup"], serde_json::json!([0, 2]));
    assert_eq!(v["labels"], serde_json::json!(["0", "2"]));
}

#[test]
fn group_analyze_generator() {
    let run = unilab(&["group", "analyze", "--group", &fixture("z4.json"), "--subset", "1"]);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(v["subgroup"]["is_subgroup"], false);
    assert_eq!(v["generated_subgroup"], serde_json::json!([0, 1, 2, 3]));
}

#[test]
fn group_tau_cosets() {
    golden(
        &["group", "tau", "--group", &fixture("z4.json"), "--subgroups", &fixture("z4_family.json")],
        0,
        r#"{"hausdorff":false,"open_count":4,"opens":[[],[0,1,2,3],[0,2],[1,3]]}"#,
    );
}

#[test]
fn product_round_trips_as_a_base() {
    let run = unilab(&["product", "--left", &fixture("two_blocks.json"), "--right", &fixture("chain4.json")]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let base: UniformityBase = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(base.size(), 16);
    let emitted: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(serde_json::to_value(&base).unwrap(), emitted);
    // (0, 0) ~ (1, 2) in the product: 0 ~ 1 on the left, 0 ~ 2 on the right.
    let u = &base.elements()[0];
    assert!(u.contains(0, 4 + 2));
    assert!(!u.contains(0, 3));
}

#[test]
fn emitted_relations_round_trip() {
    let run = unilab(&["chain", "--base", &fixture("chain4.json"), "--set", "0,1,2,3"]);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    let rel: Relation = serde_json::from_value(v["witness"]["relation"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&rel).unwrap(), v["witness"]["relation"]);
    assert!(rel.contains(2, 0) && !rel.contains(2, 3));
}

#[test]
fn pretty_output_parses_to_the_same_value() {
    let plain = unilab(&["topology", "--base", &fixture("two_blocks.json")]);
    let pretty = unilab(&["--pretty", "topology", "--base", &fixture("two_blocks.json")]);
    assert!(pretty.stdout.contains('\n') && pretty.stdout.lines().count() > 1);
    let a: Value = serde_json::from_str(&plain.stdout).unwrap();
    let b: Value = serde_json::from_str(&pretty.stdout).unwrap();
    assert_eq!(a, b);
}

#[test]
fn malformed_input_exits_2() {
    let run = unilab(&["validate", "--metric", &fixture("malformed.json")]);
    assert_eq!(run.code, 2);
    assert!(run.stdout.is_empty());
    assert!(error_message(&run).contains("malformed.json"));
}

#[test]
fn missing_file_exits_2() {
    let run = unilab(&["topology", "--base", &fixture("does_not_exist.json")]);
    assert_eq!(run.code, 2);
    error_message(&run);
}

#[test]
fn invalid_base_exits_2() {
    // A single non-transitive relation has no square root inside the base.
    let dir = std::env::temp_dir().join(format!("unilab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("path4.json");
    std::fs::write(&path, r#"{"size":3,"relations":[{"size":3,"pairs":[[0,0],[0,1],[1,0],[1,1],[1,2],[2,1],[2,2]]}]}"#)
        .unwrap();
    let run = unilab(&["topology", "--base", path.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert!(error_message(&run).contains("invalid uniformity base"));
}

#[test]
fn unknown_verb_and_flag_exit_2() {
    assert_eq!(unilab(&["frobnicate"]).code, 2);
    assert_eq!(unilab(&["validate", "--metric", &fixture("disc3.json"), "--bogus"]).code, 2);
    assert_eq!(unilab(&[]).code, 2);
}

#[test]
fn help_exits_0() {
    let run = unilab(&["--help"]);
    assert_eq!(run.code, 0);
    for verb in ["validate", "topology", "closure", "chain", "dim0", "ucont", "product", "group", "padic", "sweep"] {
        assert!(run.stdout.contains(verb), "help lists {verb}");
    }
}

#[test]
fn unknown_suite_exits_2() {
    let run = unilab(&["sweep", "--suite", "nope"]);
    assert_eq!(run.code, 2);
    assert!(error_message(&run).contains("nope"));
}

#[test]
fn size_cap_from_environment() {
    let args = ["topology", "--base", &fixture("two_blocks.json")];
    let run = unilab_env(&args, &[("UNILAB_MAX_SIZE", "3")]);
    assert_eq!(run.code, 2);
    assert_eq!(unilab_env(&args, &[("UNILAB_MAX_SIZE", "4")]).code, 0);
    // Values above the built-in cap are clamped, not honoured.
    assert_eq!(unilab_env(&args, &[("UNILAB_MAX_SIZE", "1000")]).code, 0);
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let args = ["sweep", "--seed", "42", "--instances", "8", "--suite", "dim0", "--suite", "ucont"];
    let a = unilab(&args);
    let b = unilab(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["seed"], 42);
    let suites: Vec<&String> = v["suites"].as_object().unwrap().keys().collect();
    assert_eq!(suites, ["dim0", "ucont"]);
}

#[test]
fn sweep_depends_on_seed() {
    let a = unilab(&["sweep", "--seed", "1", "--instances", "5", "--suite", "relation-algebra"]);
    let b = unilab(&["sweep", "--seed", "2", "--instances", "5", "--suite", "relation-algebra"]);
    let va: Value = serde_json::from_str(&a.stdout).unwrap();
    let vb: Value = serde_json::from_str(&b.stdout).unwrap();
    assert_ne!(va["seed"], vb["seed"]);
    assert_eq!(va["suites"]["relation-algebra"]["instances"], 5);
}

#[test]
fn in_process_run_matches_binary() {
    let args = ["unilab", "padic", "--p", "2", "--x", "12/1"];
    let out = unilab::run(args.iter().map(std::ffi::OsString::from));
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, unilab(&args[1..]).stdout);
}
