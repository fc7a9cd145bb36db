//! End-to-end tests of the `minionlab` binary: exit codes, JSON determinism,
//! and report shapes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minionlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("no signal")
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    for args in [
        vec!["--json", "info", "C2"],
        vec!["--json", "hom", "P", "C2"],
        vec!["--json", "growth", "C2", "--n", "6"],
        vec!["--json", "order", "P", "C2", "*"],
        vec!["--json", "check"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), code(&b));
        assert_eq!(a.stdout, b.stdout, "nondeterministic output for {args:?}");
    }
}

#[test]
fn json_reports_carry_schema_and_query_echo() {
    let out = run(&["--json", "--seed", "7", "info", "C2"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "info");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["minion"], "C2");
    assert_eq!(v["counts"], serde_json::json!([1, 3, 6, 10]));
    assert_eq!(v["essential_arity"], 2);
}

#[test]
fn hom_verdicts_and_exit_codes() {
    // embedded Kazda-Moore minions: maps exist exactly along inclusion
    let yes = run(&["--json", "hom", "KM(3)", "KM(3,4)"]);
    assert_eq!(code(&yes), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&yes)).unwrap();
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["witness"]["kind"], "assignment");

    let no = run(&["--json", "hom", "KM(3,4)", "KM(3)"]);
    assert_eq!(code(&no), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&no)).unwrap();
    assert_eq!(v["verdict"], "no");
}

#[test]
fn hom_enumerate_counts_witnesses() {
    let out = run(&["--json", "hom", "P", "C2", "--enumerate"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // |Hom(P, C2)| = |C2_1| = 1
    assert_eq!(v["count"], 1);
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 1);
}

#[test]
fn equiv_reports_both_directions() {
    let out = run(&["--json", "--max-arity", "2", "equiv", "NC(2,2)", "J(2)"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["forward"]["verdict"], "yes");
    assert_eq!(v["backward"]["verdict"], "yes");
    assert_eq!(v["equivalent"], "yes");
    assert_eq!(code(&out), 0);
}

#[test]
fn usage_errors_exit_two() {
    // unknown subcommand (clap)
    assert_eq!(code(&run(&["frobnicate"])), 2);
    // unresolvable operand
    assert_eq!(code(&run(&["info", "no-such-minion"])), 2);
    // malformed pp sentence
    assert_eq!(code(&run(&["pp", "exists f:0 .", "C2"])), 2);
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = run(&["--element-budget", "2", "info", "O(2,3)"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn check_passes_and_prints_per_check_lines() {
    let out = run(&["check"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("pass")).count() >= 6);
    assert!(text.contains("self-check: ok"));
}

#[test]
fn order_writes_dot_files() {
    let dot_path: PathBuf = std::env::temp_dir().join(format!(
        "minionlab-cli-order-{}.dot",
        std::process::id()
    ));
    let dp = dot_path.to_str().unwrap();
    let out = run(&["--json", "order", "P", "C2", "*", "--dot", dp]);
    assert_eq!(code(&out), 0);
    let dot = std::fs::read_to_string(&dot_path).unwrap();
    assert!(dot.starts_with("digraph homorder {"));
    assert!(dot.contains("label=\"P\""));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["matrix"][0], serde_json::json!(["yes", "yes", "yes"]));
    assert_eq!(v["matrix"][1], serde_json::json!(["no", "yes", "yes"]));
    std::fs::remove_file(&dot_path).ok();
}

#[test]
fn growth_accepts_a_horizon() {
    let out = run(&["--json", "growth", "C2", "--n", "8"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let alpha: Vec<u64> = v["alpha"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    assert_eq!(alpha, vec![0, 1, 3, 6, 10, 15, 21, 28, 36]);
}

#[test]
fn pp_accepts_named_conditions_and_sentences() {
    let out = run(&["--json", "pp", "binary-symmetric", "C2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "yes");
    let out = run(&["--json", "pp", "binary-symmetric", "P"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "no");
    // inline sentence
    let out = run(&["--json", "pp", "exists f:1 . f(0|2) = f(1|2)", "*"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "yes");
}

#[test]
fn spec_file_operands_load_from_disk() {
    let dir = std::env::temp_dir().join(format!("minionlab-cli-spec-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sym.spec");
    std::fs::write(&path, "kind presented\ngen f 2\nrel f (1 0 | 2) = f (0 1 | 2)\n").unwrap();
    let out = run(&["--json", "info", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["minion"], "sym");
    assert_eq!(v["counts"], serde_json::json!([1, 3, 6, 10]));
    std::fs::remove_file(&path).ok();
}

#[test]
fn exp_and_sub_report_counts() {
    let out = run(&["--json", "exp", "P", "P"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["counts"], serde_json::json!([2, 3, 4, 5]));

    let out = run(&["--json", "--max-arity", "3", "sub", "NC(2,2)", "P"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["components_kept"], 2);
    assert_eq!(v["counts"], serde_json::json!([2, 8, 128]));
}

#[test]
fn text_mode_is_the_default() {
    let out = run(&["info", "C2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("minion: C2"));
    assert!(!text.trim_start().starts_with('{'));
}
