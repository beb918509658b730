//! Stage-level integration tests: hand-traced checkpoints on a small
//! fixture repository, empty-repository behavior, and exit codes.

mod common;

use common::{run_coevo, ScriptedRepo};
use std::path::Path;
use tempfile::TempDir;

fn write_repos_file(dir: &Path, repos: &[&Path]) -> std::path::PathBuf {
    let list: String = repos.iter().map(|p| format!("{}\n", p.display())).collect();
    let path = dir.join("repos.txt");
    std::fs::write(&path, list).unwrap();
    path
}

const CALC_V1: &str = "public class Calc {\n    public int add(int a, int b) {\n        int sum = a + b;\n        return sum;\n    }\n    public int sub(int a, int b) {\n        return a - b;\n    }\n}\n";
const CALC_V2: &str = "public class Calc {\n    public int add(int a, int b) {\n        int sum = a + b + 0;\n        return sum;\n    }\n    public int sub(int a, int b) {\n        return a - b;\n    }\n}\n";
const CALC_TEST_V1: &str = "public class CalcTest {\n    @Test\n    public void testAdd() {\n        check(add(1, 2), 3);\n    }\n}\n";
const CALC_TEST_V2: &str = "public class CalcTest {\n    @Test\n    public void testAdd() {\n        check(add(1, 2), 3);\n    }\n    @Test\n    public void testSub() {\n        check(sub(3, 2), 1);\n    }\n}\n";

/// Three commits: add production class, add a test suite (plus a README
/// that must not count), edit production and add a test.
fn traced_fixture(dir: &Path) -> ScriptedRepo {
    let mut repo = ScriptedRepo::init(&dir.join("calc"));
    repo.commit("alice", "add calculator", &[("Calc.java".into(), Some(CALC_V1.into()))]);
    repo.commit(
        "bob",
        "add calculator tests",
        &[
            ("CalcTest.java".into(), Some(CALC_TEST_V1.into())),
            ("README.md".into(), Some("docs\n".into())),
        ],
    );
    repo.commit(
        "alice",
        "fix addition and cover subtraction",
        &[
            ("Calc.java".into(), Some(CALC_V2.into())),
            ("CalcTest.java".into(), Some(CALC_TEST_V2.into())),
        ],
    );
    repo
}

#[test]
fn mine_distill_detect_match_the_hand_trace() {
    let tmp = TempDir::new().unwrap();
    let repo = traced_fixture(tmp.path());
    let repos = write_repos_file(tmp.path(), &[&repo.path]);
    let out = tmp.path().join("out");

    let (code, _, err) = run_coevo(&["mine", "--repos", repos.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let commits = std::fs::read_to_string(out.join("projects/calc/commits.jsonl")).unwrap();
    assert_eq!(commits.lines().count(), 3);
    // The README is not part of any delta.
    assert!(!commits.contains("README"));
    let stats = std::fs::read_to_string(out.join("projects/calc/stats.json")).unwrap();
    assert!(stats.contains("\"java_commit_count\": 3"), "{stats}");
    assert!(stats.contains("\"developers\": 2"), "{stats}");

    let (code, _, err) = run_coevo(&["distill", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let changes = std::fs::read_to_string(out.join("projects/calc/changes.jsonl")).unwrap();
    let lines: Vec<&str> = changes.lines().collect();
    // c1: class + 2 methods; c2: class + 1 method; c3: 1 statement
    // update + 1 added test method.
    assert_eq!(lines.len(), 3 + 2 + 2, "changes:\n{changes}");
    assert_eq!(changes.matches("\"ADDITIONAL_CLASS\"").count(), 2);
    assert_eq!(changes.matches("\"ADDITIONAL_FUNCTIONALITY\"").count(), 4);
    assert_eq!(changes.matches("\"STATEMENT_UPDATE\"").count(), 1);
    assert!(changes.contains("\"entityName\":\"testSub\""));

    let (code, _, err) = run_coevo(&["detect", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let profiles = std::fs::read_to_string(out.join("projects/calc/profiles.csv")).unwrap();
    let rows: Vec<&str> = profiles.lines().collect();
    assert_eq!(rows.len(), 4); // header + 3 commits
    assert!(rows[1].ends_with(",0,0,0,0,0,0,0,false"), "c1 row: {}", rows[1]);
    assert!(rows[2].ends_with(",1,0,0,1,0,0,2,true"), "c2 row: {}", rows[2]);
    assert!(rows[3].ends_with(",1,0,0,0,0,0,1,true"), "c3 row: {}", rows[3]);
    let head_tests = std::fs::read_to_string(out.join("projects/calc/head_tests.json")).unwrap();
    assert!(head_tests.contains("\"test_methods\": 2"), "{head_tests}");
    assert!(head_tests.contains("\"test_classes\": 1"), "{head_tests}");
}

#[test]
fn empty_repository_produces_empty_checkpoints_and_exit_zero() {
    let tmp = TempDir::new().unwrap();
    let repo = ScriptedRepo::init(&tmp.path().join("hollow"));
    let repos = write_repos_file(tmp.path(), &[&repo.path]);
    let out = tmp.path().join("out");

    for stage in ["mine", "distill", "detect"] {
        let args: Vec<&str> = if stage == "mine" {
            vec!["mine", "--repos", repos.to_str().unwrap(), "--out", out.to_str().unwrap()]
        } else {
            vec![stage, "--out", out.to_str().unwrap()]
        };
        let (code, _, err) = run_coevo(&args);
        assert_eq!(code, 0, "stage {stage}: {err}");
    }
    let commits = std::fs::read_to_string(out.join("projects/hollow/commits.jsonl")).unwrap();
    assert!(commits.is_empty());
    let changes = std::fs::read_to_string(out.join("projects/hollow/changes.jsonl")).unwrap();
    assert!(changes.is_empty());
    let profiles = std::fs::read_to_string(out.join("projects/hollow/profiles.csv")).unwrap();
    assert_eq!(profiles.lines().count(), 1); // header only
}

#[test]
fn missing_ground_truth_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let repo = traced_fixture(tmp.path());
    let repos = write_repos_file(tmp.path(), &[&repo.path]);
    let out = tmp.path().join("out");
    let (code, _, _) = run_coevo(&["mine", "--repos", repos.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, _, err) = run_coevo(&[
        "classify",
        "--ground-truth",
        tmp.path().join("nope.csv").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "stderr: {err}");
    assert!(err.contains("ground truth"), "{err}");
}

#[test]
fn unreadable_repo_list_and_stage_order_are_usage_errors() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let (code, _, err) = run_coevo(&[
        "mine",
        "--repos",
        tmp.path().join("missing.txt").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "stderr: {err}");

    // Distill before mine: the missing checkpoint names the problem.
    let (code, _, err) = run_coevo(&["distill", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2, "stderr: {err}");
    assert!(err.contains("mine"), "{err}");
}

#[test]
fn unparsable_files_are_recorded_not_fatal() {
    let tmp = TempDir::new().unwrap();
    let mut repo = ScriptedRepo::init(&tmp.path().join("broken"));
    repo.commit("alice", "good", &[("A.java".into(), Some("class A { void f() {} }\n".into()))]);
    repo.commit("alice", "broken file", &[("B.java".into(), Some("class B { void g( {\n".into()))]);
    let repos = write_repos_file(tmp.path(), &[&repo.path]);
    let out = tmp.path().join("out");
    let (code, _, err) = run_coevo(&["mine", "--repos", repos.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (code, _, err) = run_coevo(&["distill", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let undistillable =
        std::fs::read_to_string(out.join("projects/broken/undistillable.txt")).unwrap();
    assert!(undistillable.contains("B.java"), "{undistillable}");
}
