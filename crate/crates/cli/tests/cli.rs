//! End-to-end tests of the binary: exit codes, formats, corpus handling.

use fibercalc_cli::schema::InputDocument;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fibercalc"));
    cmd.args(args);
    cmd.env("FIBERCALC_CORPUS", corpus_dir());
    for (key, value) in env {
        cmd.env(key, value);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, content: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, content).unwrap();
    path
}

#[test]
fn corpus_run_is_clean() {
    let out = run(&["corpus", "run"], &[]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("status: ok"));
}

#[test]
fn corpus_list_contains_the_packaged_fibers() {
    let out = run(&["corpus", "list"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in [
        "kodaira-I1",
        "kodaira-I2",
        "kodaira-I0star",
        "kodaira-II",
        "kodaira-III",
        "theta",
        "genus2-cusp",
    ] {
        assert!(text.contains(name), "missing {name} in listing");
    }
}

#[test]
fn malformed_document_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "bad.json", "{\"kind\": \"fiber\", \"name\": 3}");
    let out = run(&["invariants", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line"), "diagnostic: {}", stderr(&out));
}

#[test]
fn wrong_document_kind_exits_2() {
    let path = corpus_dir().join("genus2-semistable-p1.json");
    let out = run(&["invariants", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let path = corpus_dir().join("kodaira-i1.json");
    let out = run(&["check", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inadmissible_order_exits_2() {
    let path = corpus_dir().join("kodaira-ii.json");
    let out = run(&["basechange", path.to_str().unwrap(), "--order", "5"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn genus_one_summary_check_exits_2() {
    let path = corpus_dir().join("rational-elliptic-12xi1.json");
    let out = run(&["check", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("genus at least 2"));
}

#[test]
fn violated_summary_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "violated.json",
        r#"{
  "kind": "point-check",
  "name": "violated-height",
  "fibration": {
    "g": 2, "b": 2, "s": 0,
    "ksq_rel": "4", "chi_f": "1", "e_f": "8",
    "semistable": true, "non_trivial": true, "fibers": []
  },
  "point": { "degree": 1, "k_dot_e": "10", "genus_tilde": 2 }
}"#,
    );
    let out = run(&["check", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("violated"));
}

#[test]
fn smooth_equality_case_exits_0() {
    // Smooth fibration over a genus-2 base sitting exactly on both the
    // canonical-class and height bounds; equality is legitimate at s = 0.
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "equality.json",
        r#"{
  "kind": "point-check",
  "name": "smooth-equality",
  "fibration": {
    "g": 2, "b": 2, "s": 0,
    "ksq_rel": "4", "chi_f": "1", "e_f": "8",
    "semistable": true, "non_trivial": true, "fibers": []
  },
  "point": { "degree": 1, "k_dot_e": "2", "genus_tilde": 2 }
}"#,
    );
    let out = run(&["check", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("satisfied-equality"));
}

#[test]
fn corrupted_golden_file_fails_the_corpus_run() {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            std::fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
        }
    }
    let corrupted = dir.path().join("kodaira-ii.json");
    let text = std::fs::read_to_string(&corrupted)
        .unwrap()
        .replace("\"c2\": \"2\"", "\"c2\": \"999\"");
    assert!(text.contains("999"), "corruption did not apply");
    std::fs::write(&corrupted, text).unwrap();

    let out = run(
        &["corpus", "run"],
        &[("FIBERCALC_CORPUS", dir.path().to_str().unwrap())],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("kodaira-II"));
    assert!(stdout(&out).contains("999"));
}

#[test]
fn corpus_env_override_is_respected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(
        corpus_dir().join("theta.json"),
        dir.path().join("theta.json"),
    )
    .unwrap();
    let out = run(
        &["corpus", "list"],
        &[("FIBERCALC_CORPUS", dir.path().to_str().unwrap())],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("theta"));
    assert!(!text.contains("kodaira"));
}

#[test]
fn machine_format_is_valid_json() {
    let path = corpus_dir().join("kodaira-i0star.json");
    let out = run(
        &["invariants", path.to_str().unwrap(), "--format", "machine"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["data"]["invariants"]["c2"], "6");
    assert_eq!(doc["data"]["invariants"]["chi"], "1/2");
    assert_eq!(doc["data"]["invariants"]["c_minus_1"], "2");
    assert_eq!(doc["status"], "ok");
}

#[test]
fn identity_base_change_returns_the_input_shape() {
    let path = corpus_dir().join("theta.json");
    let out = run(
        &[
            "basechange",
            path.to_str().unwrap(),
            "--order",
            "1",
            "--format",
            "machine",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let pieces = doc["data"]["result"]["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), 1);
    assert_eq!(pieces[0]["components"].as_array().unwrap().len(), 2);
    assert_eq!(pieces[0]["edges"].as_array().unwrap().len(), 3);
    assert_eq!(doc["data"]["result"]["c_minus_1"], "0");
}

#[test]
fn chosen_order_is_reported() {
    let path = corpus_dir().join("kodaira-ii.json");
    let out = run(
        &["basechange", path.to_str().unwrap(), "--format", "machine"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["data"]["order"], 6);
    assert_eq!(doc["data"]["order_chosen"], true);
}

#[test]
fn every_corpus_document_round_trips() {
    for entry in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        if !path.extension().is_some_and(|e| e == "json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let doc = InputDocument::parse(&text).unwrap();
        let reserialized = serde_json::to_string(&doc).unwrap();
        let reparsed = InputDocument::parse(&reserialized).unwrap();
        assert_eq!(doc, reparsed, "round-trip failed for {}", path.display());
    }
}
