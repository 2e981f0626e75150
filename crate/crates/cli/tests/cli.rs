use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const RUNNING: &str = r#"{"version":"1","kind":"blowup_bundle","payload":{"matrix":[
  [[{"t":1,"x":0,"re":"1","im":"0"}],[{"t":0,"x":1,"re":"1","im":"0"}]],
  [[],[{"t":-1,"x":0,"re":"1","im":"0"}]]]}}"#;

const IDENTITY: &str = r#"{"version":"1","kind":"blowup_bundle","payload":{"matrix":[
  [[{"t":0,"x":0,"re":"1","im":"0"}],[]],
  [[],[{"t":0,"x":0,"re":"1","im":"0"}]]],"jet_order":2}}"#;

fn profile(blocks: &[(u32, &str)]) -> String {
    let blocks: Vec<String> = blocks
        .iter()
        .map(|(r, s)| format!(r#"{{"rank":{r},"slope":"{s}"}}"#))
        .collect();
    format!(
        r#"{{"version":"1","kind":"hn_profile","payload":{{"blocks":[{}]}}}}"#,
        blocks.join(",")
    )
}

fn heckelab(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_heckelab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn split_examples() {
    let out = heckelab(&["split", "--verify"], IDENTITY);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["splitting"], serde_json::json!([0, 0]));
    assert_eq!(r["phi"], "0");
    assert_eq!(r["verified"], true);

    let out = heckelab(&["split", "--verify"], RUNNING);
    let r = report(&out);
    assert_eq!(r["splitting"], serde_json::json!([1, -1]));
    assert_eq!(r["phi"], "2");
    assert_eq!(r["hn_blocks"][0]["slope"], "1");
}

#[test]
fn split_rejects_profiles_and_bad_input() {
    let out = heckelab(&["split"], &profile(&[(1, "2"), (2, "3/2")]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kind"));

    let bad = RUNNING.replacen(r#""re":"1""#, r#""re":"1/0""#, 1);
    let out = heckelab(&["split"], &bad);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("payload.matrix[0][0][0].re"));

    let out = heckelab(&["split"], "not json");
    assert_eq!(out.status.code(), Some(2));

    let singular = r#"{"version":"1","kind":"p1_transition","payload":{"matrix":[
      [[{"t":0,"x":0,"re":"1","im":"0"}],[{"t":0,"x":0,"re":"2","im":"0"}]],
      [[{"t":0,"x":0,"re":"1","im":"0"}],[{"t":0,"x":0,"re":"2","im":"0"}]]]}}"#;
    assert_eq!(heckelab(&["split"], singular).status.code(), Some(3));
}

#[test]
fn optimize_running_example_with_dot() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "e.json", RUNNING);
    let dot = dir.path().join("trace.dot");
    let out = heckelab(
        &[
            "optimize",
            "--input",
            &input,
            "--emit-dot",
            dot.to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["steps"], 2);
    assert_eq!(r["phi_trace"], serde_json::json!(["2", "1", "0"]));
    assert_eq!(r["final_splitting"], serde_json::json!([1, 1]));
    let dot = fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("Hecke k=1").count(), 2);
    assert!(dot.contains("(1,-1)"));
}

#[test]
fn optimize_identity_and_exhaustion() {
    let r = report(&heckelab(&["optimize"], IDENTITY));
    assert_eq!(r["steps"], 0);

    let out = heckelab(&["optimize", "--jet-order", "1"], RUNNING);
    assert_eq!(out.status.code(), Some(4));
    let r = report(&out);
    assert_eq!(r["phi_trace"], serde_json::json!(["2", "1"]));
    assert_eq!(r["steps"], 1);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = heckelab(&["split", "--output", path.to_str().unwrap()], RUNNING);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["phi"], "2");
}

#[test]
fn profile_examples() {
    let r = report(&heckelab(
        &["profile", "gr-tilde"],
        &profile(&[(2, "3/2"), (1, "0")]),
    ));
    assert_eq!(r["result"]["blocks"][0]["slope"], "3/2");
    assert_eq!(r["result"]["blocks"][1]["slope"], "1");
    assert_eq!(r["result"]["phi"], "1/2");

    let r = report(&heckelab(
        &["profile", "partial-hn"],
        &profile(&[(1, "2"), (2, "3/2")]),
    ));
    assert_eq!(r["indices"], serde_json::json!([0, 2]));
    assert_eq!(r["twists"], serde_json::json!([0]));

    let dir = tempfile::tempdir().unwrap();
    let other = write(dir.path(), "q.json", &profile(&[(2, "0")]));
    let r = report(&heckelab(
        &["profile", "equivalent", "--other", &other],
        &profile(&[(2, "3")]),
    ));
    assert_eq!(r["equivalent"], true);

    let r = report(&heckelab(
        &["profile", "bound", "-k", "1"],
        &profile(&[(2, "3/2"), (1, "0")]),
    ));
    assert_eq!(r["bound"], "1/2");
    let r = report(&heckelab(
        &["profile", "phi"],
        &profile(&[(2, "3/2"), (1, "0")]),
    ));
    assert_eq!(r["phi"], "3/2");
}

#[test]
fn profile_errors() {
    let out = heckelab(&["profile", "phi"], &profile(&[(1, "0"), (1, "1")]));
    assert_eq!(out.status.code(), Some(2));
    let out = heckelab(&["profile", "phi"], &profile(&[(2, "1/3")]));
    assert_eq!(out.status.code(), Some(2));
    let out = heckelab(
        &["profile", "hecke", "-k", "3"],
        &profile(&[(2, "3/2"), (1, "0")]),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = heckelab(&["profile", "phi"], RUNNING);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites_pass_and_are_deterministic() {
    let a = heckelab(
        &["verify", "involution", "--count", "100", "--seed", "7"],
        "",
    );
    assert_eq!(a.status.code(), Some(0));
    let b = heckelab(
        &["verify", "involution", "--count", "100", "--seed", "7"],
        "",
    );
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(report(&a)["passed"], true);
    for suite in ["descent", "oracle", "discreteness", "optimize"] {
        let out = heckelab(&["verify", suite, "--count", "50"], "");
        assert_eq!(out.status.code(), Some(0), "{suite}");
    }
}
