use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const VTREF: &str = "O1+O2+U1+U2+";
const TREFOIL: &str = "O1+U2+O3+U1+O2+U3+";

fn zhknot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zhknot")).args(args).output().expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_zhknot"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn vtref_invariants() {
    let v = json(&zhknot(&["invariants", VTREF, "--json"]));
    assert_eq!(v["dkm"], "A^2 + K1 - A^-4*K1");
    assert_eq!(v["zh"], "A^2 + Z1 - A^-4*Z1");
    assert_eq!(v["writhe"], 2);
    assert_eq!(v["numerable"], false);
    assert_eq!(v["as_set"], serde_json::json!([0, 1]));
    assert_eq!(v["violations"], serde_json::json!([]));
    for field in ["code", "components", "crossings", "jones", "dkm_normalized", "zh_normalized", "quandles"] {
        assert!(v.get(field).is_some(), "missing {field}");
    }
}

#[test]
fn vtref_quandles_and_cocycle() {
    let v = json(&zhknot(&["invariants", VTREF, "--quandle", "alexander:7:3", "--json"]));
    assert_eq!(v["quandles"][0]["colorings"], 7);
    assert_eq!(v["quandles"][0]["extended_colorings"], 7);
    assert!(v["quandles"][0].get("cocycle").is_none());

    let v = json(&zhknot(&["invariants", VTREF, "--quandle", "dihedral:4", "--cocycle", "cjkls", "--json"]));
    let q = &v["quandles"][0];
    assert_eq!(q["size"], 4);
    assert_eq!(q["extended_colorings"], 16);
    assert_eq!(q["cocycle"], "4");
    assert!(q["extended_cocycle"].is_string());
}

#[test]
fn unknot_report_is_trivial() {
    let v = json(&zhknot(&["invariants", "", "--json"]));
    assert_eq!(v["crossings"], 0);
    assert_eq!(v["jones"], "1");
    assert_eq!(v["numerable"], true);
    assert_eq!(v["as_set"], serde_json::json!([0]));
}

#[test]
fn code_from_stdin() {
    let a = with_stdin(&["invariants", "--json"], &format!("{VTREF}\n"));
    let b = with_stdin(&["invariants", "-", "--json"], VTREF);
    assert_eq!(json(&a)["dkm"], "A^2 + K1 - A^-4*K1");
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn text_output() {
    let out = zhknot(&["invariants", VTREF]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("dkm        A^2 + K1 - A^-4*K1"), "{text}");
    assert!(text.contains("as_set     {0, 1}"), "{text}");
}

#[test]
fn parse_round_trip() {
    let v = json(&zhknot(&["parse", "O1+U2-O2-U1+", "--json"]));
    assert_eq!(v["code"], "O1+U2-O2-U1+");
    assert_eq!(v["crossings"], 2);
    assert_eq!(v["writhe"], 0);
}

#[test]
fn bad_input_exits_2() {
    let out = zhknot(&["parse", "O1+U1+O2x"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: "), "{err}");
    assert!(err.contains('^'), "{err}");
    assert!(out.stdout.is_empty());

    assert_eq!(zhknot(&["invariants", VTREF, "--quandle", "dihedral:x"]).status.code(), Some(2));
    assert_eq!(zhknot(&["invariants", VTREF, "--cocycle", "cjkls"]).status.code(), Some(2));
    let mismatch = zhknot(&["invariants", VTREF, "--quandle", "alexander:7:3", "--cocycle", "cjkls"]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn large_state_sums_need_force() {
    let big: String = (1..=11).map(|i| format!("O{i}+U{i}+")).chain((12..=22).map(|i| format!("O{i}-U{i}-"))).collect();
    let out = zhknot(&["invariants", &big]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
}

#[test]
fn zh_examples() {
    let v = json(&zhknot(&["zh", VTREF, "--json"]));
    assert_eq!(v["orientation"], "op");
    assert_eq!(v["omega_passages"], 4);
    assert_eq!(v["valid"], true);
    assert!(v["system"].is_object());

    let v = json(&zhknot(&["zh", TREFOIL, "--orientation", "standard", "--json"]));
    assert_eq!(v["orientation"], "standard");
    assert_eq!(v["omega_passages"], 6);
    assert_eq!(v["valid"], true);

    let v = json(&zhknot(&["zh", "", "--json"]));
    assert_eq!(v["omega_passages"], 0);
    assert_eq!(v["code"], ",");
}

#[test]
fn canonicalize_zh_output() {
    let dir = std::env::temp_dir().join(format!("zhknot-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("vtref-zh.json");
    std::fs::write(&path, zhknot(&["zh", VTREF, "--json"]).stdout).unwrap();

    let from_file = json(&zhknot(&["canonicalize", "--system", path.to_str().unwrap(), "--json"]));
    let from_code = json(&zhknot(&["canonicalize", VTREF, "--json"]));
    assert_eq!(from_file, from_code);
    assert_eq!(from_code["gamma_crossings"], 2);

    let junk = dir.join("junk.json");
    std::fs::write(&junk, "{\"nope\": 1}").unwrap();
    assert_eq!(zhknot(&["canonicalize", "--system", junk.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn fuzz_pass_and_violation() {
    let v = json(&zhknot(&["fuzz", VTREF, "--steps", "40", "--seed", "3", "--quandle", "dihedral:3", "--json"]));
    assert_eq!(v["steps"], 40);
    assert!(v.get("failure").is_none());
    assert!(v["checked"].as_array().unwrap().iter().any(|f| f == "colorings[dihedral:3]"));

    let out = zhknot(&["fuzz", TREFOIL, "--kinds", "bad-r2", "--steps", "5", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let step = v["failure"]["step"].as_u64().unwrap();
    assert_eq!(v["log"].as_array().unwrap().len() as u64, step);
}

#[test]
fn fuzz_zh_walk() {
    let out = zhknot(&["fuzz", VTREF, "--zh", "--steps", "30", "--seed", "1", "--quandle", "dihedral:4", "--cocycle", "cjkls"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).starts_with("pass"));
}

#[test]
fn quandle_list() {
    let v = json(&zhknot(&["quandles", "list", "--max-size", "4", "--json"]));
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|q| q["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"dihedral:4"));
    assert!(names.iter().all(|n| !n.contains(":5")));
}
