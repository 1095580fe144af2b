use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fairdiv::io::{parse_allocation, parse_instance};
use fairdiv::Instance;
use serde_json::Value;
use tempfile::TempDir;

fn fairdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairdiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const PRODUCT_RULE: &str = r#"{"kind": "chores", "valuations": [
    [-4, -4, -1, -1, -1, -1, -1, -1],
    [-4, -4, -1, -1, -4, -4, -4, -4],
    [-4, -4, -4, -4, -1, -1, -4, -4],
    [-4, -4, -4, -4, -4, -4, -1, -1]]}"#;

#[test]
fn mms_value_of_greedy_example() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "row.json", r#"{"valuations": [[12, 6, 6, 3, 3, 3, 3, 1, 1]]}"#);
    let out = fairdiv(&["mms-value", p(&inst), "--agent", "a1", "--bundles", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["value"], 8);
    assert_eq!(doc["partition"].as_array().unwrap().len(), 4);

    let oracle = fairdiv(&["mms-value", p(&inst), "--agent", "0", "--bundles", "4", "--oracle"]);
    assert_eq!(json(&oracle)["value"], 8);
}

#[test]
fn ef1_check_reports_witness() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "inst.json", PRODUCT_RULE);
    let alloc = write(
        &dir,
        "alloc.json",
        r#"{"bundles": {"a1": ["c5", "c6", "c7", "c8"], "a2": ["c3", "c4"], "a3": ["c2"], "a4": ["c1"]}}"#,
    );
    let out = fairdiv(&["check", p(&inst), "--property", "ef1", "--allocation", p(&alloc)]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["holds"], false);
    assert_eq!(doc["witness"]["envious"], "a1");
    assert_eq!(doc["witness"]["envied"], "a2");
}

#[test]
fn ef1po_rejects_goods() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "goods.json", r#"{"valuations": [[1, 2], [2, 1]]}"#);
    let out = fairdiv(&["solve", p(&inst), "--method", "ef1po"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn ef1po_output_round_trips_and_traces() {
    let dir = TempDir::new().unwrap();
    let inst_path = write(&dir, "inst.json", PRODUCT_RULE);
    let trace = dir.path().join("trace.jsonl");
    let out = fairdiv(&["solve", p(&inst_path), "--method", "ef1po", "--trace", p(&trace)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    for cert in ["ef1", "pef1", "po"] {
        assert_eq!(doc["certificates"][cert]["holds"], true, "{cert}");
    }
    let inst: Instance<i64> = parse_instance(PRODUCT_RULE).unwrap();
    let alloc = parse_allocation(&String::from_utf8(out.stdout.clone()).unwrap(), &inst).unwrap();
    assert_eq!(alloc.m(), 8);

    let lines = std::fs::read_to_string(&trace).unwrap();
    let events = fairdiv::fisher::trace::from_json_lines(&lines).unwrap();
    assert!(matches!(events.first(), Some(fairdiv::fisher::TraceEvent::Init { .. })));
    assert!(matches!(events.last(), Some(fairdiv::fisher::TraceEvent::Done { .. })));

    let again = fairdiv(&["solve", p(&inst_path), "--method", "ef1po"]);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn mms_and_mmspo_certify() {
    let dir = TempDir::new().unwrap();
    let wolex = write(
        &dir,
        "wolex.json",
        r#"{"valuations": [[81, 81, 81, 81, 9, 9, 9, 1, 1], [81, 81, 81, 9, 9, 9, 1, 1, 1], [729, 81, 81, 81, 9, 9, 9, 1, 1]]}"#,
    );
    for method in ["mms", "mmspo"] {
        let out = fairdiv(&["solve", p(&wolex), "--method", method]);
        assert_eq!(out.status.code(), Some(0), "{method}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["certificates"]["mms"]["holds"], true);
    }
    let personalized = write(&dir, "pbv.json", r#"{"valuations": [[1, 1, 2, 2], [1, 3, 3, 1]]}"#);
    let out = fairdiv(&["solve", p(&personalized), "--method", "mmspo"]);
    assert_eq!(out.status.code(), Some(3));
    let out = fairdiv(&["solve", p(&personalized), "--method", "mms"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn check_po_and_mms() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "inst.json", r#"{"valuations": [[2, 1], [1, 2]]}"#);
    let swapped = write(&dir, "swapped.json", r#"{"bundles": {"a1": ["g2"], "a2": ["g1"]}}"#);
    for extra in [&[][..], &["--oracle"][..]] {
        let mut args = vec!["check", p(&inst), "--property", "po", "--allocation", p(&swapped)];
        args.extend_from_slice(extra);
        let out = fairdiv(&args);
        assert_eq!(out.status.code(), Some(1));
        assert!(json(&out)["witness"]["dominated_by"].is_object());
    }
    // each agent still gets its share of 1
    let out = fairdiv(&["check", p(&inst), "--property", "mms", "--allocation", p(&swapped)]);
    assert_eq!(out.status.code(), Some(0));
    let starved = write(&dir, "starved.json", r#"{"bundles": {"a1": ["g1", "g2"]}}"#);
    let out = fairdiv(&["check", p(&inst), "--property", "mms", "--allocation", p(&starved), "--oracle"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["witness"]["agent"], "a2");
    let out = fairdiv(&["check", p(&inst), "--property", "ef", "--allocation", p(&swapped)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_is_deterministic_and_parseable() {
    let args = ["gen", "--class", "bivalued", "--kind", "chores", "-n", "3", "-m", "6", "--seed", "1", "--p", "2"];
    let a = fairdiv(&args);
    let b = fairdiv(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let inst: Instance<i64> = parse_instance(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert_eq!((inst.n(), inst.m()), (3, 6));

    let infeasible = fairdiv(&["gen", "--class", "wolex", "--kind", "goods", "-n", "2", "-m", "2", "--tiers", "3"]);
    assert_eq!(infeasible.status.code(), Some(2));
}

#[test]
fn fixtures_pass() {
    let out = fairdiv(&["fixtures"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
}

#[test]
fn bad_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let broken = write(&dir, "broken.json", r#"{"valuations": [[1, -1]]}"#);
    assert_eq!(fairdiv(&["solve", p(&broken), "--method", "mms"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(fairdiv(&["solve", p(&missing), "--method", "mms"]).status.code(), Some(2));
    assert_eq!(fairdiv(&["solve"]).status.code(), Some(2));
}

#[test]
fn big_values() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "big.json",
        r#"{"kind": "chores", "valuations": [["-100000000000000000000", "-200000000000000000000"], ["-200000000000000000000", "-100000000000000000000"]]}"#,
    );
    assert_eq!(fairdiv(&["solve", p(&inst), "--method", "ef1po"]).status.code(), Some(2));
    let out = fairdiv(&["solve", p(&inst), "--method", "ef1po", "--big"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["bundles"]["a1"][0], "c1");
}
