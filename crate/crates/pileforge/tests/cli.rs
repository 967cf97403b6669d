//! End-to-end tests of the command-line interface: outputs match direct
//! library calls, JSON mode parses back, and exit codes follow the
//! success / domain-error / usage-error / capacity convention.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pileforge"))
}

fn write(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

const Z4: &str = r#"{"order": 4, "mul": [[0,1,2,3],[1,2,3,0],[2,3,0,1],[3,0,1,2]], "name": "Z4"}"#;

const QUAD: &str = r#"{
  "group": {"order": 2, "mul": [[0,1],[1,0]]},
  "roots": ["r1", "r2"],
  "action": {"1": [1, 0]},
  "polys": {"f": ["r1", "r2"]},
  "splits_totally": ["f"],
  "e": 1
}"#;

#[test]
fn group_rank_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let z4 = write(dir.path(), "z4.json", Z4);
    let out = bin().args(["group", "rank", "--in"]).arg(&z4).output().unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1");
}

#[test]
fn measure_exact_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let quad = write(dir.path(), "quad.json", QUAD);
    let out = bin()
        .args(["measure", "exact", "--scenario"])
        .arg(&quad)
        .args(["--sentence", "Exists(f)"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1/2");
}

#[test]
fn json_output_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let z4 = write(dir.path(), "z4.json", Z4);
    let out = bin()
        .args(["group", "subgroups", "--format", "json", "--in"])
        .arg(&z4)
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["count"], 3);
    assert_eq!(value["subgroups"].as_array().unwrap().len(), 3);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_group_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"order": 2, "mul": [[0,1],[1,1]]}"#,
    );
    let out = bin().args(["group", "validate", "--in"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn capacity_is_exit_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let big = QUAD.replace("\"e\": 1", "\"e\": 40");
    let sc = write(dir.path(), "big.json", &big);
    let out = bin()
        .args(["measure", "exact", "--scenario"])
        .arg(&sc)
        .args(["--sentence", "Exists(f)"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn compile_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let ring = dir.path().join("f.ring");
    let out = bin()
        .args(["compile", "cocompile", "--formula", "exists v in G2 . not P(v,v,v)", "--out"])
        .arg(&ring)
        .output()
        .unwrap();
    assert!(out.status.success());
    for mode in ["guided", "brute"] {
        let out = bin()
            .args(["compile", "eval-ff", "--in"])
            .arg(&ring)
            .args(["--q", "2", "--max-degree", "2", "--mode", mode])
            .output()
            .unwrap();
        assert!(out.status.success());
        assert_eq!(stdout(&out), "true", "{mode}");
    }
}

#[test]
fn catalog_env_override() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "only.json", Z4);
    let out = bin()
        .env("PILEFORGE_CATALOG", dir.path())
        .args(["catalog", "list"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("Z4"));
}

#[test]
fn catalog_dump_writes_valid_groups() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("groups");
    let out = bin().args(["catalog", "dump", "--out"]).arg(&out_dir).output().unwrap();
    assert!(out.status.success());
    let count = std::fs::read_dir(&out_dir).unwrap().count();
    assert_eq!(count, 42);
    // every dumped file revalidates
    for entry in std::fs::read_dir(&out_dir).unwrap() {
        let path = entry.unwrap().path();
        let out = bin().args(["group", "validate", "--in"]).arg(&path).output().unwrap();
        assert!(out.status.success(), "{path:?}");
    }
}

#[test]
fn isys_encode_decode_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let pile = write(
        dir.path(),
        "pile.json",
        r#"{"group": "z4.json", "families": {"p": [[0]]}}"#,
    );
    write(dir.path(), "z4.json", Z4);
    let sys = dir.path().join("sys.json");
    let out = bin()
        .args(["isys", "encode", "--in"])
        .arg(&pile)
        .arg("--out")
        .arg(&sys)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out), "7 points, 3 levels");
    let out = bin().args(["isys", "decode", "--in"]).arg(&sys).output().unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("order 4"));
    let out = bin()
        .args(["co", "eval", "--system"])
        .arg(&sys)
        .args(["--formula", "exists v in G2 . not P(v,v,v)"])
        .output()
        .unwrap();
    assert_eq!(stdout(&out), "true");
}
