//! End-to-end tests of the binary: exit codes, JSON shape, determinism,
//! input-file handling and usage errors.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nielsen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn decide_equivalent_pair_exits_zero() {
    let out = run(&[
        "decide",
        "--exponents", "5,5,5,5,5",
        "--u", "1,1,1,1", "--missing-u", "5",
        "--v", "4,1,1,1", "--missing-v", "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("verdict: equivalent"));
}

#[test]
fn decide_inequivalent_pair_exits_zero() {
    let out = run(&[
        "decide",
        "--exponents", "5,5,5,5,5",
        "--u", "1,1,1,1", "--missing-u", "5",
        "--v", "2,1,1,1", "--missing-v", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: inequivalent"));
}

#[test]
fn exceptional_classify_exits_two() {
    let out = run(&["classify", "--exponents", "7,7,7", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("condition (a)"));
}

#[test]
fn exceptional_decide_exits_two() {
    let out = run(&[
        "decide",
        "--exponents", "7,7,7",
        "--u", "1,1", "--missing-u", "3",
        "--v", "2,1", "--missing-v", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("unknown"));
}

#[test]
fn usage_error_exits_sixty_four() {
    let out = run(&["decide", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn missing_flags_exit_one() {
    let out = run(&["decide", "--exponents", "5,5,5,5,5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn scan_pi_clean_exits_zero() {
    let out = run(&["scan-pi", "--p", "5", "--q", "5", "--r", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 violations"));
}

#[test]
fn scan_pi_json_parses() {
    let out = run(&["scan-pi", "--p", "3", "--q", "6", "--r", "1,1/2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["p"], 3);
    assert_eq!(doc["q"], 6);
    assert!(doc["violations"].as_array().unwrap().is_empty());
}

#[test]
fn rep_builds_and_verifies() {
    let out = run(&["rep", "--exponents", "5,5,5,5,5", "--seed", "7", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["verification"]["pass"], true);
    assert!(doc["representation"]["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn rep_output_is_deterministic_per_seed() {
    let a = stdout(&run(&["rep", "--exponents", "7,5,3,4", "--seed", "11", "--json"]));
    let b = stdout(&run(&["rep", "--exponents", "7,5,3,4", "--seed", "11", "--json"]));
    let c = stdout(&run(&["rep", "--exponents", "7,5,3,4", "--seed", "12", "--json"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn certify_inequivalent_pair() {
    let out = run(&[
        "certify",
        "--exponents", "5,5,5,5,5",
        "--u", "1,1,1,1", "--missing-u", "5",
        "--v", "2,1,1,1", "--missing-v", "5",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["verdict"], "Inequivalent");
}

#[test]
fn certify_all_skipped_exits_two() {
    // pairwise coprime exponents leave no usable position
    let out = run(&[
        "certify",
        "--exponents", "7,5,4,3,11",
        "--u", "1,1,1,1", "--missing-u", "5",
        "--v", "2,1,1,1", "--missing-v", "5",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("AllSkipped"));
}

#[test]
fn certify_rejects_unknown_backend() {
    let out = run(&[
        "certify",
        "--exponents", "5,5,5,5,5",
        "--u", "1,1,1,1", "--missing-u", "5",
        "--v", "2,1,1,1", "--missing-v", "5",
        "--backend", "quantum",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decide_and_certify_agree_via_json() {
    for v_first in ["1", "2", "3", "4"] {
        let common = [
            "--exponents", "5,5,5,5,5",
            "--u", "1,1,1,1", "--missing-u", "5",
            "--v", &format!("{v_first},1,1,1"), "--missing-v", "5",
            "--json",
        ];
        let mut decide_args = vec!["decide"];
        decide_args.extend_from_slice(&common.iter().map(|s| *s).collect::<Vec<_>>());
        let mut certify_args = vec!["certify"];
        certify_args.extend_from_slice(&common.iter().map(|s| *s).collect::<Vec<_>>());
        let d: serde_json::Value = serde_json::from_str(&stdout(&run(&decide_args))).unwrap();
        let c: serde_json::Value = serde_json::from_str(&stdout(&run(&certify_args))).unwrap();
        match d["verdict"].as_str().unwrap() {
            "Equivalent" => assert_eq!(c["verdict"], "Consistent"),
            "Inequivalent" => assert_eq!(c["verdict"], "Inequivalent"),
            other => panic!("unexpected verdict {other}"),
        }
    }
}

#[test]
fn input_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("problem.toml");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(
        f,
        concat!(
            "[group]\nexponents = [5, 5, 5, 5, 5]\n\n",
            "[gensys]\nmissing = 5\nexponents = [1, 1, 1, 1]\n\n",
            "[gensys_v]\nmissing = 4\nexponents = [1, 1, 1, 1]\n",
        )
    )
    .unwrap();
    let out = run(&["decide", "--input", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["verdict"], "Equivalent");
    assert!(doc["certificate"].is_object());
}

#[test]
fn crosscap_presentation_via_flags() {
    let out = run(&[
        "decide",
        "--exponents", "5,5,5,5,5",
        "--crosscaps", "2",
        "--u", "1,1,1,1", "--missing-u", "5",
        "--v", "2,1,1,1", "--missing-v", "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("verdict: inequivalent"));
}

#[test]
fn extra_relator_presentation_parses() {
    let out = run(&[
        "classify",
        "--exponents", "5,5,5,5,5",
        "--extra-relator", "d1 d2^-1 d1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("decide/certify agreement sweep: pass"));
    assert!(!text.contains("fail"));
}

#[test]
fn classify_json_round_trips() {
    let out = run(&["classify", "--exponents", "8,5,4,4", "--n", "2", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["exceptional"], "c");
}
