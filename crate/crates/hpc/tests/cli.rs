//! End-to-end tests of the command line binary: golden outputs, exit codes,
//! stderr notes, and byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn hpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpc")).args(args).output().expect("spawn hpc")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

#[test]
fn enumerate_matches_the_reference_listing() {
    let out = hpc(&["enumerate", data("golden.json").to_str().unwrap(), "--max-len", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "abA\naBA\n");
    assert!(out.stderr.is_empty(), "unexpected notes: {:?}", out.stderr);
}

#[test]
fn decide_reports_the_expected_verdicts() {
    let out = hpc(&["decide", data("golden.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "not_regular");
    assert_eq!(v["fired"], "test3");
    assert_eq!(v["orientation"], "forward");
    assert_eq!(v["witness"]["v"], "a");
    assert_eq!(v["stats"]["bridges"], 9);

    let out = hpc(&["decide", data("regular.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "regular");
    assert_eq!(v["fired"], "none");
    assert!(v["witness"].is_null());

    let out = hpc(&["decide", data("pumping_pair.json").to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["fired"], "test2");
}

#[test]
fn decide_flags_change_the_route_not_the_verdict() {
    let golden = data("golden.json");
    let golden = golden.to_str().unwrap();
    let plain = hpc(&["decide", golden]);
    let direct = hpc(&["decide", golden, "--no-fast-path"]);
    assert_eq!(plain.stdout, direct.stdout);
    let forward = hpc(&["decide", golden, "--orientation", "forward"]);
    assert_eq!(plain.stdout, forward.stdout);
}

#[test]
fn grammar_lists_rules_and_counts() {
    let out = hpc(&["grammar", data("golden.json").to_str().unwrap(), "--max-len", "5"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("axioms: "));
    assert!(text.contains(" -> 1\n"));
    assert!(text.contains("counts by length:\n0: 0\n1: 0\n2: 0\n3: 2\n4: 3\n5: 5\n"));
}

#[test]
fn growth_reports_indicators_and_series() {
    let out = hpc(&["growth", data("golden.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["lambda"]["class"], "polynomial");
    assert_eq!(v["eta"]["indicator"], 1.0);
    assert_eq!(v["bounds_ok"], true);
    assert!(v["regular_equality_ok"].is_null());
    assert_eq!(v["series"]["hairpin"]["numerator"], serde_json::json!(["0", "0", "0", "2", "1"]));
    assert_eq!(v["series"]["hairpin"]["denominator"], serde_json::json!(["1", "-1", "-1", "1"]));
    assert_eq!(v["series"]["l1"]["numerator"], serde_json::json!(["0", "0", "2"]));
    assert_eq!(v["series"]["ov_l2"]["denominator"], serde_json::json!(["1", "-1"]));

    let out = hpc(&["growth", data("regular.json").to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["regular_equality_ok"], true);
}

#[test]
fn check_passes_on_the_shipped_instances() {
    for name in ["golden.json", "regular.json", "pumping_pair.json", "golden_partial.json"] {
        let out = hpc(&["check", data(name).to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        for key in [
            "oracle_grammar_ok",
            "decomposition_ok",
            "unambiguity_ok",
            "unique_path_ok",
            "witness_ok",
            "fast_direct_ok",
            "growth_bounds_ok",
            "growth_identity_ok",
            "series_ok",
            "composed_series_ok",
        ] {
            assert_eq!(v[key], true, "{name}: {key}");
        }
        assert_eq!(v["window_disagreement"], false, "{name}");
        assert_ne!(v["regular_equality_ok"], false, "{name}");
    }
}

#[test]
fn identical_runs_produce_identical_bytes() {
    for sub in ["decide", "grammar", "growth", "enumerate", "check"] {
        let a = hpc(&[sub, data("golden.json").to_str().unwrap()]);
        let b = hpc(&[sub, data("golden.json").to_str().unwrap()]);
        assert_eq!(a.stdout, b.stdout, "{sub}");
    }
}

#[test]
fn conversion_notes_go_to_stderr() {
    let out = hpc(&["enumerate", data("golden_partial.json").to_str().unwrap(), "--max-len", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "abA\naBA\n");
    let notes = String::from_utf8_lossy(&out.stderr);
    assert!(notes.contains("dfa_l1") && notes.contains("sink"), "{notes}");
}

#[test]
fn kappa_override_is_applied() {
    let out = hpc(&["enumerate", data("golden.json").to_str().unwrap(), "--kappa", "2", "--max-len", "5"]);
    assert_eq!(code(&out), 0);
    // With a two-letter primer every completion word needs at least two
    // trailing complements: abA and aBA are gone.
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(!text.contains("abA\n"));
    for line in text.lines() {
        assert!(line.len() >= 5, "{line}");
    }
}

#[test]
fn input_problems_exit_two() {
    let cases: &[&[&str]] = &[
        &["decide", "does_not_exist.json"],
        &["decide", "Cargo.toml"],
        &["enumerate", "tests/data/bad_letter.json"],
        &["decide", "tests/data/golden.json", "--kappa", "0"],
        &["grammar", "tests/data/golden.json", "--kappa", "9"],
        &["enumerate", "tests/data/golden.json", "--max-len", "99"],
        &["decide", "tests/data/golden.json", "--orientation", "sideways"],
    ];
    for args in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_hpc"))
            .current_dir(env!("CARGO_MANIFEST_DIR"))
            .args(*args)
            .output()
            .expect("spawn hpc");
        assert_eq!(code(&out), 2, "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_hpc"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(["enumerate", "tests/data/bad_letter.json"])
        .output()
        .expect("spawn hpc");
    assert!(String::from_utf8_lossy(&out.stderr).contains("undeclared letter"));
}

#[test]
fn enumeration_cap_is_adjustable() {
    let golden = data("golden.json");
    let golden = golden.to_str().unwrap();
    let refused = hpc(&["enumerate", golden, "--max-len", "15"]);
    assert_eq!(code(&refused), 2);
    let raised = Command::new(env!("CARGO_BIN_EXE_hpc"))
        .args(["enumerate", golden, "--max-len", "15"])
        .env("HPC_MAX_LEN", "16")
        .output()
        .expect("spawn hpc");
    assert_eq!(code(&raised), 0);
    let text = String::from_utf8_lossy(&raised.stdout);
    assert!(text.lines().any(|l| l.len() == 15));
}
