use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn condswap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condswap")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = condswap(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn swap_truth_table_has_four_rows() {
    let v = json(&["truth-table", "swap"]);
    let rows = v["rows"].as_array().unwrap();
    let pairs: Vec<(&str, &str)> =
        rows.iter().map(|r| (r["input"].as_str().unwrap(), r["output"].as_str().unwrap())).collect();
    assert_eq!(pairs, vec![("|00>", "|00>"), ("|01>", "|10>"), ("|10>", "|01>"), ("|11>", "|11>")]);
}

#[test]
fn fredkin_only_exchanges_101_and_110() {
    let v = json(&["truth-table", "fredkin"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    let moved: Vec<_> = rows.iter().filter(|r| r["input"] != r["output"]).map(|r| r["input"].clone()).collect();
    assert_eq!(moved, vec!["|101>", "|110>"]);
}

#[test]
fn unknown_gate_is_usage_error() {
    let out = condswap(&["truth-table", "nosuchgate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nosuchgate"));
}

#[test]
fn missing_phase_is_usage_error() {
    assert_eq!(condswap(&["truth-table", "cphase"]).status.code(), Some(2));
    assert_eq!(condswap(&["truth-table", "cphase", "--phase", "-0.5"]).status.code(), Some(0));
}

#[test]
fn classify_verdicts() {
    let v = json(&["classify", "cnot"]);
    assert_eq!(v["verdict"], "Class1");
    assert_eq!(v["control_side"], "First");
    assert_eq!(v["blocks"][1][0][1], "1+0j");

    let v = json(&["classify", "swap"]);
    assert_eq!(v["verdict"], "Class2");
    assert!(v["blocks"].is_null());

    let v = json(&["classify", "cphase", "--phase", "0.7"]);
    assert_eq!(v["verdict"], "Class1");
    assert_eq!(v["control_side"], "Both");
}

#[test]
fn classify_from_matrix_file() {
    let mut good = tempfile::NamedTempFile::new().unwrap();
    writeln!(good, "# DCNOT\n1 0 0 0\n0 0 0 1\n0 1 0 0\n0 0 1 0").unwrap();
    let v = json(&["classify", "--file", good.path().to_str().unwrap()]);
    assert_eq!(v["verdict"], "Class2");

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "1 1\n0 1").unwrap();
    let out = condswap(&["classify", "--file", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not unitary"));

    let out = condswap(&["classify", "--file", "/nonexistent/matrix.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_all_branches_counts_and_ledgers() {
    for (protocol, branches, ebits, cbits) in [
        ("teleport", 4, 1, 2),
        ("nonlocal-cnot", 4, 1, 2),
        ("nonlocal-swap-teleport", 16, 2, 4),
        ("nonlocal-swap-3cnot", 64, 3, 6),
    ] {
        let v = json(&["simulate", protocol, "--all-branches"]);
        assert_eq!(v["protocol"], protocol);
        assert_eq!(v["branches"].as_array().unwrap().len(), branches, "{protocol}");
        assert_eq!(v["ledger"]["ebits"], ebits, "{protocol}");
        assert_eq!(v["ledger"]["cbits"], cbits, "{protocol}");
        assert!(v["min_fidelity"].as_f64().unwrap() >= 1.0 - 1e-12);
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn simulate_bell_input() {
    let v = json(&["simulate", "nonlocal-swap-teleport", "--all-branches", "--input", "psi-"]);
    assert_eq!(v["branches"].as_array().unwrap().len(), 16);
    assert_eq!(condswap(&["simulate", "teleport", "--seed", "1", "--input", "ghz"]).status.code(), Some(2));
}

#[test]
fn sampling_without_seed_is_usage_error() {
    let out = condswap(&["simulate", "teleport"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn same_seed_is_byte_identical() {
    let a = condswap(&["--json", "simulate", "nonlocal-swap-3cnot", "--seed", "9"]);
    let b = condswap(&["--json", "simulate", "nonlocal-swap-3cnot", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = condswap(&["--json", "simulate", "nonlocal-swap-3cnot", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_passes() {
    let out = condswap(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("nonlocal SWAP ledger = (2 ebits, 4 cbits): PASS"));
    assert!(!text.contains(": FAIL"));
}
