use std::process::{Command, Output};

use serde_json::Value;

fn qmsirr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmsirr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_rotation_example() {
    let out = qmsirr(&["analyze", "so3", "--no-monte-carlo", "--probes", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["irreducible"], true);
    assert_eq!(r["larc"]["result"]["verdict"]["FailsAt"][0], serde_json::json!([1.0, 0.0]));
    assert_eq!(r["larc"]["method"], "lie-closure-sampled");
    assert!(r["larc"]["tolerance"]["rel_rank_tol"].is_number());
}

#[test]
fn analyze_pure_hamiltonian_with_monte_carlo() {
    let out = qmsirr(&["analyze", "pure-hamiltonian", "--probes", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["irreducible"], false);
    assert_eq!(r["minimality"]["minimal"], true);
    assert_eq!(r["minimality"]["minimal_m"], 0);
    let methods: Vec<&str> = r["irreducibility"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["method"].as_str().unwrap())
        .collect();
    assert_eq!(methods, ["algebra-gl", "algebra-delta", "monte-carlo-totality"]);
}

#[test]
fn analyze_records_both_representation_sizes() {
    let out = qmsirr(&["analyze", "pure-hamiltonian-dilated", "--no-monte-carlo", "--probes", "3"]);
    let r = json(&out);
    assert_eq!(r["minimality"]["minimal"], false);
    assert_eq!(r["minimality"]["original_m"], 1);
    assert_eq!(r["minimality"]["minimal_m"], 0);
}

#[test]
fn reports_are_deterministic() {
    let args = ["analyze", "pauli", "--probes", "3", "--seed", "4"];
    assert_eq!(qmsirr(&args).stdout, qmsirr(&args).stdout);
}

#[test]
fn simulate_writes_csv_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("paths.csv");
    let out = qmsirr(&[
        "simulate", "pauli", "--xi", "1,0", "--t", "1", "--traj", "2000", "--steps", "200", "--seed", "7",
        "--csv", csv.to_str().unwrap(),
    ]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(0), "{err}");
    assert!(err.starts_with("PASS"), "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("traj_id,step,t,re_0,im_0,re_1,im_1"));
    assert_eq!(text.lines().count(), 1 + 2000 * 101);
    let r = json(&out);
    assert_eq!(r["representation"]["pass"], true);
    assert_eq!(r["ensemble"]["n_traj"], 2000);
}

#[test]
fn support_of_pure_hamiltonian_is_a_line() {
    let out = qmsirr(&["support", "pure-hamiltonian", "--xi", "1,1", "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["rank"], 1);
    assert_eq!(r["state_rank"], 1);
}

#[test]
fn model_files_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("trivial.json");
    std::fs::write(&good, r#"{"dim": 1, "H": [[[0, 0]]], "L": []}"#).unwrap();
    let out = qmsirr(&["larc", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim": 2, "H": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]], "L": []}"#).unwrap();
    let out = qmsirr(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("H[0][1]"));

    assert_eq!(qmsirr(&["analyze", "no-such-model"]).status.code(), Some(1));
    assert_eq!(qmsirr(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qmsirr(&["analyze", "so3", "--bogus"]).status.code(), Some(1));
    assert_eq!(qmsirr(&["simulate", "so3", "--xi", "1,0"]).status.code(), Some(1));
}

#[test]
fn generic_rates_report() {
    let dir = tempfile::tempdir().unwrap();
    let rates = dir.path().join("rates.json");
    std::fs::write(&rates, r#"{"dim": 3, "gamma": [[0, 1, 0], [0, 0, 1], [1, 0, 0]], "energies": [0, 1, 2]}"#)
        .unwrap();
    let out = qmsirr(&["generic", rates.to_str().unwrap(), "--probes", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["chain"]["irreducible"], true);
    assert_eq!(r["larc"]["verdict"], "Holds");
}

#[test]
fn examples_lists_catalog() {
    let out = qmsirr(&["examples"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["pauli", "pure-hamiltonian", "so3", "generic-cycle-3"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn selftest_subset() {
    let out = qmsirr(&["selftest", "--only", "1,3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
    assert_eq!(qmsirr(&["selftest", "--only", "11"]).status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("larc.json");
    let out = qmsirr(&["larc", "so3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["lie_dim"], 3);
}
