use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudoboson")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn rep_homomorphism_example_passes() {
    let out = run(&["rep", "--g", "1,1,0,1", "--L", "2", "--check", "homomorphism"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["pass"], true);
    assert_eq!(r["checks"][0]["check"], "homomorphism");
    assert!(r["checks"][0]["deviation"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn quantize_example_tabulates_alternating_closed_form() {
    let out = run(&["quantize", "--weight", "gauss-s", "--s", "0", "--n-max", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["table"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 6);
    for (n, row) in rows.iter().enumerate() {
        let expected = if n % 2 == 0 { 2.0 } else { -2.0 };
        assert_eq!(row["n"], n as u64);
        assert_eq!(row["closed_form"].as_f64().unwrap(), expected);
        assert!((row["numeric"].as_f64().unwrap() - expected).abs() < 1e-9);
    }
    let csv = run(&["quantize", "--weight", "gauss-s", "--s", "0", "--n-max", "5", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,n,closed_form,numeric,rel_error"));
    let col: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(col, vec![2.0, -2.0, 2.0, -2.0, 2.0, -2.0]);
}

#[test]
fn hermite_vacuum_evaluates_to_one() {
    let out = run(&["hermite", "--n1", "0", "--n2", "0", "--eval", "1+1i"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json(&out)["table"][0];
    assert_eq!(row["value_re"].as_f64().unwrap(), 1.0);
    assert_eq!(row["value_im"].as_f64().unwrap(), 0.0);
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        &["rep", "--g", "1,1,1,1"][..],
        &["rep", "--g", "1,2,3"],
        &["rep", "--no-such-flag"],
        &["quantize", "--check", "weight-operator", "--weight", "shifted-gauss"],
        &["suite", "--tol", "1"],
        &["suite", "--criteria", "12"],
        &["hermite", "--eval", "one"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn failing_check_exits_with_one_and_lists_failures() {
    let out = run(&["bounds", "--L-max", "10", "--growth-bits", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["pass"], false);
    assert_eq!(r["failures"], serde_json::json!(["riesz-growth-bits"]));
}

#[test]
fn config_file_supplies_flags_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep\ng = 1,1,0,1\nL = 3\nblock = true\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let r = json(&run(&["rep", "--config", cfg_s]));
    assert_eq!(r["params"]["L"], 3);
    assert_eq!(r["table"].as_array().unwrap().len(), 16);
    let r = json(&run(&["rep", "--config", cfg_s, "--L", "1"]));
    assert_eq!(r["params"]["L"], 1, "explicit flags override the file");

    std::fs::write(&cfg, "L = 3\nunknown = 1\n").unwrap();
    let out = run(&["rep", "--config", cfg_s]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown config key"));
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn reports_are_written_atomically_and_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = run(&["deformed", "--L-max", "4", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(read(&a), read(&b));
    let other = dir.path().join("c.json");
    run(&["deformed", "--L-max", "4", "--seed", "8", "--out", other.to_str().unwrap()]);
    assert_ne!(read(&a), read(&other), "the seed selects the random matrix");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);
}

#[test]
fn suite_runs_selected_criteria() {
    let out = run(&["suite", "--criteria", "1-3,5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["check"].as_str().unwrap()).collect();
    assert_eq!(names, ["criterion-1", "criterion-2", "criterion-3", "criterion-5"]);
    assert_eq!(r["checks"][3]["comparison"], ">=");
}
