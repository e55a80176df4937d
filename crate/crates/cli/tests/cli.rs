//! End-to-end behaviour of the `hypermult` binary.

use std::path::Path;
use std::process::{Command, Output};

use hypermult_core::families::two_piece_family;

fn hypermult(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypermult"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn decompose_two_piece_family() {
    let dir = tempfile::tempdir().unwrap();
    let d = two_piece_family(6, 1e-3, 2.0).unwrap();
    let input = write(dir.path(), "d.json", &serde_json::to_string(&d).unwrap());
    let o = hypermult(&["decompose", "--input", &input, "--epsilon", "0.01"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(r["thick_components"], 2);
    assert_eq!(r["n_short"], 7);
}

#[test]
fn decompose_without_short_curves() {
    let dir = tempfile::tempdir().unwrap();
    let d = two_piece_family(3, 1.0, 2.0).unwrap();
    let input = write(dir.path(), "d.json", &serde_json::to_string(&d).unwrap());
    let o = hypermult(&["decompose", "--input", &input, "--epsilon", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(r["thick_components"], 1);
    assert_eq!(r["thin_area"], 0.0);
}

#[test]
fn malformed_descriptor_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.json", r#"{"genus": 2, "curves": [{"id": "a", "ends": [0, 1]}]}"#);
    let o = hypermult(&["decompose", "--input", &input, "--epsilon", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("length"), "{}", stderr(&o));
}

#[test]
fn invalid_descriptor_names_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "bad.json",
        r#"{"genus": 2, "curves": [
            {"id": "a", "length": 1.0, "ends": [0, 0]},
            {"id": "b", "length": 1.0, "ends": [0, 1]},
            {"id": "c", "length": 1.0, "ends": [0, 1]}]}"#,
    );
    let o = hypermult(&["decompose", "--input", &input, "--epsilon", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("degree"), "{}", stderr(&o));
}

#[test]
fn decompose_trim_beyond_collar_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = two_piece_family(3, 1.0, 2.0).unwrap();
    let input = write(dir.path(), "d.json", &serde_json::to_string(&d).unwrap());
    let o = hypermult(&["decompose", "--input", &input, "--epsilon", "0.6", "--trim", "5"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn bounds_single_point() {
    let o = hypermult(&["bounds", "--genus", "1000000", "--epsilon", "0.25", "--thm1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    let thm1 = r["thm1_bound"].as_f64().unwrap();
    assert!((thm1 / 5.7554e6 - 1.0).abs() < 1e-4);
    assert_eq!(r["stronger"], "thm1");
    assert_eq!(r["h"], 500_050.0);
    assert_eq!(r["constants"]["K"]["provenance"], "default");
}

#[test]
fn bounds_second_theorem_needs_lambda() {
    let o = hypermult(&["bounds", "--genus", "10000", "--epsilon", "1e-6", "--thm2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("lambda required"), "{}", stderr(&o));
}

#[test]
fn bounds_second_theorem_value() {
    let o = hypermult(&[
        "bounds", "--genus", "10000", "--epsilon", "1e-6", "--lambda", "0.01", "--i-thick", "2", "--thm2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["thm2_bound"], 1048.0);
}

#[test]
fn bounds_domain_error_exits_3() {
    let o = hypermult(&["bounds", "--genus", "100", "--epsilon", "1.0", "--thm1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn fault_injection_fails_the_mode_suite() {
    let o = hypermult(&["verify", "--suite", "modes", "--perturb-ratio", "1.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mass ratio"), "{}", stderr(&o));
    assert_eq!(json(&o)["passed"], false);
}

#[test]
fn single_suite_runs_alone() {
    let o = hypermult(&["verify", "--suite", "kernel"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    let suites = r["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["suite"], "kernel");
}

#[test]
fn sweep_two_piece_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = hypermult(&[
        "sweep", "--family", "two-piece", "--genus", "10,100,1000", "--epsilon", "0.02",
        "--lambda", "0.001,0.04,0.2", "--delta", "0.45", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("g,eps,lambda,N_eps,I_eps,thm1,thm2,stronger"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(r[4], "2");
        if r[2] == "2.0000000000000001e-1" {
            // lambda above 1/4 - delta^2: only the first bound applies
            assert_eq!((r[6], r[7]), ("", "thm1"));
        } else {
            assert_eq!(r[7], "thm2");
        }
    }
}

#[test]
fn sweep_sparse_family_first_bound_increases_with_genus() {
    let o = hypermult(&[
        "sweep", "--family", "sparse", "--genus", "1000,10000,100000,1000000", "--epsilon", "0.25",
        "--lambda", "0.1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let thm1: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(thm1.len(), 4);
    assert!(thm1.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn net_on_sampled_ball_and_csv_cloud() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("cloud.csv");
    let o = hypermult(&[
        "net", "--epsilon", "1", "--radius", "8", "--points", "2000", "--r", "4", "--seed", "3",
        "--cloud-output", cloud.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(r["net"]["is_separated"], true);
    assert_eq!(r["net"]["is_net"], true);
    assert!(r["size"].as_f64().unwrap() <= r["cardinality_bound"]["value"].as_f64().unwrap());

    let again = hypermult(&["net", "--input", cloud.to_str().unwrap(), "--epsilon", "1", "--r", "4"]);
    assert_eq!(again.status.code(), Some(0), "{}", stderr(&again));
    assert_eq!(json(&again)["net"]["selected"], r["net"]["selected"]);
}

#[test]
fn thread_cap_must_be_positive() {
    let o = Command::new(env!("CARGO_BIN_EXE_hypermult"))
        .args(["verify", "--suite", "constants"])
        .env("HYPERMULT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}
