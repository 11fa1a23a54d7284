use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn nslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nslab")).args(args).output().expect("spawn nslab")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report on stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn model_eps1_has_two_hyperbola_components() {
    let out = nslab(&["verify-near-symplectic", "--fixture", "model-eps1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["schema"], nslab::SCHEMA);
    assert_eq!(r["passed"], true);
    let comps = r["data"]["zero_set"]["zero_components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    assert!(comps.iter().all(|c| c["kind"] == "hyperbola-branch"));
}

#[test]
fn model_eps0_lines_are_checked_and_origin_fails() {
    let out = nslab(&["verify-near-symplectic", "--fixture", "model-eps0"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(r["first_failure"].as_str().unwrap().starts_with("near-symplectic"));
    let zs = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "zero-set").unwrap();
    assert_eq!(zs["passed"], true);
}

#[test]
fn neck_sim_csv_and_fit_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = nslab(&["neck-sim", "--T", "4..12", "--ladder", "2,3", "--format", "csv", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("T,u_norm,tail1,tail2,"));
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), 10);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    let slope = r["data"]["tail1_fit"]["slope"].as_f64().unwrap();
    assert!((slope + 2.0).abs() <= 0.05, "{slope}");
}

#[test]
fn csv_to_stdout_uses_dot_decimals() {
    let out = nslab(&["period-jacobian", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("row,col,value"));
    for l in lines {
        let v: Vec<&str> = l.split(',').collect();
        assert_eq!(v.len(), 3);
        v[2].parse::<f64>().unwrap();
    }
}

#[test]
fn malformed_fixture_reports_location() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "# dim=4 deg=2\n[1,2] : x1 + x7\n").unwrap();
    let out = nslab(&["verify-near-symplectic", "--fixture", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2, column 14"), "{}", stderr(&out));
}

#[test]
fn fixture_file_is_verified() {
    let w = nslab_core::nearsym::build_model_form(&nslab_core::int(1)).unwrap();
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(nslab::format::write_form(&w).as_bytes()).unwrap();
    let out = nslab(&["verify-near-symplectic", "--fixture", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn unknown_flag_and_fixture_exit_2() {
    assert_eq!(nslab(&["neck-sim", "--bogus"]).status.code(), Some(2));
    assert_eq!(nslab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nslab(&["overtwisted", "--fixture", "nope"]).status.code(), Some(2));
    assert_eq!(nslab(&["period-jacobian", "--T", "4..6"]).status.code(), Some(2));
    assert_eq!(nslab(&["neck-sim", "--ladder", "3,2"]).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "seed = 3\n[period-jacobian]\nfixture = \"redundant\"\n").unwrap();
    let path = f.path().to_str().unwrap();
    let out = nslab(&["period-jacobian", "--config", path]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["settings"]["seed"], 3);
    assert!(r["first_failure"].as_str().unwrap().starts_with("nonsingular"));
    let out = nslab(&["period-jacobian", "--config", path, "--fixture", "generic", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["settings"]["seed"], 4);
}

#[test]
fn unknown_config_key_exits_2() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "seed = 3\nsede = 4\n").unwrap();
    let out = nslab(&["neck-sim", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["neck-sim", "--seed", "11", "--jobs", "1"][..],
        &["neck-sim", "--seed", "11", "--jobs", "4"][..],
        &["verify-near-contact", "--jobs", "3"][..],
    ] {
        let a = nslab(args);
        let b = nslab(args);
        assert_eq!(a.stdout, b.stdout);
    }
    let one = nslab(&["neck-sim", "--seed", "11", "--jobs", "1"]).stdout;
    let four = nslab(&["neck-sim", "--seed", "11", "--jobs", "4"]).stdout;
    assert_eq!(one, four);
}

#[test]
fn near_contact_and_overtwisted_pass() {
    let out = nslab(&["verify-near-contact"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = nslab(&["overtwisted", "--eps", "0.2,0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(report(&out)["data"]["families"].as_array().unwrap().len(), 2);
}

#[test]
fn uncompensated_family_fails() {
    let out = nslab(&["overtwisted", "--fixture", "overtwisted-uncompensated", "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn resolution_and_identity_jacobian_pass() {
    assert_eq!(nslab(&["resolution-sweep"]).status.code(), Some(0));
    let out = nslab(&["period-jacobian", "--fixture", "identity:2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn all_names_the_first_failing_criterion() {
    let out = nslab(&["all"]);
    let r = report(&out);
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 12);
    let first = checks.iter().find(|c| c["passed"] == false).map(|c| c["name"].as_str().unwrap().to_string());
    match first {
        None => assert_eq!(out.status.code(), Some(0)),
        Some(name) => {
            assert_eq!(out.status.code(), Some(1));
            assert!(r["first_failure"].as_str().unwrap().starts_with(&name));
        }
    }
}
