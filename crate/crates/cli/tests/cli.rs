use std::path::Path;
use std::process::{Command, Output};

use weakval_cli::CliError;

fn weakval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakval")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn bundled(name: &str) -> String {
    format!("{}/scenarios/{name}.scenario", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn success_exits_zero() {
    let out = weakval(&["derail", "--scenario", &bundled("derailment")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().ends_with("true\n"));
}

#[test]
fn validate_does_not_run() {
    let out = weakval(&["validate", "--scenario", &bundled("nested_mzi")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "valid mzi scenario\n");
}

#[test]
fn parse_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.scenario",
        "kind = \"derail\"\n[system]\noperator = 3\n",
    );
    let out = weakval(&["derail", "--scenario", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("E001"));
}

#[test]
fn undeclared_label_is_named_in_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(bundled("nested_mzi"))
        .unwrap()
        .replace("path = \"B\"", "path = \"Q\"");
    let path = write(dir.path(), "q.scenario", &text);
    let out = weakval(&["validate", "--scenario", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("E004") && err.contains("\"Q\""), "{err}");
}

#[test]
fn missing_file_exits_two() {
    let out = weakval(&["derail", "--scenario", "/nonexistent/x.scenario"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kind_mismatch_exits_two() {
    let out = weakval(&["mzi", "--scenario", &bundled("derailment")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn orthogonal_postselection_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "orth.scenario",
        "kind = \"weakvalue\"\n[system]\noperator = \"sigma_x\"\npre = [[1, 0], [0, 0]]\npost = [[0, 0], [1, 0]]\n",
    );
    let out = weakval(&["weakvalue", "--scenario", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("orthogonal"));
}

#[test]
fn invariant_breach_maps_to_four() {
    let e = CliError::Domain {
        context: "x".into(),
        source: weakval::Error::InvariantBreach("y".into()),
    };
    assert_eq!(e.exit_code(), 4);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.json");
    let out = weakval(&[
        "sweep",
        "--scenario",
        &bundled("footnote_limit"),
        "--format",
        "json",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(target).unwrap()).unwrap();
    assert_eq!(v["summary"]["sweep"]["discontinuity_flag"], true);
}

#[test]
fn tolerance_profile_scales_tolerances() {
    let run = |profile: &str| {
        let out = weakval(&[
            "derail",
            "--scenario",
            &bundled("derailment"),
            "--format",
            "json",
            "--tolerance-profile",
            profile,
        ]);
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["summary"]["tolerances"]["derailment"].as_f64().unwrap()
    };
    let base = run("default");
    assert!((run("strict") - base * 0.01).abs() < 1e-25);
    assert!((run("loose") - base * 100.0).abs() < 1e-15);
}

#[test]
fn weakvalue_scenario_with_grid_meter() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "wv.scenario",
        "kind = \"weakvalue\"\ng = [1e-3]\n[meter]\nkind = \"grid\"\nsigma = 1.0\n[system]\noperator = \"sigma_z\"\npre = [[1, 0], [1, 0]]\npost = [[1, 0], [0, 0]]\n",
    );
    let out = weakval(&["weakvalue", "--scenario", &path, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &v["table"]["rows"][0];
    assert!((row[1].as_f64().unwrap() - 1.0).abs() < 1e-5);
}
