//! Bundled scenarios against committed outputs.
//!
//! Set `WEAKVAL_BLESS=1` to rewrite the fixtures from the current build.

use std::path::{Path, PathBuf};
use std::process::Command;

use weakval::interferometer::{build_nested_mzi, NestedMziParams, TapSpec};
use weakval::weakmeas::MeterModel;
use weakval_cli::scenario::Body;
use weakval_cli::{emit, parse_scenario, run_scenario, Format};

const BUNDLED: [(&str, &str); 4] = [
    ("derailment", "derail"),
    ("additivity", "additivity"),
    ("footnote_limit", "sweep"),
    ("nested_mzi", "mzi"),
];

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn scenario_path(name: &str) -> PathBuf {
    root().join("scenarios").join(format!("{name}.scenario"))
}

fn golden_path(name: &str, ext: &str) -> PathBuf {
    root().join("tests/golden").join(format!("{name}.{ext}"))
}

fn run_binary(subcommand: &str, scenario: &Path, format: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_weakval"))
        .args([subcommand, "--scenario"])
        .arg(scenario)
        .args(["--format", format])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn bundled_scenarios_match_golden_outputs() {
    let bless = std::env::var_os("WEAKVAL_BLESS").is_some();
    for (name, sub) in BUNDLED {
        for ext in ["csv", "json"] {
            let actual = run_binary(sub, &scenario_path(name), ext);
            let path = golden_path(name, ext);
            if bless {
                std::fs::write(&path, &actual).unwrap();
                continue;
            }
            let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(actual == expected, "{name}.{ext} differs from the committed fixture");
        }
    }
}

#[test]
fn library_and_binary_agree() {
    for (name, sub) in BUNDLED {
        let config = parse_scenario(&std::fs::read_to_string(scenario_path(name)).unwrap()).unwrap();
        let report = run_scenario(&config).unwrap();
        assert_eq!(
            emit(&report, Format::Csv),
            run_binary(sub, &scenario_path(name), "csv"),
            "{name}"
        );
    }
}

#[test]
fn bundled_scenarios_round_trip() {
    for (name, _) in BUNDLED {
        let config = parse_scenario(&std::fs::read_to_string(scenario_path(name)).unwrap()).unwrap();
        let again = parse_scenario(&config.to_toml()).unwrap();
        assert_eq!(config, again, "{name}");
        assert_eq!(run_scenario(&config).unwrap(), run_scenario(&again).unwrap(), "{name}");
    }
}

#[test]
fn nested_scenario_matches_interferometer_defaults() {
    let config = parse_scenario(&std::fs::read_to_string(scenario_path("nested_mzi")).unwrap()).unwrap();
    let Body::Mzi { network, probe } = &config.body else {
        panic!("expected an mzi scenario");
    };
    let expected = build_nested_mzi(
        NestedMziParams::default(),
        Some(TapSpec {
            arm: "B",
            g: 0.0,
            meter: MeterModel::analytic(1.0).unwrap(),
        }),
    )
    .unwrap();
    assert_eq!(network, &expected);
    assert_eq!(probe, "E");
    assert_eq!(config.gs, vec![1e-2, 1e-3, 1e-4]);
}

#[test]
fn nested_csv_has_contracted_columns() {
    let csv = String::from_utf8(run_binary("mzi", &scenario_path("nested_mzi"), "csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("g,abs_E,abs_E_over_g,Pi_B_w_re,Pi_B_w_im"));
    assert_eq!(lines.count(), 3);
    assert!(!csv.contains('\r'));
    let json: serde_json::Value =
        serde_json::from_slice(&run_binary("mzi", &scenario_path("nested_mzi"), "json")).unwrap();
    assert_eq!(json["summary"]["sweep"]["discontinuity_flag"], true);
    assert_eq!(json["summary"]["sweep"]["endpoint"], "UNDEFINED");
}
