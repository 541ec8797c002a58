use std::f64::consts::{FRAC_PI_2, PI};

use weakval::interferometer::DEFAULT_OUTER_T;
use weakval_web::{divided_limit_json, log_grid, nested_mzi_json, qubit_weak_value_json};

#[test]
fn log_grid_endpoints() {
    let g = log_grid(1e-4, 1e-1, 4).unwrap();
    assert_eq!(g.len(), 4);
    assert!((g[0] - 1e-1).abs() < 1e-15 && (g[3] - 1e-4).abs() < 1e-18);
    assert!((g[1] - 1e-2).abs() < 1e-15);
    assert!(log_grid(1e-1, 1e-4, 4).is_err());
    assert!(log_grid(1e-4, 1e-1, 1).is_err());
}

#[test]
fn nested_default_is_dark_with_constant_slope() {
    let v = nested_mzi_json(DEFAULT_OUTER_T, 0.0, 1.0, 1e-5, 1e-3, 3).unwrap();
    assert!(v["dark_at_zero"].as_f64().unwrap() <= 1e-14);
    assert_eq!(v["sweep"]["discontinuity_flag"], true);
    assert_eq!(v["sweep"]["endpoint"], "UNDEFINED");
    let expected = (1.0f64 / 6.0).sqrt() / 2.0;
    for row in v["rows"].as_array().unwrap() {
        assert!((row["slope"].as_f64().unwrap() - expected).abs() < 1e-6);
    }
    let re = v["pi_b_analytic"]["re"].as_f64().unwrap();
    assert!((re - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn nested_rejects_bad_transmission() {
    assert!(nested_mzi_json(1.5, 0.0, 1.0, 1e-5, 1e-3, 3).is_err());
}

#[test]
fn divided_limit_matches_linear_coefficient() {
    let v = divided_limit_json(2.0, 5.0, 1e-3, 1e-1, 3).unwrap();
    assert!((v["sweep"]["limit"]["re"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let divided: Vec<f64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["divided"].as_f64().unwrap())
        .collect();
    for (d, e) in divided.iter().zip([2.5, 2.05, 2.005]) {
        assert!((d - e).abs() < 1e-12);
    }
}

#[test]
fn qubit_sigma_z_on_plus_x() {
    // |+x⟩ preselected, |0⟩ postselected: (σ_z)_w = 1 and the check derails.
    let v = qubit_weak_value_json((FRAC_PI_2, 0.0), (0.0, 0.0), (0.0, 0.0, 1.0), 1.0, 1e-4, 1e-2, 3).unwrap();
    assert!((v["analytic"]["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["derailed"], true);
    let last = &v["rows"][2]["value"];
    assert!((last["re"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn qubit_orthogonal_postselection_is_an_error() {
    let e = qubit_weak_value_json((0.0, 0.0), (PI, 0.0), (1.0, 0.0, 0.0), 1.0, 1e-4, 1e-2, 3).unwrap_err();
    assert!(e.contains("orthogonal"), "{e}");
}
