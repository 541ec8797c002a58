//! Browser bindings for the weak-measurement simulator.
//!
//! Each exported function takes plain numbers and returns a JSON document,
//! so the page needs no bindings beyond strings. The same computations are
//! available natively through the `*_json` functions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use weakval::interferometer::{
    arm_amplitude, build_nested_mzi, pointer_weak_value, projector_weak_value, NestedMziParams, TapSpec, DARK_PORT,
};
use weakval::tolerances;
use weakval::weakmeas::{
    analytic_weak_value, derailment_check, extract_weak_value, g_sweep, Endpoint, MeterModel, Polynomial, SweepResult,
    SweepTarget,
};
use weakval::{Cplx, Ket, Op};

fn complex(c: Cplx) -> Value {
    json!({ "re": c.re, "im": c.im })
}

fn err(e: weakval::Error) -> String {
    e.to_string()
}

/// `points` strengths spaced logarithmically from `g_max` down to `g_min`.
pub fn log_grid(g_min: f64, g_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(g_min > 0.0 && g_max > g_min && g_max.is_finite()) || points < 2 {
        return Err("need 0 < g_min < g_max and at least 2 points".into());
    }
    let (lo, hi) = (g_min.ln(), g_max.ln());
    Ok((0..points)
        .map(|i| (hi + (lo - hi) * i as f64 / (points - 1) as f64).exp())
        .collect())
}

fn sweep_json(s: &SweepResult) -> Value {
    json!({
        "limit": complex(s.extrapolated_limit),
        "endpoint": match s.endpoint {
            Endpoint::Defined(v) => complex(v),
            Endpoint::Undefined => Value::from("UNDEFINED"),
        },
        "discontinuity_flag": s.discontinuity_flag,
    })
}

/// Nested interferometer with a weak tap on arm `B`: dark-port amplitude
/// `|E|`, its slope `|E|/g` and the pointer reading of `(Π_B)_w` per strength.
pub fn nested_mzi_json(
    outer_t: f64,
    inner_phase: f64,
    sigma: f64,
    g_min: f64,
    g_max: f64,
    points: usize,
) -> Result<Value, String> {
    let params = NestedMziParams {
        outer_t,
        inner_phase,
        ..NestedMziParams::default()
    };
    let meter = MeterModel::analytic(sigma).map_err(err)?;
    let plain = build_nested_mzi(params, None).map_err(err)?;
    let tapped = build_nested_mzi(
        params,
        Some(TapSpec {
            arm: "B",
            g: 0.0,
            meter,
        }),
    )
    .map_err(err)?;
    let gs = log_grid(g_min, g_max, points)?;

    let amplitude = |g: f64| arm_amplitude(&tapped, DARK_PORT, g).map(|a| Cplx::new(a.norm(), 0.0));
    let sweep = g_sweep(&amplitude, &gs, SweepTarget::Divided, tolerances::DISCONTINUITY).map_err(err)?;
    let mut rows = Vec::with_capacity(gs.len());
    for r in &sweep.rows {
        let pi_b = tapped
            .with_single_tap_strength(0, r.g)
            .and_then(|n| pointer_weak_value(&n, 0))
            .map(|w| complex(w.value))
            .unwrap_or(Value::Null);
        rows.push(json!({ "g": r.g, "abs_e": r.raw.re, "slope": r.divided.re, "pi_b": pi_b }));
    }
    let analytic = projector_weak_value(&plain, "B")
        .map(|w| complex(w.value))
        .unwrap_or(Value::Null);
    Ok(json!({
        "dark_at_zero": arm_amplitude(&plain, DARK_PORT, 0.0).map_err(err)?.norm(),
        "pi_b_analytic": analytic,
        "sweep": sweep_json(&sweep),
        "rows": rows,
    }))
}

/// `f(x)/x` for `f(x) = a·x + b·x²` toward `x = 0`.
pub fn divided_limit_json(a: f64, b: f64, g_min: f64, g_max: f64, points: usize) -> Result<Value, String> {
    let f = Polynomial {
        coeffs: vec![0.0, a, b],
    };
    let gs = log_grid(g_min, g_max, points)?;
    let sweep = g_sweep(&f, &gs, SweepTarget::Divided, tolerances::DISCONTINUITY).map_err(err)?;
    let rows: Vec<Value> = sweep
        .rows
        .iter()
        .map(|r| json!({ "g": r.g, "raw": r.raw.re, "divided": r.divided.re }))
        .collect();
    Ok(json!({ "sweep": sweep_json(&sweep), "rows": rows }))
}

fn bloch(theta: f64, phi: f64) -> Result<Ket, String> {
    Ket::new(vec![
        Cplx::new((theta / 2.0).cos(), 0.0),
        Cplx::from_polar((theta / 2.0).sin(), phi),
    ])
    .map_err(err)
}

/// Qubit observable `n·σ` between Bloch-sphere states, with the pointer
/// estimate at each strength.
#[allow(clippy::too_many_arguments)]
pub fn qubit_weak_value_json(
    pre: (f64, f64),
    post: (f64, f64),
    axis: (f64, f64, f64),
    sigma: f64,
    g_min: f64,
    g_max: f64,
    points: usize,
) -> Result<Value, String> {
    let (input, fin) = (bloch(pre.0, pre.1)?, bloch(post.0, post.1)?);
    let s = Op::sigma_x()
        .scaled(Cplx::new(axis.0, 0.0))
        .add(&Op::sigma_y().scaled(Cplx::new(axis.1, 0.0)))
        .and_then(|m| m.add(&Op::sigma_z().scaled(Cplx::new(axis.2, 0.0))))
        .map_err(err)?
        .verified();
    let meter = MeterModel::analytic(sigma).map_err(err)?;
    let analytic = analytic_weak_value(&s, &input, &fin).map_err(err)?.value;
    let derail = derailment_check(&s, &input, tolerances::DERAILMENT).map_err(err)?;
    let rows = log_grid(g_min, g_max, points)?
        .into_iter()
        .map(|g| {
            extract_weak_value(&s, &input, &fin, &meter, g)
                .map(|r| json!({ "g": g, "value": complex(r.value), "est_error": r.est_error }))
                .map_err(err)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(json!({
        "analytic": complex(analytic),
        "expectation": complex(derail.expectation),
        "s_in_norm": derail.s_in_norm,
        "derailed": derail.derailed,
        "rows": rows,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn nested_mzi(
    outer_t: f64,
    inner_phase: f64,
    sigma: f64,
    g_min: f64,
    g_max: f64,
    points: usize,
) -> Result<String, JsValue> {
    to_js(nested_mzi_json(outer_t, inner_phase, sigma, g_min, g_max, points))
}

#[wasm_bindgen]
pub fn divided_limit(a: f64, b: f64, g_min: f64, g_max: f64, points: usize) -> Result<String, JsValue> {
    to_js(divided_limit_json(a, b, g_min, g_max, points))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn qubit_weak_value(
    pre_theta: f64,
    pre_phi: f64,
    post_theta: f64,
    post_phi: f64,
    nx: f64,
    ny: f64,
    nz: f64,
    sigma: f64,
    g_min: f64,
    g_max: f64,
    points: usize,
) -> Result<String, JsValue> {
    to_js(qubit_weak_value_json(
        (pre_theta, pre_phi),
        (post_theta, post_phi),
        (nx, ny, nz),
        sigma,
        g_min,
        g_max,
        points,
    ))
}
