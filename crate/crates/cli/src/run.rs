//! Executes validated scenarios.

use serde_json::{json, Map, Value};
use weakval::interferometer::{arm_amplitude, pointer_weak_value, projector_weak_value, which_way_report, PathNetwork};
use weakval::tolerances::Tolerances;
use weakval::weakmeas::{
    additivity_report, analytic_weak_value, derailment_check, extract_weak_value, g_sweep, DerailmentReport, Endpoint,
    PointerShiftProbe, Polynomial, SweepProbe, SweepResult, SweepTarget,
};
use weakval::{Cplx, Ket};

use crate::error::CliError;
use crate::report::{complex, Cell, Report, Table, UNDEFINED};
use crate::scenario::{Body, NamedOp, ScenarioConfig, SweepProbeSpec};

/// Coupling strength used by `weakvalue` scenarios that list none.
pub const DEFAULT_EXTRACTION_G: f64 = 1e-3;

pub fn run_scenario(config: &ScenarioConfig) -> Result<Report, CliError> {
    run_with_tolerances(config, &config.tolerances)
}

/// Runs `config` with `tol` in place of the scenario's own tolerances.
pub fn run_with_tolerances(config: &ScenarioConfig, tol: &Tolerances) -> Result<Report, CliError> {
    let mut summary = Map::new();
    summary.insert("tolerances".into(), tolerances_json(tol));
    let table = match &config.body {
        Body::WeakValue {
            observable,
            pre,
            post,
            meter,
        } => {
            let analytic = analytic_weak_value(&observable.op, pre, post)
                .map_err(CliError::domain("analytic weak value"))?
                .value;
            let derail =
                derailment_check(&observable.op, pre, tol.derailment).map_err(CliError::domain("derailment check"))?;
            summary.insert("observable".into(), observable.name.clone().into());
            summary.insert("analytic".into(), complex(analytic));
            summary.insert("derailment".into(), derailment_json(&derail));
            let gs = if config.gs.is_empty() {
                vec![DEFAULT_EXTRACTION_G]
            } else {
                sorted_desc(&config.gs)
            };
            let mut table = Table::new([
                "g",
                "weak_value_re",
                "weak_value_im",
                "est_error",
                "analytic_re",
                "analytic_im",
                "abs_deviation",
            ]);
            for g in gs {
                let r = extract_weak_value(&observable.op, pre, post, meter, g)
                    .map_err(CliError::domain(format!("pointer extraction at g={g}")))?;
                table.push(vec![
                    g.into(),
                    r.value.re.into(),
                    r.value.im.into(),
                    r.est_error.into(),
                    analytic.re.into(),
                    analytic.im.into(),
                    (r.value - analytic).norm().into(),
                ]);
            }
            table
        }
        Body::Derail { observable, pre } => {
            let d =
                derailment_check(&observable.op, pre, tol.derailment).map_err(CliError::domain("derailment check"))?;
            summary.insert("observable".into(), observable.name.clone().into());
            summary.insert("derailment".into(), derailment_json(&d));
            let mut table = Table::new(["operator", "expectation_re", "expectation_im", "s_in_norm", "derailed"]);
            table.push(vec![
                observable.name.clone().into(),
                d.expectation.re.into(),
                d.expectation.im.into(),
                d.s_in_norm.into(),
                d.derailed.into(),
            ]);
            table
        }
        Body::Additivity {
            first,
            second,
            pre,
            post,
        } => {
            let r = additivity_report(&first.op, &second.op, pre, post, tol.derailment)
                .map_err(CliError::domain("additivity report"))?;
            summary.insert("first".into(), complex(r.first));
            summary.insert("second".into(), complex(r.second));
            summary.insert("sum".into(), complex(r.sum));
            summary.insert("residual".into(), r.residual.into());
            summary.insert("ambiguous".into(), r.is_ambiguous().into());
            let sum = NamedOp {
                name: format!("({}) + ({})", first.name, second.name),
                op: first.op.add(&second.op).map_err(CliError::domain("operator sum"))?,
            };
            let mut table = derailment_table();
            table.push(derailment_row("first", first, &r.first_derailment, r.first));
            table.push(derailment_row("second", second, &r.second_derailment, r.second));
            table.push(derailment_row("sum", &sum, &r.sum_derailment, r.sum));
            table
        }
        Body::Mzi { network, probe } => run_mzi(network, probe, &config.gs, tol, &mut summary)?,
        Body::Sweep { probe, target } => {
            let sweep = match probe {
                SweepProbeSpec::Polynomial(coeffs) => {
                    sweep(&Polynomial { coeffs: coeffs.clone() }, &config.gs, *target, tol)?
                }
                SweepProbeSpec::Pointer {
                    observable,
                    pre,
                    post,
                    meter,
                } => {
                    check_postselection(&observable.op, pre, post)?;
                    let probe = PointerShiftProbe {
                        observable: observable.op.clone(),
                        input: pre.clone(),
                        fin: post.clone(),
                        meter: *meter,
                    };
                    sweep(&probe, &config.gs, *target, tol)?
                }
            };
            summary.insert("sweep".into(), sweep_json(&sweep));
            let mut table = Table::new(["g", "raw_re", "raw_im", "divided_re", "divided_im"]);
            for r in &sweep.rows {
                table.push(vec![
                    r.g.into(),
                    r.raw.re.into(),
                    r.raw.im.into(),
                    r.divided.re.into(),
                    r.divided.im.into(),
                ]);
            }
            table
        }
    };
    Ok(Report {
        kind: config.kind.as_str().to_string(),
        title: config.raw.title.clone(),
        summary,
        table,
    })
}

fn run_mzi(
    network: &PathNetwork,
    probe: &str,
    gs: &[f64],
    tol: &Tolerances,
    summary: &mut Map<String, Value>,
) -> Result<Table, CliError> {
    let taps = network.taps();
    let tap_path = taps
        .first()
        .map(|t| t.path.to_string())
        .ok_or_else(|| CliError::Domain {
            context: "mzi scenario".into(),
            source: weakval::Error::InvalidArgument("network needs a weak_tap stage".into()),
        })?;
    let dark = arm_amplitude(network, probe, 0.0).map_err(CliError::domain("probe amplitude at g=0"))?;
    let analytic = projector_weak_value(&network.without_taps(), &tap_path)
        .map_err(CliError::domain("projector weak value"))?
        .value;
    let which_way = which_way_report(network, tol).map_err(CliError::domain("which-way report"))?;

    let amplitude = |g: f64| arm_amplitude(network, probe, g).map(|a| Cplx::new(a.norm(), 0.0));
    let sweep = sweep(&amplitude, gs, SweepTarget::Divided, tol)?;

    summary.insert("probe".into(), probe.into());
    summary.insert("tap".into(), tap_path.clone().into());
    summary.insert("probe_amplitude_at_zero".into(), complex(dark));
    summary.insert(format!("Pi_{tap_path}_w_analytic"), complex(analytic));
    summary.insert("sweep".into(), sweep_json(&sweep));
    summary.insert(
        "arms".into(),
        Value::Array(
            which_way
                .arms
                .iter()
                .map(|a| json!({ "label": a.label, "stage": a.stage, "weak_value": complex(a.weak_value), "present": a.present }))
                .collect(),
        ),
    );
    summary.insert("success_probability".into(), which_way.success_probability.into());
    summary.insert("completeness_residual".into(), which_way.completeness_residual.into());

    let mut table = Table::new([
        "g".to_string(),
        format!("abs_{probe}"),
        format!("abs_{probe}_over_g"),
        format!("Pi_{tap_path}_w_re"),
        format!("Pi_{tap_path}_w_im"),
    ]);
    for row in &sweep.rows {
        let tapped = network
            .with_single_tap_strength(0, row.g)
            .and_then(|n| pointer_weak_value(&n, 0))
            .map_err(CliError::domain(format!("pointer weak value at g={}", row.g)))?;
        table.push(vec![
            row.g.into(),
            row.raw.re.into(),
            row.divided.re.into(),
            tapped.value.re.into(),
            tapped.value.im.into(),
        ]);
    }
    Ok(table)
}

fn sweep(probe: &dyn SweepProbe, gs: &[f64], target: SweepTarget, tol: &Tolerances) -> Result<SweepResult, CliError> {
    g_sweep(probe, gs, target, tol.discontinuity).map_err(CliError::domain("g sweep"))
}

fn check_postselection(op: &weakval::Op, pre: &Ket, post: &Ket) -> Result<(), CliError> {
    analytic_weak_value(op, pre, post)
        .map(|_| ())
        .map_err(CliError::domain("pointer sweep"))
}

fn sorted_desc(gs: &[f64]) -> Vec<f64> {
    let mut v = gs.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn derailment_table() -> Table {
    Table::new([
        "term",
        "operator",
        "weak_value_re",
        "weak_value_im",
        "expectation_re",
        "expectation_im",
        "s_in_norm",
        "derailed",
    ])
}

fn derailment_row(term: &str, op: &NamedOp, d: &DerailmentReport, weak_value: Cplx) -> Vec<Cell> {
    vec![
        term.into(),
        op.name.clone().into(),
        weak_value.re.into(),
        weak_value.im.into(),
        d.expectation.re.into(),
        d.expectation.im.into(),
        d.s_in_norm.into(),
        d.derailed.into(),
    ]
}

fn derailment_json(d: &DerailmentReport) -> Value {
    json!({
        "expectation": complex(d.expectation),
        "overlap_with_in": complex(d.overlap_with_in),
        "s_in_norm": d.s_in_norm,
        "derailed": d.derailed,
    })
}

fn sweep_json(s: &SweepResult) -> Value {
    json!({
        "target": match s.target { SweepTarget::Divided => "divided", SweepTarget::Raw => "raw" },
        "extrapolated_limit": complex(s.extrapolated_limit),
        "endpoint": match s.endpoint {
            Endpoint::Defined(v) => complex(v),
            Endpoint::Undefined => Value::from(UNDEFINED),
        },
        "tolerance": s.tolerance,
        "discontinuity_flag": s.discontinuity_flag,
        "rows": s.rows.iter().map(|r| json!({
            "g": r.g,
            "raw": complex(r.raw),
            "divided": complex(r.divided),
        })).collect::<Vec<_>>(),
    })
}

fn tolerances_json(t: &Tolerances) -> Value {
    json!({
        "derailment": t.derailment,
        "presence": t.presence,
        "discontinuity": t.discontinuity,
    })
}
