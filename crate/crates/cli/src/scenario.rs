//! Declarative scenario files.
//!
//! Scenarios are TOML documents. Complex numbers are written as `[re, im]`
//! pairs, states as arrays of pairs and matrices as arrays of rows of pairs.
//! Operators may also be given as expressions over named Pauli matrices,
//! e.g. `"sigma_z + sigma_x"` or `"0.5*sigma_z - identity"`.

use std::fmt;

use serde::{Deserialize, Serialize};
use weakval::algebra::{Cplx, Ket, Op};
use weakval::interferometer::{Element, PathNetwork};
use weakval::tolerances::Tolerances;
use weakval::weakmeas::{MeterModel, SweepTarget};

use crate::error::{ErrorCode, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    WeakValue,
    Derail,
    Additivity,
    Mzi,
    Sweep,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::WeakValue, Kind::Derail, Kind::Additivity, Kind::Mzi, Kind::Sweep];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::WeakValue => "weakvalue",
            Self::Derail => "derail",
            Self::Additivity => "additivity",
            Self::Mzi => "mzi",
            Self::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Expr(String),
    Matrix(Vec<Vec<Pair>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawSystem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operators: Option<Vec<OperatorSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post: Option<Vec<Pair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMeter {
    pub kind: String,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawStage {
    BeamSplitter {
        a: String,
        b: String,
        t: f64,
    },
    PhaseShifter {
        path: String,
        phi: f64,
    },
    Relabel {
        from: String,
        to: String,
    },
    WeakTap {
        path: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNetwork {
    pub paths: Vec<String>,
    pub source: String,
    pub postselect: String,
    /// Arm whose meter-traced amplitude is swept over `g`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<String>,
    #[serde(default)]
    pub stages: Vec<RawStage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    /// `"polynomial"` or `"pointer"`.
    pub probe: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    /// `"divided"` (default) or `"raw"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawTolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derailment: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discontinuity: Option<f64>,
}

/// The scenario document exactly as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub g: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<RawSystem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meter: Option<RawMeter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<RawNetwork>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RawSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<RawTolerances>,
}

/// A named operator together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedOp {
    pub name: String,
    pub op: Op,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepProbeSpec {
    Polynomial(Vec<f64>),
    Pointer {
        observable: NamedOp,
        pre: Ket,
        post: Ket,
        meter: MeterModel,
    },
}

/// Validated, fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    WeakValue {
        observable: NamedOp,
        pre: Ket,
        post: Ket,
        meter: MeterModel,
    },
    Derail {
        observable: NamedOp,
        pre: Ket,
    },
    Additivity {
        first: NamedOp,
        second: NamedOp,
        pre: Ket,
        post: Ket,
    },
    Mzi {
        network: PathNetwork,
        probe: String,
    },
    Sweep {
        probe: SweepProbeSpec,
        target: SweepTarget,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub raw: RawScenario,
    pub kind: Kind,
    pub format: Format,
    pub gs: Vec<f64>,
    pub tolerances: Tolerances,
    pub body: Body,
}

impl ScenarioConfig {
    /// Canonical TOML text; parsing it yields an identical config.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.raw).expect("raw scenarios always serialize")
    }
}

/// Parses and validates a scenario document. Never panics.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ParseError> {
    let value: toml::Table = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    let kind_text = match value.get("kind") {
        Some(toml::Value::String(s)) => s.clone(),
        Some(_) => return Err(ParseError::new(ErrorCode::Malformed, "kind", "must be a string")),
        None => {
            return Err(ParseError::new(
                ErrorCode::MissingField,
                "kind",
                "scenario kind is required",
            ))
        }
    };
    let kind = Kind::parse(&kind_text).ok_or_else(|| {
        ParseError::new(
            ErrorCode::UnknownKind,
            "kind",
            format!(
                "unknown kind {kind_text:?}; expected one of {}",
                Kind::ALL.map(Kind::as_str).join(", ")
            ),
        )
    })?;
    let raw: RawScenario = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    validate(raw, kind)
}

fn toml_error(text: &str, e: &toml::de::Error) -> ParseError {
    let line = e
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    ParseError {
        code: ErrorCode::Malformed,
        field: "document".into(),
        line,
        message: e.message().to_string(),
    }
}

fn invalid(field: impl Into<String>, msg: impl Into<String>) -> ParseError {
    ParseError::new(ErrorCode::InvalidValue, field, msg)
}

fn missing(field: &str) -> ParseError {
    ParseError::new(ErrorCode::MissingField, field, "required for this scenario kind")
}

fn validate(raw: RawScenario, kind: Kind) -> Result<ScenarioConfig, ParseError> {
    for (i, g) in raw.g.iter().enumerate() {
        if !(g.is_finite() && *g > 0.0) {
            return Err(invalid(
                format!("g[{i}]"),
                format!("coupling strengths must be positive, got {g}"),
            ));
        }
        if raw.g[..i].contains(g) {
            return Err(invalid(format!("g[{i}]"), format!("duplicate coupling strength {g}")));
        }
    }
    let tolerances = resolve_tolerances(raw.tolerances.as_ref())?;
    let body = match kind {
        Kind::WeakValue => {
            let sys = system(&raw)?;
            let pre = state(sys.pre.as_deref(), "system.pre")?;
            let post = state(sys.post.as_deref(), "system.post")?;
            let observable = operator(sys.operator.as_ref(), "system.operator", pre.dim())?;
            check_same_dim(&post, pre.dim(), "system.post")?;
            Body::WeakValue {
                observable,
                pre,
                post,
                meter: meter(raw.meter.as_ref())?,
            }
        }
        Kind::Derail => {
            let sys = system(&raw)?;
            let pre = state(sys.pre.as_deref(), "system.pre")?;
            let observable = operator(sys.operator.as_ref(), "system.operator", pre.dim())?;
            Body::Derail { observable, pre }
        }
        Kind::Additivity => {
            let sys = system(&raw)?;
            let pre = state(sys.pre.as_deref(), "system.pre")?;
            let post = state(sys.post.as_deref(), "system.post")?;
            check_same_dim(&post, pre.dim(), "system.post")?;
            let ops = sys.operators.as_ref().ok_or_else(|| missing("system.operators"))?;
            if ops.len() != 2 {
                return Err(invalid(
                    "system.operators",
                    format!("expected exactly 2 operators, got {}", ops.len()),
                ));
            }
            Body::Additivity {
                first: operator(Some(&ops[0]), "system.operators[0]", pre.dim())?,
                second: operator(Some(&ops[1]), "system.operators[1]", pre.dim())?,
                pre,
                post,
            }
        }
        Kind::Mzi => {
            let net = raw.network.as_ref().ok_or_else(|| missing("network"))?;
            let meter = meter(raw.meter.as_ref())?;
            let network = network(net, meter)?;
            let probe = net.probe.clone().ok_or_else(|| missing("network.probe"))?;
            if !network.paths().contains(&probe) {
                return Err(undeclared("network.probe", &probe));
            }
            Body::Mzi { network, probe }
        }
        Kind::Sweep => {
            let sw = raw.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
            let target = match sw.target.as_deref() {
                None | Some("divided") => SweepTarget::Divided,
                Some("raw") => SweepTarget::Raw,
                Some(other) => {
                    return Err(invalid(
                        "sweep.target",
                        format!("expected \"divided\" or \"raw\", got {other:?}"),
                    ))
                }
            };
            let probe = match sw.probe.as_str() {
                "polynomial" => {
                    let c = sw.coefficients.clone().ok_or_else(|| missing("sweep.coefficients"))?;
                    if c.is_empty() || c.iter().any(|x| !x.is_finite()) {
                        return Err(invalid("sweep.coefficients", "need at least one finite coefficient"));
                    }
                    SweepProbeSpec::Polynomial(c)
                }
                "pointer" => {
                    let sys = system(&raw)?;
                    let pre = state(sys.pre.as_deref(), "system.pre")?;
                    let post = state(sys.post.as_deref(), "system.post")?;
                    check_same_dim(&post, pre.dim(), "system.post")?;
                    SweepProbeSpec::Pointer {
                        observable: operator(sys.operator.as_ref(), "system.operator", pre.dim())?,
                        pre,
                        post,
                        meter: meter(raw.meter.as_ref())?,
                    }
                }
                other => {
                    return Err(invalid(
                        "sweep.probe",
                        format!("expected \"polynomial\" or \"pointer\", got {other:?}"),
                    ))
                }
            };
            if raw.g.len() < 2 {
                return Err(invalid("g", "a sweep needs at least 2 coupling strengths"));
            }
            Body::Sweep { probe, target }
        }
    };
    Ok(ScenarioConfig {
        kind,
        format: raw.format,
        gs: raw.g.clone(),
        tolerances,
        body,
        raw,
    })
}

fn resolve_tolerances(raw: Option<&RawTolerances>) -> Result<Tolerances, ParseError> {
    let mut tol = Tolerances::default();
    if let Some(t) = raw {
        for (name, value, slot) in [
            ("tolerances.derailment", t.derailment, &mut tol.derailment),
            ("tolerances.presence", t.presence, &mut tol.presence),
            ("tolerances.discontinuity", t.discontinuity, &mut tol.discontinuity),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(name, format!("tolerance must be positive, got {v}")));
                }
                *slot = v;
            }
        }
    }
    Ok(tol)
}

fn system(raw: &RawScenario) -> Result<&RawSystem, ParseError> {
    raw.system.as_ref().ok_or_else(|| missing("system"))
}

fn undeclared(field: impl Into<String>, label: &str) -> ParseError {
    ParseError::new(
        ErrorCode::UndeclaredLabel,
        field,
        format!("path {label:?} is not declared in network.paths"),
    )
}

fn check_same_dim(k: &Ket, dim: usize, field: &str) -> Result<(), ParseError> {
    if k.dim() != dim {
        return Err(ParseError::new(
            ErrorCode::DimensionMismatch,
            field,
            format!("expected dimension {dim}, found {}", k.dim()),
        ));
    }
    Ok(())
}

fn state(pairs: Option<&[Pair]>, field: &str) -> Result<Ket, ParseError> {
    let pairs = pairs.ok_or_else(|| missing(field))?;
    let ket =
        Ket::new(pairs.iter().map(|p| Cplx::new(p[0], p[1])).collect()).map_err(|e| invalid(field, e.to_string()))?;
    ket.normalized().map_err(|e| invalid(field, e.to_string()))
}

fn operator(spec: Option<&OperatorSpec>, field: &str, dim: usize) -> Result<NamedOp, ParseError> {
    let spec = spec.ok_or_else(|| missing(field))?;
    let (name, op) = match spec {
        OperatorSpec::Expr(text) => (text.trim().to_string(), parse_expr(text, field, dim)?),
        OperatorSpec::Matrix(rows) => {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(ParseError::new(
                    ErrorCode::DimensionMismatch,
                    field,
                    format!("operator must be a square {dim}x{dim} matrix matching the state dimension"),
                ));
            }
            let rows: Vec<Vec<Cplx>> = rows
                .iter()
                .map(|r| r.iter().map(|p| Cplx::new(p[0], p[1])).collect())
                .collect();
            let op = Op::from_rows(&rows).map_err(|e| invalid(field, e.to_string()))?;
            ("matrix".to_string(), op)
        }
    };
    let op = op.verified();
    if !op.flags().hermitian.is_verified() {
        return Err(invalid(field, "observable must be hermitian"));
    }
    Ok(NamedOp { name, op })
}

fn named(name: &str, dim: usize, field: &str) -> Result<Op, ParseError> {
    let pauli = |op: Op| {
        if dim == 2 {
            Ok(op)
        } else {
            Err(ParseError::new(
                ErrorCode::DimensionMismatch,
                field,
                format!("{name} is 2x2 but the states have dimension {dim}"),
            ))
        }
    };
    match name {
        "identity" | "I" => Ok(Op::identity(dim)),
        "sigma_x" => pauli(Op::sigma_x()),
        "sigma_y" => pauli(Op::sigma_y()),
        "sigma_z" => pauli(Op::sigma_z()),
        other => Err(invalid(
            field,
            format!("unknown operator name {other:?}; expected identity, sigma_x, sigma_y or sigma_z"),
        )),
    }
}

/// Parses `[±] [coeff *] name { ± [coeff *] name }`.
fn parse_expr(text: &str, field: &str, dim: usize) -> Result<Op, ParseError> {
    let bad = |msg: String| invalid(field, msg);
    let mut acc: Option<Op> = None;
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err(bad("empty operator expression".into()));
    }
    let mut first = true;
    while !rest.is_empty() {
        let mut sign = 1.0;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -1.0;
            rest = r.trim_start();
        } else if !first {
            return Err(bad(format!("expected '+' or '-' before {rest:?}")));
        }
        let mut coeff = 1.0;
        if rest.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
            let bytes = rest.as_bytes();
            let mut end = 0;
            while end < bytes.len() {
                let c = bytes[end] as char;
                let exp_sign = (c == '+' || c == '-') && end > 0 && matches!(bytes[end - 1], b'e' | b'E');
                if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                    end += 1;
                } else {
                    break;
                }
            }
            coeff = rest[..end]
                .parse::<f64>()
                .map_err(|_| bad(format!("bad coefficient {:?}", &rest[..end])))?;
            rest = rest[end..].trim_start();
            rest = rest
                .strip_prefix('*')
                .ok_or_else(|| bad(format!("expected '*' after coefficient {coeff}")))?
                .trim_start();
        }
        let end = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if end == 0 {
            return Err(bad(format!("expected an operator name at {rest:?}")));
        }
        let term = named(&rest[..end], dim, field)?.scaled(Cplx::new(sign * coeff, 0.0));
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term).map_err(|e| bad(e.to_string()))?,
        });
        rest = rest[end..].trim_start();
        first = false;
    }
    Ok(acc.expect("at least one term"))
}

fn meter(raw: Option<&RawMeter>) -> Result<MeterModel, ParseError> {
    let Some(m) = raw else {
        return MeterModel::analytic(1.0).map_err(|e| invalid("meter", e.to_string()));
    };
    let model = match m.kind.as_str() {
        "analytic" => {
            if m.points.is_some() || m.spacing.is_some() {
                return Err(invalid("meter", "points/spacing only apply to grid meters"));
            }
            MeterModel::analytic(m.sigma)
        }
        "grid" => match (m.points, m.spacing) {
            (None, None) => MeterModel::grid_default(m.sigma),
            (Some(n), Some(dx)) => MeterModel::grid(m.sigma, n, dx),
            _ => return Err(invalid("meter", "give both points and spacing, or neither")),
        },
        other => {
            return Err(invalid(
                "meter.kind",
                format!("expected \"analytic\" or \"grid\", got {other:?}"),
            ))
        }
    };
    model.map_err(|e| invalid("meter", e.to_string()))
}

fn network(raw: &RawNetwork, meter: MeterModel) -> Result<PathNetwork, ParseError> {
    if raw.paths.is_empty() {
        return Err(invalid("network.paths", "at least one path is required"));
    }
    for (i, p) in raw.paths.iter().enumerate() {
        if raw.paths[..i].contains(p) {
            return Err(invalid(format!("network.paths[{i}]"), format!("duplicate path {p:?}")));
        }
    }
    let declared = |field: String, label: &str| -> Result<(), ParseError> {
        if raw.paths.iter().any(|p| p == label) {
            Ok(())
        } else {
            Err(undeclared(field, label))
        }
    };
    declared("network.source".into(), &raw.source)?;
    declared("network.postselect".into(), &raw.postselect)?;
    let mut stages = Vec::with_capacity(raw.stages.len());
    for (i, s) in raw.stages.iter().enumerate() {
        let at = |f: &str| format!("network.stages[{i}].{f}");
        let element = match s {
            RawStage::BeamSplitter { a, b, t } => {
                declared(at("a"), a)?;
                declared(at("b"), b)?;
                if !(0.0..=1.0).contains(t) {
                    return Err(invalid(at("t"), format!("transmission must lie in [0, 1], got {t}")));
                }
                Element::beam_splitter(a, b, *t)
            }
            RawStage::PhaseShifter { path, phi } => {
                declared(at("path"), path)?;
                Element::phase(path, *phi)
            }
            RawStage::Relabel { from, to } => {
                declared(at("from"), from)?;
                declared(at("to"), to)?;
                Element::relabel(from, to)
            }
            RawStage::WeakTap { path, g } => {
                declared(at("path"), path)?;
                if let Some(g) = g {
                    if !(g.is_finite() && *g >= 0.0) {
                        return Err(invalid(at("g"), format!("tap strength must be >= 0, got {g}")));
                    }
                }
                Element::tap(path, g.unwrap_or(0.0), meter)
            }
        };
        stages.push(element);
    }
    PathNetwork::new(raw.paths.clone(), stages, raw.source.clone(), raw.postselect.clone())
        .map_err(|e| invalid("network", e.to_string()))
}
