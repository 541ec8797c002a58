use super::network::PathNetwork;
use super::propagate::{arm_amplitude, backpropagate_detector, propagate, propagate_paths, NetworkState};
use crate::algebra::{inner, projector_onto, Cplx, Ket};
use crate::error::{Error, Result};
use crate::tolerances::{self, Tolerances};
use crate::weakmeas::{
    analytic_weak_value, derailment_check, g_sweep, shifts_to_weak_value, CoupledJoint, DerailmentReport, MeterState,
    Method, SweepTarget, WeakValueResult,
};

/// Forward and backward states at the stage boundary `stage`.
pub fn two_state_at(net: &PathNetwork, stage: usize) -> Result<(Ket, Ket)> {
    Ok((propagate_paths(net, stage)?, backpropagate_detector(net, stage)?))
}

/// `(Π_label)_w` at `stage`, from the forward source state and the
/// backward-propagated detector state.
pub fn projector_weak_value_at(net: &PathNetwork, label: &str, stage: usize) -> Result<WeakValueResult> {
    let (forward, backward) = two_state_at(net, stage)?;
    let proj = projector_onto(&Ket::basis(net.dim(), net.mode(label)?)?)?;
    analytic_weak_value(&proj, &forward, &backward)
}

/// `(Π_label)_w` at the label's probe point.
pub fn projector_weak_value(net: &PathNetwork, label: &str) -> Result<WeakValueResult> {
    projector_weak_value_at(net, label, net.probe_point(label)?)
}

/// Weak value of tap `index` read off its pointer after postselection on the
/// detector, `Re = ΔQ/g`, `Im = 2σ²ΔP/g`.
pub fn pointer_weak_value(net: &PathNetwork, index: usize) -> Result<WeakValueResult> {
    let taps = net.taps();
    let tap = taps
        .get(index)
        .ok_or_else(|| Error::InvalidArgument(format!("no tap with index {index}")))?;
    let g = tap.g;
    if g.is_nan() || g <= 0.0 {
        return Err(Error::InvalidArgument("pointer readout needs a tap with g > 0".into()));
    }
    let value = tap_shift(net, index)? / g;
    let half = tap_shift(&net.with_single_tap_strength(index, g / 2.0)?, index)? / (g / 2.0);
    Ok(WeakValueResult {
        value,
        method: Method::Pointer,
        g_used: g,
        est_error: 2.0 * (value - half).norm(),
    })
}

fn tap_shift(net: &PathNetwork, index: usize) -> Result<Cplx> {
    let tap = net.taps()[index];
    let NetworkState::Joint(joint) = propagate(net, None)? else {
        unreachable!("network has taps");
    };
    let post = crate::weakmeas::postselect(&joint, &net.detector_ket())?;
    let (q, p) = post.meter.readout(index)?;
    let (q0, p0) = initial_readout(&joint, index)?;
    Ok(shifts_to_weak_value(q - q0, p - p0, tap.meter.sigma, 1.0))
}

fn initial_readout(joint: &CoupledJoint, index: usize) -> Result<(f64, f64)> {
    match joint {
        CoupledJoint::Branches(_) => Ok((0.0, 0.0)),
        CoupledJoint::Grid(j) => {
            let meters = j.meters().to_vec();
            let mut amps = vec![Cplx::new(1.0, 0.0)];
            for m in &meters {
                let k = m.initial_grid_ket().expect("grid meter");
                amps = crate::algebra::tensor_ket(&Ket::new(amps)?, &k).amps().to_vec();
            }
            MeterState::Grid { amps, meters }.readout(index)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmEntry {
    pub label: String,
    pub stage: usize,
    pub weak_value: Cplx,
    pub present: bool,
}

/// Amplitude a tap induces on a path that is dark when the tap is off.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedAmplitude {
    pub label: String,
    /// `|amplitude(label; g)|` at the tap's strength.
    pub magnitude: f64,
    /// `magnitude / g`.
    pub slope: f64,
    /// `g → 0` extrapolation of `|amplitude|/g`.
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TapDiagnostic {
    pub path: String,
    pub stage: usize,
    pub g: f64,
    /// Derailment check of the tapped projector on the forward state at the tap.
    pub derailment: DerailmentReport,
    pub induced: Vec<InducedAmplitude>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhichWayReport {
    pub arms: Vec<ArmEntry>,
    pub success_probability: f64,
    /// Largest `|Σ_mode (Π_mode)_w − 1|` over the probe stages used.
    pub completeness_residual: f64,
    pub taps: Vec<TapDiagnostic>,
}

impl WhichWayReport {
    pub fn arm(&self, label: &str) -> Option<&ArmEntry> {
        self.arms.iter().find(|a| a.label == label)
    }
}

/// Per-arm projector weak values with presence verdicts, plus a diagnostic
/// for every weak tap.
pub fn which_way_report(net: &PathNetwork, tol: &Tolerances) -> Result<WhichWayReport> {
    let plain = net.without_taps();
    let detector = propagate_paths(&plain, plain.stages().len())?;
    let success_probability = detector.amps()[plain.mode(plain.postselection())?].norm_sqr();

    let mut arms = Vec::with_capacity(plain.dim());
    let mut stages_seen = Vec::new();
    for label in plain.paths() {
        let stage = plain.probe_point(label)?;
        let w = projector_weak_value_at(&plain, label, stage)?.value;
        arms.push(ArmEntry {
            label: label.clone(),
            stage,
            weak_value: w,
            present: w.norm() > tol.presence,
        });
        if !stages_seen.contains(&stage) {
            stages_seen.push(stage);
        }
    }
    let mut completeness_residual: f64 = 0.0;
    for &stage in &stages_seen {
        let mut total = Cplx::new(0.0, 0.0);
        for label in plain.paths() {
            total += projector_weak_value_at(&plain, label, stage)?.value;
        }
        completeness_residual = completeness_residual.max((total - 1.0).norm());
    }
    if completeness_residual > tolerances::SPECTRAL {
        return Err(Error::InvariantBreach(format!(
            "projector weak values do not sum to one (residual {completeness_residual:e})"
        )));
    }

    let dark: Vec<&str> = plain
        .paths()
        .iter()
        .filter(|l| {
            arm_amplitude(&plain, l, 0.0)
                .map(|a| a.norm() <= tolerances::NULL_POSTSELECTION)
                .unwrap_or(false)
        })
        .map(String::as_str)
        .collect();

    let mut taps = Vec::new();
    for (index, tap) in net.taps().iter().enumerate() {
        let forward = propagate_paths(net, tap.stage)?;
        let proj = projector_onto(&Ket::basis(net.dim(), tap.mode)?)?;
        let derailment = derailment_check(&proj, &forward.normalized()?, tol.derailment)?;
        let mut induced = Vec::new();
        if tap.g > 0.0 {
            let only = net.with_tap_strength(0.0)?.with_single_tap_strength(index, tap.g)?;
            for label in &dark {
                if net.probe_point(label)? <= tap.stage {
                    continue;
                }
                let magnitude = arm_amplitude_single(&only, index, label, tap.g)?;
                let gs = [tap.g, tap.g / 2.0, tap.g / 4.0];
                let probe = |g: f64| arm_amplitude_single(&only, index, label, g).map(|m| Cplx::new(m, 0.0));
                let sweep = g_sweep(&probe, &gs, SweepTarget::Divided, tol.discontinuity)?;
                induced.push(InducedAmplitude {
                    label: label.to_string(),
                    magnitude,
                    slope: magnitude / tap.g,
                    limit: sweep.extrapolated_limit.re,
                });
            }
        }
        taps.push(TapDiagnostic {
            path: tap.path.to_string(),
            stage: tap.stage,
            g: tap.g,
            derailment,
            induced,
        });
    }

    Ok(WhichWayReport {
        arms,
        success_probability,
        completeness_residual,
        taps,
    })
}

fn arm_amplitude_single(net: &PathNetwork, index: usize, label: &str, g: f64) -> Result<f64> {
    let net = net.with_single_tap_strength(index, g)?;
    let stage = net.probe_point(label)?;
    Ok(propagate(&net, Some(stage))?.amplitude(net.mode(label)?)?.norm())
}

/// `⟨fin|in⟩` at any stage boundary; equals the detector amplitude.
pub fn detector_amplitude(net: &PathNetwork) -> Result<Cplx> {
    let (f, b) = two_state_at(net, 0)?;
    inner(&b, &f)
}
