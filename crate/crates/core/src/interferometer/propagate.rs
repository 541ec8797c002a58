use super::network::{Element, PathNetwork};
use crate::algebra::{apply, Cplx, Ket};
use crate::error::{Error, Result};
use crate::weakmeas::{CoupledJoint, MeterModel, Spectrum};

/// State of a network after some stages.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkState {
    /// No taps: a pure path-space state.
    Paths(Ket),
    /// Path ⊗ pointers, one pointer per tap in declaration order.
    Joint(CoupledJoint),
}

impl NetworkState {
    pub fn norm(&self) -> f64 {
        match self {
            Self::Paths(k) => k.norm(),
            Self::Joint(j) => j.norm(),
        }
    }

    /// Complex amplitude on `mode` for path states; the norm of the attached
    /// pointer state (as a real number) for joint states.
    pub fn amplitude(&self, mode: usize) -> Result<Cplx> {
        match self {
            Self::Paths(k) => k
                .amps()
                .get(mode)
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("mode {mode} out of range"))),
            Self::Joint(j) => {
                let e = Ket::basis(j.sys_dim(), mode)?;
                Ok(Cplx::new(j.project_system(&e)?.norm(), 0.0))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TapMode {
    Exact,
    FirstOrder,
}

fn tap_meters(net: &PathNetwork) -> Vec<MeterModel> {
    net.taps().iter().map(|t| t.meter).collect()
}

/// Applies the stages in order, up to (not including) stage `upto`.
///
/// Taps couple their path projector to their own pointer with
/// `exp(−i g Π_path ⊗ P)`.
pub fn propagate(net: &PathNetwork, upto: Option<usize>) -> Result<NetworkState> {
    run(net, upto, TapMode::Exact)
}

/// Like [`propagate`] but each tap applies only `1 − i g Π_path ⊗ P`.
/// Requires grid pointers.
pub fn propagate_first_order(net: &PathNetwork, upto: Option<usize>) -> Result<NetworkState> {
    run(net, upto, TapMode::FirstOrder)
}

fn run(net: &PathNetwork, upto: Option<usize>, mode: TapMode) -> Result<NetworkState> {
    let end = upto.unwrap_or(net.stages().len());
    if end > net.stages().len() {
        return Err(Error::InvalidArgument(format!(
            "stage {end} beyond the {} stages of the network",
            net.stages().len()
        )));
    }
    let meters = tap_meters(net);
    if meters.is_empty() {
        return propagate_paths(net, end).map(NetworkState::Paths);
    }
    let mut joint = CoupledJoint::product(&net.source_ket(), &meters)?;
    if mode == TapMode::FirstOrder && !matches!(joint, CoupledJoint::Grid(_)) {
        return Err(Error::InvalidArgument(
            "first-order tap propagation needs grid pointers".into(),
        ));
    }
    let mut tap_index = 0;
    for (i, stage) in net.stages()[..end].iter().enumerate() {
        match stage {
            Element::WeakTap { path, g, .. } => {
                let k = net.mode(path)?;
                match (&mut joint, mode) {
                    (CoupledJoint::Grid(j), TapMode::FirstOrder) => {
                        let pk = crate::algebra::projector_onto(&Ket::basis(net.dim(), k)?)?;
                        j.couple_first_order(&pk, *g, tap_index)?;
                    }
                    _ => joint.couple(&Spectrum::basis_projector(net.dim(), k)?, *g, tap_index)?,
                }
                tap_index += 1;
            }
            _ => joint.apply_system(&net.stage_unitary(i))?,
        }
    }
    Ok(NetworkState::Joint(joint))
}

/// Path-only propagation through the first `end` stages, taps ignored.
pub fn propagate_paths(net: &PathNetwork, end: usize) -> Result<Ket> {
    let mut state = net.source_ket();
    for i in 0..end.min(net.stages().len()) {
        if !net.stages()[i].is_tap() {
            state = apply(&net.stage_unitary(i), &state)?;
        }
    }
    Ok(state)
}

/// Detector state propagated backwards through the adjoints of stages
/// `from..` down to stage boundary `from`.
pub fn backpropagate_detector(net: &PathNetwork, from: usize) -> Result<Ket> {
    let mut state = net.detector_ket();
    for i in (from..net.stages().len()).rev() {
        if !net.stages()[i].is_tap() {
            state = apply(&net.stage_unitary(i).adjoint(), &state)?;
        }
    }
    Ok(state)
}

/// Amplitude on `label` at its probe point with every tap set to `g`.
///
/// Without taps this is the complex path amplitude; with taps it is the norm
/// of the pointer state attached to that path.
pub fn arm_amplitude(net: &PathNetwork, label: &str, g: f64) -> Result<Cplx> {
    let stage = net.probe_point(label)?;
    let net = net.with_tap_strength(g)?;
    propagate(&net, Some(stage))?.amplitude(net.mode(label)?)
}
