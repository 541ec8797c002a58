//! Staged path interferometers with optional weak taps, projector (which-way)
//! weak values and dark-port diagnostics.
//!
//! Beam splitters follow the symmetric convention `[[t, i·r], [i·r, t]]`
//! with `r = √(1 − t²)`; every quoted weak value depends on it.

mod nested;
mod network;
mod propagate;
mod whichway;

pub use nested::{
    build_nested_mzi, NestedMziParams, TapSpec, DARK_PORT, DEFAULT_FINAL_T, DEFAULT_INNER_PHASE, DEFAULT_INNER_T,
    DEFAULT_OUTER_T, DETECTOR, PATHS, SOURCE,
};
pub use network::{Element, PathNetwork, TapInfo};
pub use propagate::{
    arm_amplitude, backpropagate_detector, propagate, propagate_first_order, propagate_paths, NetworkState,
};
pub use whichway::{
    detector_amplitude, pointer_weak_value, projector_weak_value, projector_weak_value_at, two_state_at,
    which_way_report, ArmEntry, InducedAmplitude, TapDiagnostic, WhichWayReport,
};
