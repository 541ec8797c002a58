//! Weak measurement protocol: pointer coupling, postselection, readout and
//! the divide-by-`g` weak-value extraction, plus the derailment, additivity
//! and `g → 0` limit diagnostics.
//!
//! Pointer conventions: a meter of width `σ` starts as a Gaussian with
//! `⟨Q⟩ = ⟨P⟩ = 0` and position spread `σ`. After coupling
//! `exp(−i g S ⊗ P_M)` and postselection, `Re S_w = ΔQ/g` and
//! `Im S_w = 2σ²·ΔP/g` to leading order in `g`.

mod coupling;
mod extract;
mod gaussian;
mod meter;
mod report;
mod sweep;

pub use coupling::{
    exact_coupled_joint, first_order_joint, pointer_readout, postselect, Branch, BranchJoint, CoupledJoint, GridJoint,
    MeterState, Postselected, Spectrum,
};
pub use extract::{
    analytic_weak_value, extract_weak_value, pointer_shift, shifts_to_weak_value, Method, WeakValueResult,
};
pub use gaussian::{GaussianSum, GaussianTerm};
pub use meter::{Grid, MeterKind, MeterModel, DEFAULT_GRID_HALF_WIDTH, DEFAULT_GRID_POINTS};
pub use report::{additivity_report, derailment_check, AdditivityReport, DerailmentReport};
pub use sweep::{
    extrapolate_to_zero, g_sweep, Endpoint, PointerShiftProbe, Polynomial, SweepProbe, SweepResult, SweepRow,
    SweepTarget,
};
