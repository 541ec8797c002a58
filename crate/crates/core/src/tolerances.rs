//! Numerical thresholds shared by every module.
//!
//! Structural checks (hermiticity, unitarity, idempotence, normalization)
//! use [`STRUCTURAL`]; anything that goes through the eigensolver uses
//! [`SPECTRAL`].

/// Structural identities that hold exactly up to round-off.
pub const STRUCTURAL: f64 = 1e-12;

/// Eigen-decomposition reconstruction and orthonormality.
pub const SPECTRAL: f64 = 1e-10;

/// `|⟨fin|in⟩|` at or below this makes a weak value undefined.
pub const ORTHOGONAL_POSTSELECTION: f64 = 1e-12;

/// A postselected meter state with norm at or below this is treated as null.
pub const NULL_POSTSELECTION: f64 = 1e-14;

/// Default threshold on `|⟨in|S|in⟩|` for the derailment verdict.
pub const DERAILMENT: f64 = 1e-10;

/// Default threshold on `|(Π)_w|` for the which-way presence verdict.
pub const PRESENCE: f64 = 1e-8;

/// Default threshold on `|limit − endpoint|` for a sweep discontinuity.
pub const DISCONTINUITY: f64 = 1e-8;

/// Largest pointer amplitude allowed at the edge of a grid meter.
pub const GRID_BOUNDARY: f64 = 1e-8;

/// Highest polynomial degree used when extrapolating a sweep to `g = 0`.
pub const MAX_EXTRAPOLATION_DEGREE: usize = 4;

/// Runtime-adjustable copy of the thresholds a caller may want to override.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub derailment: f64,
    pub presence: f64,
    pub discontinuity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            derailment: DERAILMENT,
            presence: PRESENCE,
            discontinuity: DISCONTINUITY,
        }
    }
}

impl Tolerances {
    /// Multiplies every threshold by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            derailment: self.derailment * factor,
            presence: self.presence * factor,
            discontinuity: self.discontinuity * factor,
        }
    }
}
