//! The nested Mach-Zehnder interferometer.
//!
//! ```text
//!            ┌──────────── A ────────────┐
//! source ─ BS₁                           BS₃ ─ D1 (detector)
//!            └─ I ─ BS₂ ─ B ─┐           │      └ D2
//!                       └─ C ─ φ ─ BS₃'─ F ┘
//!                                    └─ E (dark port)
//! ```
//!
//! The source enters on `A`. `BS₁` keeps the outer arm on `A` and sends the
//! inner input into `I`; the inner splitter divides it into arms `B` and `C`;
//! the inner recombiner emits `E` (dark for the balanced, phase-free inner
//! interferometer) and `F`; `F` meets `A` at the final splitter and the
//! detector sits on `D1`.

use std::f64::consts::FRAC_1_SQRT_2;

use super::network::{Element, PathNetwork};
use crate::error::{Error, Result};
use crate::weakmeas::MeterModel;

/// Outer splitter transmission: `|A|² = 1/3`, so `A`, `B` and `C` carry
/// equal forward intensity.
pub const DEFAULT_OUTER_T: f64 = 0.577_350_269_189_625_7;
/// Balanced inner splitter and recombiner.
pub const DEFAULT_INNER_T: f64 = FRAC_1_SQRT_2;
/// Inner phase that makes `E` dark under the `[[t, ir], [ir, t]]` convention.
pub const DEFAULT_INNER_PHASE: f64 = 0.0;
/// Balanced final splitter; the detector port stays bright.
pub const DEFAULT_FINAL_T: f64 = FRAC_1_SQRT_2;

pub const PATHS: [&str; 8] = ["A", "I", "B", "C", "E", "F", "D1", "D2"];
pub const SOURCE: &str = "A";
pub const DETECTOR: &str = "D1";
pub const DARK_PORT: &str = "E";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedMziParams {
    pub outer_t: f64,
    pub inner_t: f64,
    pub inner_phase: f64,
    pub final_t: f64,
}

impl Default for NestedMziParams {
    fn default() -> Self {
        Self {
            outer_t: DEFAULT_OUTER_T,
            inner_t: DEFAULT_INNER_T,
            inner_phase: DEFAULT_INNER_PHASE,
            final_t: DEFAULT_FINAL_T,
        }
    }
}

/// Weak tap to place on one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapSpec<'a> {
    pub arm: &'a str,
    pub g: f64,
    pub meter: MeterModel,
}

pub fn build_nested_mzi(params: NestedMziParams, tap: Option<TapSpec<'_>>) -> Result<PathNetwork> {
    for (name, t) in [
        ("outer_t", params.outer_t),
        ("inner_t", params.inner_t),
        ("final_t", params.final_t),
    ] {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidArgument(format!("{name} must lie in (0, 1), got {t}")));
        }
    }
    let stages = vec![
        Element::beam_splitter("A", "I", params.outer_t),
        Element::beam_splitter("I", "C", params.inner_t),
        Element::relabel("I", "B"),
        Element::phase("C", params.inner_phase),
        Element::beam_splitter("B", "C", params.inner_t),
        Element::relabel("B", "E"),
        Element::relabel("C", "F"),
        Element::beam_splitter("A", "F", params.final_t),
        Element::relabel("A", "D1"),
        Element::relabel("F", "D2"),
    ];
    let net = PathNetwork::new(PATHS.iter().map(|s| s.to_string()).collect(), stages, SOURCE, DETECTOR)?;
    match tap {
        Some(t) => net.with_tap(t.arm, t.g, t.meter),
        None => Ok(net),
    }
}
