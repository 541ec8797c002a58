//! Exact desk-scale simulation of weak measurements on pre- and post-selected
//! quantum systems.
//!
//! The crate is organized in three layers:
//!
//! * [`algebra`]: dense complex states, operators, tensor products and a
//!   Hermitian eigensolver.
//! * [`weakmeas`]: von Neumann pointer coupling `exp(-i g S ⊗ P_M)`,
//!   postselection, pointer readout, divide-by-`g` weak-value extraction and
//!   the diagnostic reports (derailment, additivity, `g → 0` sweeps).
//! * [`interferometer`]: staged path networks such as the nested
//!   Mach-Zehnder interferometer, with optional weak taps on single arms.
//!
//! All numerical thresholds live in [`tolerances`].

pub mod algebra;
pub mod error;
pub mod interferometer;
pub mod tolerances;
pub mod weakmeas;

pub use algebra::{Cplx, JointKet, Ket, Op};
pub use error::{Error, Result};
