//! Dense complex linear algebra over small Hilbert spaces.
//!
//! Joint system ⊗ meter states use the system-major index convention
//! `index = s · meter_dim + m` throughout.

mod eigen;
mod joint;
mod ket;
mod op;

pub use eigen::{hermitian_eigensystem, Eigensystem};
pub use joint::{tensor_ket, JointKet};
pub(crate) use ket::check_dims;
pub use ket::{fidelity, inner, Ket};
pub use op::{apply, projector_onto, tensor_op, Check, Op, StructureFlags};

/// Complex amplitude.
pub type Cplx = num_complex::Complex64;

pub(crate) const I: Cplx = Cplx::new(0.0, 1.0);

pub(crate) fn all_finite(values: &[Cplx]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}
