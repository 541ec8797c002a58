use super::{all_finite, Cplx};
use crate::error::{Error, Result};
use crate::tolerances;

/// Finite-dimensional state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: Vec<Cplx>,
    label: Option<String>,
}

impl Ket {
    pub fn new(amps: Vec<Cplx>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidArgument("ket must have positive dimension".into()));
        }
        if !all_finite(&amps) {
            return Err(Error::NonFinite("ket"));
        }
        Ok(Self { amps, label: None })
    }

    /// Builds a ket from real amplitudes.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Cplx::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![Cplx::new(0.0, 0.0); dim];
        amps[k] = Cplx::new(1.0, 0.0);
        Ok(Self { amps, label: None })
    }

    pub(crate) fn from_vec_unchecked(amps: Vec<Cplx>) -> Self {
        debug_assert!(all_finite(&amps));
        Self { amps, label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Cplx] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Cplx> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns the unit vector along `self`.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= tolerances::NULL_POSTSELECTION {
            return Err(Error::DegenerateState("cannot normalize a zero-norm ket"));
        }
        Ok(Self {
            amps: self.amps.iter().map(|z| z / n).collect(),
            label: self.label.clone(),
        })
    }

    pub fn scaled(&self, c: Cplx) -> Self {
        Self::from_vec_unchecked(self.amps.iter().map(|z| z * c).collect())
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: Cplx, other: &Ket) -> Result<Self> {
        check_dims("add_scaled", self.dim(), other.dim())?;
        Ok(Self::from_vec_unchecked(
            self.amps.iter().zip(&other.amps).map(|(a, b)| a + c * b).collect(),
        ))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= tolerances::STRUCTURAL
    }
}

pub(crate) fn check_dims(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// `⟨a|b⟩ = Σ conj(aᵢ) bᵢ`.
pub fn inner(a: &Ket, b: &Ket) -> Result<Cplx> {
    check_dims("inner", a.dim(), b.dim())?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Ray fidelity `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`, insensitive to global phase.
pub fn fidelity(a: &Ket, b: &Ket) -> Result<f64> {
    let denom = a.norm_sqr() * b.norm_sqr();
    if denom == 0.0 {
        return Err(Error::DegenerateState("fidelity with a zero-norm ket"));
    }
    Ok(inner(a, b)?.norm_sqr() / denom)
}
