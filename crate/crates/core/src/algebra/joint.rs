use super::ket::check_dims;
use super::{all_finite, Cplx, Ket};
use crate::error::{Error, Result};

/// State on `system ⊗ meter`, stored system-major: `amps[s · meter_dim + m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointKet {
    sys_dim: usize,
    meter_dim: usize,
    amps: Vec<Cplx>,
}

impl JointKet {
    pub fn new(sys_dim: usize, meter_dim: usize, amps: Vec<Cplx>) -> Result<Self> {
        if sys_dim == 0 || meter_dim == 0 {
            return Err(Error::InvalidArgument(
                "joint factors must have positive dimension".into(),
            ));
        }
        check_dims("JointKet::new", sys_dim * meter_dim, amps.len())?;
        if !all_finite(&amps) {
            return Err(Error::NonFinite("joint ket"));
        }
        Ok(Self {
            sys_dim,
            meter_dim,
            amps,
        })
    }

    pub(crate) fn from_vec_unchecked(sys_dim: usize, meter_dim: usize, amps: Vec<Cplx>) -> Self {
        debug_assert_eq!(amps.len(), sys_dim * meter_dim);
        Self {
            sys_dim,
            meter_dim,
            amps,
        }
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn meter_dim(&self) -> usize {
        self.meter_dim
    }

    pub fn amps(&self) -> &[Cplx] {
        &self.amps
    }

    pub fn get(&self, s: usize, m: usize) -> Cplx {
        self.amps[s * self.meter_dim + m]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Unnormalized meter state attached to system basis state `s`.
    pub fn meter_branch(&self, s: usize) -> Ket {
        let m = self.meter_dim;
        Ket::from_vec_unchecked(self.amps[s * m..(s + 1) * m].to_vec())
    }

    /// Partial inner product `⟨fin|_sys · |joint⟩`, a meter-space vector.
    pub fn project_system(&self, fin: &Ket) -> Result<Ket> {
        check_dims("project_system", self.sys_dim, fin.dim())?;
        let m = self.meter_dim;
        let mut out = vec![Cplx::new(0.0, 0.0); m];
        for (s, f) in fin.amps().iter().enumerate() {
            let fc = f.conj();
            if fc == Cplx::new(0.0, 0.0) {
                continue;
            }
            for (o, a) in out.iter_mut().zip(&self.amps[s * m..(s + 1) * m]) {
                *o += fc * a;
            }
        }
        Ok(Ket::from_vec_unchecked(out))
    }

    /// Splits a product state into its two factors.
    ///
    /// The factors are read off the row and column through the largest
    /// amplitude, so they are exact for product states and unique up to a
    /// global phase and a scale shared between the two.
    pub fn factorize(&self) -> Result<(Ket, Ket)> {
        let (pivot, _) = self
            .amps
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))
            .expect("non-empty joint ket");
        if self.amps[pivot].norm_sqr() == 0.0 {
            return Err(Error::DegenerateState("cannot factorize the zero joint ket"));
        }
        let (s0, m0) = (pivot / self.meter_dim, pivot % self.meter_dim);
        let sys = (0..self.sys_dim).map(|s| self.get(s, m0)).collect();
        let meter = self.amps[s0 * self.meter_dim..(s0 + 1) * self.meter_dim].to_vec();
        Ok((Ket::from_vec_unchecked(sys), Ket::from_vec_unchecked(meter)))
    }
}

/// `|a⟩ ⊗ |b⟩` with `amps[s · dim(b) + m] = a_s · b_m`.
pub fn tensor_ket(a: &Ket, b: &Ket) -> JointKet {
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in a.amps() {
        for y in b.amps() {
            amps.push(x * y);
        }
    }
    JointKet::from_vec_unchecked(a.dim(), b.dim(), amps)
}
