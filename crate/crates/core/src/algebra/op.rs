use super::ket::check_dims;
use super::{all_finite, Cplx, Ket, I};
use crate::error::{Error, Result};
use crate::tolerances::STRUCTURAL;

/// Outcome of a structural check on an [`Op`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Check {
    #[default]
    Unchecked,
    Verified,
    Refuted,
}

impl Check {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Check::Verified
        } else {
            Check::Refuted
        }
    }

    pub fn is_verified(self) -> bool {
        self == Check::Verified
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StructureFlags {
    pub hermitian: Check,
    pub unitary: Check,
    pub projector: Check,
}

/// Square complex matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Op {
    dim: usize,
    entries: Vec<Cplx>,
    flags: StructureFlags,
}

impl Op {
    /// Builds an operator from row-major entries. Flags start unchecked.
    pub fn new(dim: usize, entries: Vec<Cplx>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("operator must have positive dimension".into()));
        }
        check_dims("Op::new", dim * dim, entries.len())?;
        if !all_finite(&entries) {
            return Err(Error::NonFinite("operator"));
        }
        Ok(Self {
            dim,
            entries,
            flags: StructureFlags::default(),
        })
    }

    pub fn from_rows(rows: &[Vec<Cplx>]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            check_dims("Op::from_rows", dim, row.len())?;
        }
        Self::new(dim, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Cplx>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Cplx::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub(crate) fn from_vec_unchecked(dim: usize, entries: Vec<Cplx>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Self {
            dim,
            entries,
            flags: StructureFlags::default(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::identity_unchecked(dim).verified()
    }

    fn identity_unchecked(dim: usize) -> Self {
        let mut entries = vec![Cplx::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Cplx::new(1.0, 0.0);
        }
        Self::from_vec_unchecked(dim, entries)
    }

    pub fn sigma_x() -> Self {
        Self::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
            .expect("static matrix")
            .verified()
    }

    pub fn sigma_y() -> Self {
        let z = Cplx::new(0.0, 0.0);
        Self::from_vec_unchecked(2, vec![z, -I, I, z]).verified()
    }

    pub fn sigma_z() -> Self {
        Self::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
            .expect("static matrix")
            .verified()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Cplx] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Cplx {
        self.entries[row * self.dim + col]
    }

    pub fn flags(&self) -> StructureFlags {
        self.flags
    }

    /// Runs all structural checks and records the verdicts.
    pub fn verified(mut self) -> Self {
        let hermitian = self.hermitian_deviation() <= STRUCTURAL;
        self.flags = StructureFlags {
            hermitian: Check::from_bool(hermitian),
            unitary: Check::from_bool(self.unitary_deviation() <= STRUCTURAL),
            projector: Check::from_bool(hermitian && self.idempotence_deviation() <= STRUCTURAL),
        };
        self
    }

    /// `max |M − M†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `max |M†M − I|`.
    pub fn unitary_deviation(&self) -> f64 {
        max_abs_diff(
            &self.adjoint().matmul(self).entries,
            &Op::identity_unchecked(self.dim).entries,
        )
    }

    /// `max |M² − M|`.
    pub fn idempotence_deviation(&self) -> f64 {
        max_abs_diff(&self.matmul(self).entries, &self.entries)
    }

    /// Returns `Ok` if the operator is hermitian, checking on demand when the
    /// flag has not been computed.
    pub fn require_hermitian(&self) -> Result<()> {
        match self.flags.hermitian {
            Check::Verified => Ok(()),
            _ => {
                let deviation = self.hermitian_deviation();
                if deviation <= STRUCTURAL {
                    Ok(())
                } else {
                    Err(Error::NotHermitian { deviation })
                }
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(j, i).conj());
            }
        }
        Self::from_vec_unchecked(n, entries)
    }

    /// Matrix product `self · rhs`. Panics on dimension mismatch; use
    /// [`Op::try_matmul`] for checked composition.
    pub fn matmul(&self, rhs: &Op) -> Self {
        self.try_matmul(rhs).expect("matmul dimension mismatch")
    }

    pub fn try_matmul(&self, rhs: &Op) -> Result<Self> {
        check_dims("matmul", self.dim, rhs.dim)?;
        let n = self.dim;
        let mut entries = vec![Cplx::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Cplx::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(Self::from_vec_unchecked(n, entries))
    }

    pub fn add(&self, rhs: &Op) -> Result<Self> {
        self.combine(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Op) -> Result<Self> {
        self.combine(rhs, |a, b| a - b)
    }

    pub fn scaled(&self, c: Cplx) -> Self {
        Self::from_vec_unchecked(self.dim, self.entries.iter().map(|z| z * c).collect())
    }

    fn combine(&self, rhs: &Op, f: impl Fn(Cplx, Cplx) -> Cplx) -> Result<Self> {
        check_dims("operator sum", self.dim, rhs.dim)?;
        Ok(Self::from_vec_unchecked(
            self.dim,
            self.entries.iter().zip(&rhs.entries).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }
}

fn max_abs_diff(a: &[Cplx], b: &[Cplx]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Matrix-vector product `M |v⟩`.
pub fn apply(m: &Op, v: &Ket) -> Result<Ket> {
    check_dims("apply", m.dim, v.dim())?;
    let n = m.dim;
    let amps = v.amps();
    let out = (0..n)
        .map(|i| m.entries[i * n..(i + 1) * n].iter().zip(amps).map(|(a, b)| a * b).sum())
        .collect();
    Ok(Ket::from_vec_unchecked(out))
}

/// Kronecker product `A ⊗ B` in the system-major convention.
pub fn tensor_op(a: &Op, b: &Op) -> Op {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut entries = vec![Cplx::new(0.0, 0.0); n * n];
    for i in 0..na {
        for j in 0..na {
            let aij = a.get(i, j);
            for k in 0..nb {
                for l in 0..nb {
                    entries[(i * nb + k) * n + (j * nb + l)] = aij * b.get(k, l);
                }
            }
        }
    }
    Op::from_vec_unchecked(n, entries)
}

/// Rank-one projector `|v̂⟩⟨v̂|` onto the normalized direction of `v`.
pub fn projector_onto(v: &Ket) -> Result<Op> {
    let unit = v.normalized()?;
    let a = unit.amps();
    let n = a.len();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(a[i] * a[j].conj());
        }
    }
    Ok(Op::from_vec_unchecked(n, entries).verified())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Cplx {
        Cplx::new(re, 0.0)
    }

    #[test]
    fn pauli_flags() {
        for p in [Op::sigma_x(), Op::sigma_y(), Op::sigma_z()] {
            let f = p.flags();
            assert!(f.hermitian.is_verified());
            assert!(f.unitary.is_verified());
            assert_eq!(f.projector, Check::Refuted);
        }
    }

    #[test]
    fn new_op_is_unchecked() {
        let m = Op::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(m.flags(), StructureFlags::default());
        let m = m.verified();
        assert_eq!(m.flags().hermitian, Check::Refuted);
        assert!(m.require_hermitian().is_err());
    }

    #[test]
    fn apply_identity_and_sigma_z() {
        let v = Ket::new(vec![Cplx::new(0.2, 0.1), Cplx::new(-1.0, 3.0)]).unwrap();
        assert_eq!(apply(&Op::identity(2), &v).unwrap(), v);

        let plus = Ket::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let out = apply(&Op::sigma_z(), &plus).unwrap();
        assert_eq!(out.amps(), &[c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)]);
    }

    #[test]
    fn apply_projector_keeps_first_component() {
        let pi0 = projector_onto(&Ket::basis(2, 0).unwrap()).unwrap();
        let v = Ket::new(vec![Cplx::new(0.3, 0.4), Cplx::new(5.0, -1.0)]).unwrap();
        let out = apply(&pi0, &v).unwrap();
        assert_eq!(out.amps(), &[Cplx::new(0.3, 0.4), c(0.0)]);
    }

    #[test]
    fn apply_rejects_mismatch() {
        assert!(apply(&Op::identity(3), &Ket::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn tensor_identity() {
        assert_eq!(
            tensor_op(&Op::identity(2), &Op::identity(2)).entries(),
            Op::identity(4).entries()
        );
    }

    #[test]
    fn projector_onto_cases() {
        let p = projector_onto(&Ket::basis(2, 0).unwrap()).unwrap();
        assert_eq!(p.entries(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert!(p.flags().projector.is_verified());

        let p = projector_onto(&Ket::from_real(&[1.0, 1.0]).unwrap()).unwrap();
        for z in p.entries() {
            assert!((z - c(0.5)).norm() < 1e-15);
        }
        assert!(p.flags().projector.is_verified());

        let zero = Ket::from_real(&[0.0, 0.0]).unwrap();
        assert!(matches!(projector_onto(&zero), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn op_new_validates_shape() {
        assert!(Op::new(2, vec![c(1.0); 3]).is_err());
        assert!(Op::new(0, vec![]).is_err());
        assert!(Op::from_rows(&[vec![c(1.0), c(0.0)], vec![c(1.0)]]).is_err());
    }
}
