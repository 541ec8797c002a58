use super::extract::analytic_weak_value;
use crate::algebra::{apply, check_dims, inner, Cplx, Ket, Op};
use crate::error::{Error, Result};
use crate::tolerances;

/// Whether a weak measurement of `S` on `|in⟩` "derails" the state: the
/// induced component `S|in⟩` exists but has no overlap with `|in⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerailmentReport {
    /// `⟨in|S|in⟩` as a sesquilinear form.
    pub expectation: Cplx,
    /// `‖S|in⟩‖`.
    pub s_in_norm: f64,
    pub derailed: bool,
    /// `⟨in|(S|in⟩)⟩`, the same number computed through `apply`.
    pub overlap_with_in: Cplx,
}

pub fn derailment_check(s: &Op, input: &Ket, tol: f64) -> Result<DerailmentReport> {
    check_dims("derailment_check", s.dim(), input.dim())?;
    s.require_hermitian()?;
    let input = if input.is_normalized() {
        input.clone()
    } else {
        input.normalized()?
    };
    let a = input.amps();
    let n = a.len();
    let mut expectation = Cplx::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            expectation += a[i].conj() * s.get(i, j) * a[j];
        }
    }
    let s_in = apply(s, &input)?;
    let overlap_with_in = inner(&input, &s_in)?;
    if (expectation - overlap_with_in).norm() > tolerances::STRUCTURAL {
        return Err(Error::InvariantBreach(format!(
            "expectation paths disagree: {expectation} vs {overlap_with_in}"
        )));
    }
    let s_in_norm = s_in.norm();
    Ok(DerailmentReport {
        expectation,
        s_in_norm,
        derailed: expectation.norm() <= tol && s_in_norm > tol,
        overlap_with_in,
    })
}

/// Weak values of two observables and of their sum, each with its
/// derailment verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditivityReport {
    pub first: Cplx,
    pub second: Cplx,
    pub sum: Cplx,
    /// `|(S1+S2)_w − (S1)_w − (S2)_w|`.
    pub residual: f64,
    pub first_derailment: DerailmentReport,
    pub second_derailment: DerailmentReport,
    pub sum_derailment: DerailmentReport,
}

impl AdditivityReport {
    /// The parts pass the derailment criterion while their sum fails it (or
    /// the reverse): the verdict depends on how the weak value is assembled.
    pub fn is_ambiguous(&self) -> bool {
        let parts = self.first_derailment.derailed || self.second_derailment.derailed;
        parts != self.sum_derailment.derailed
    }
}

pub fn additivity_report(s1: &Op, s2: &Op, input: &Ket, fin: &Ket, tol: f64) -> Result<AdditivityReport> {
    let sum_op = s1.add(s2)?;
    let first = analytic_weak_value(s1, input, fin)?.value;
    let second = analytic_weak_value(s2, input, fin)?.value;
    let sum = analytic_weak_value(&sum_op, input, fin)?.value;
    let residual = (sum - first - second).norm();
    let scale = 1.0 + first.norm().max(second.norm());
    if residual > tolerances::SPECTRAL * scale {
        return Err(Error::InvariantBreach(format!(
            "weak values are not additive: residual {residual:e}"
        )));
    }
    Ok(AdditivityReport {
        first,
        second,
        sum,
        residual,
        first_derailment: derailment_check(s1, input, tol)?,
        second_derailment: derailment_check(s2, input, tol)?,
        sum_derailment: derailment_check(&sum_op, input, tol)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn plus() -> Ket {
        Ket::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()
    }

    #[test]
    fn sigma_z_on_plus_is_derailed() {
        let r = derailment_check(&Op::sigma_z(), &plus(), tolerances::DERAILMENT).unwrap();
        assert_eq!(r.expectation, Cplx::new(0.0, 0.0));
        assert!((r.s_in_norm - 1.0).abs() < 1e-15);
        assert!(r.derailed);
    }

    #[test]
    fn sigma_z_plus_minus_sigma_x_are_not() {
        let zx = Op::sigma_z().add(&Op::sigma_x()).unwrap();
        let r = derailment_check(&zx, &plus(), tolerances::DERAILMENT).unwrap();
        assert!((r.expectation - Cplx::new(1.0, 0.0)).norm() < 1e-15);
        assert!(!r.derailed);

        let zmx = Op::sigma_z().sub(&Op::sigma_x()).unwrap();
        let r = derailment_check(&zmx, &plus(), tolerances::DERAILMENT).unwrap();
        assert!((r.expectation + Cplx::new(1.0, 0.0)).norm() < 1e-15);
        assert!(!r.derailed);
    }

    #[test]
    fn zero_operator_is_not_derailed() {
        let zero = Op::identity(2).scaled(Cplx::new(0.0, 0.0));
        let r = derailment_check(&zero, &plus(), tolerances::DERAILMENT).unwrap();
        assert!(!r.derailed);
    }

    #[test]
    fn additivity_ambiguity_for_sigma_z() {
        let s1 = Op::sigma_z().add(&Op::sigma_x()).unwrap();
        let s2 = Op::sigma_z().sub(&Op::sigma_x()).unwrap();
        let up = Ket::basis(2, 0).unwrap();
        let r = additivity_report(&s1, &s2, &plus(), &up, tolerances::DERAILMENT).unwrap();
        assert!((r.first - Cplx::new(2.0, 0.0)).norm() < 1e-12);
        assert!(r.second.norm() < 1e-12);
        assert!((r.sum - Cplx::new(2.0, 0.0)).norm() < 1e-12);
        assert!(!r.first_derailment.derailed && !r.second_derailment.derailed);
        assert!(r.sum_derailment.derailed);
        assert!(r.is_ambiguous());
    }

    #[test]
    fn identity_pair_sums_to_two() {
        let v = Ket::new(vec![Cplx::new(0.2, 0.4), Cplx::new(1.0, -0.3)]).unwrap();
        let r = additivity_report(&Op::identity(2), &Op::identity(2), &v, &v, tolerances::DERAILMENT).unwrap();
        assert!((r.sum - Cplx::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn orthogonal_postselection_propagates() {
        let minus = Ket::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        assert!(matches!(
            additivity_report(&Op::sigma_z(), &Op::sigma_x(), &plus(), &minus, 1e-10),
            Err(Error::OrthogonalPostselection { .. })
        ));
    }
}
