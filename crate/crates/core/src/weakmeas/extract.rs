use super::coupling::{exact_coupled_joint, pointer_readout, postselect, MeterState};
use super::meter::MeterModel;
use crate::algebra::{apply, check_dims, inner, Cplx, Ket, Op};
use crate::error::{Error, Result};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// `⟨fin|S|in⟩ / ⟨fin|in⟩` evaluated directly.
    Analytic,
    /// Pointer shifts of the postselected meter divided by `g`.
    Pointer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueResult {
    pub value: Cplx,
    pub method: Method,
    pub g_used: f64,
    pub est_error: f64,
}

/// `S_w = ⟨fin|S|in⟩ / ⟨fin|in⟩`.
pub fn analytic_weak_value(s: &Op, input: &Ket, fin: &Ket) -> Result<WeakValueResult> {
    check_dims("analytic_weak_value", s.dim(), input.dim())?;
    check_dims("analytic_weak_value", s.dim(), fin.dim())?;
    let input = input.normalized()?;
    let fin = fin.normalized()?;
    let overlap = inner(&fin, &input)?;
    if overlap.norm() <= tolerances::ORTHOGONAL_POSTSELECTION {
        return Err(Error::OrthogonalPostselection {
            overlap: overlap.norm(),
        });
    }
    let value = inner(&fin, &apply(s, &input)?)? / overlap;
    Ok(WeakValueResult {
        value,
        method: Method::Analytic,
        g_used: 0.0,
        est_error: 0.0,
    })
}

/// Converts pointer shifts into a weak-value estimate:
/// `Re = ΔQ/g`, `Im = 2σ²·ΔP/g`.
pub fn shifts_to_weak_value(dq: f64, dp: f64, sigma: f64, g: f64) -> Cplx {
    Cplx::new(dq / g, 2.0 * sigma * sigma * dp / g)
}

/// Raw pointer shift `ΔQ + i·2σ²ΔP` of the postselected meter at strength `g`.
///
/// Dividing by `g` gives the weak-value estimate; at `g = 0` the shift is
/// exactly zero.
pub fn pointer_shift(s: &Op, input: &Ket, fin: &Ket, meter: &MeterModel, g: f64) -> Result<Cplx> {
    let input = input.normalized()?;
    let joint = exact_coupled_joint(&input, meter, s, g)?;
    let post = postselect(&joint, fin)?;
    let (q, p) = pointer_readout(&post.meter)?;
    let (q0, p0) = initial_readout(meter)?;
    let s2 = meter.sigma * meter.sigma;
    Ok(Cplx::new(q - q0, 2.0 * s2 * (p - p0)))
}

fn initial_readout(meter: &MeterModel) -> Result<(f64, f64)> {
    match meter.initial_grid_ket() {
        Some(k) => pointer_readout(&MeterState::Grid {
            amps: k.into_amps(),
            meters: vec![*meter],
        }),
        None => Ok((0.0, 0.0)),
    }
}

/// Divide-by-`g` extraction: couple exactly, postselect on `fin`, read the
/// pointer and divide its shifts by `g`.
///
/// `est_error` is the first-order Richardson residual `2·|v(g) − v(g/2)|`.
pub fn extract_weak_value(s: &Op, input: &Ket, fin: &Ket, meter: &MeterModel, g: f64) -> Result<WeakValueResult> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "extraction needs a positive coupling strength, got {g}"
        )));
    }
    let value = pointer_shift(s, input, fin, meter, g)? / g;
    let half = pointer_shift(s, input, fin, meter, g / 2.0)? / (g / 2.0);
    Ok(WeakValueResult {
        value,
        method: Method::Pointer,
        g_used: g,
        est_error: 2.0 * (value - half).norm(),
    })
}
