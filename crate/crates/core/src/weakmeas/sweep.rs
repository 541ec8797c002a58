use super::extract::pointer_shift;
use super::meter::MeterModel;
use crate::algebra::{Cplx, Ket, Op};
use crate::error::{Error, Result};
use crate::tolerances;

/// A quantity that depends on the coupling strength `g`.
pub trait SweepProbe {
    /// The raw (undivided) quantity at strength `g ≥ 0`.
    fn raw(&self, g: f64) -> Result<Cplx>;
}

impl<F> SweepProbe for F
where
    F: Fn(f64) -> Result<Cplx>,
{
    fn raw(&self, g: f64) -> Result<Cplx> {
        self(g)
    }
}

/// `f(x) = Σ_k c_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl SweepProbe for Polynomial {
    fn raw(&self, x: f64) -> Result<Cplx> {
        let v = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        Ok(Cplx::new(v, 0.0))
    }
}

/// Pointer shift `ΔQ + i·2σ²ΔP` of a weak measurement of `S` between `in`
/// and `fin`.
#[derive(Debug, Clone)]
pub struct PointerShiftProbe {
    pub observable: Op,
    pub input: Ket,
    pub fin: Ket,
    pub meter: MeterModel,
}

impl SweepProbe for PointerShiftProbe {
    fn raw(&self, g: f64) -> Result<Cplx> {
        pointer_shift(&self.observable, &self.input, &self.fin, &self.meter, g)
    }
}

/// Which column of the sweep is extrapolated and compared with `g = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    /// `raw(g) / g`; never defined at `g = 0`.
    Divided,
    /// `raw(g)` itself.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Defined(Cplx),
    /// The `0/0` of a divided quantity evaluated at `g = 0`.
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub g: f64,
    pub raw: Cplx,
    pub divided: Cplx,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Sorted by decreasing `g`.
    pub rows: Vec<SweepRow>,
    pub target: SweepTarget,
    pub extrapolated_limit: Cplx,
    pub endpoint: Endpoint,
    pub tolerance: f64,
    pub discontinuity_flag: bool,
}

/// Evaluates `probe` at each `g`, extrapolates the target column to `g → 0`
/// and compares the limit with the value at `g = 0`.
pub fn g_sweep(probe: &dyn SweepProbe, gs: &[f64], target: SweepTarget, tol: f64) -> Result<SweepResult> {
    if gs.len() < 2 {
        return Err(Error::InsufficientData { points: gs.len() });
    }
    let mut sorted = gs.to_vec();
    if let Some(bad) = sorted.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "sweep strengths must be positive, got {bad}"
        )));
    }
    sorted.sort_by(|a, b| b.total_cmp(a));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("sweep strengths must be distinct".into()));
    }

    let rows = sorted
        .iter()
        .map(|&g| {
            let raw = probe.raw(g)?;
            Ok(SweepRow {
                g,
                raw,
                divided: raw / g,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let ys: Vec<Cplx> = rows
        .iter()
        .map(|r| match target {
            SweepTarget::Divided => r.divided,
            SweepTarget::Raw => r.raw,
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.g).collect();
    let extrapolated_limit = extrapolate_to_zero(&xs, &ys);

    let endpoint = match target {
        SweepTarget::Divided => Endpoint::Undefined,
        SweepTarget::Raw => Endpoint::Defined(probe.raw(0.0)?),
    };
    let discontinuity_flag = match endpoint {
        Endpoint::Undefined => true,
        Endpoint::Defined(v) => (extrapolated_limit - v).norm() > tol,
    };
    Ok(SweepResult {
        rows,
        target,
        extrapolated_limit,
        endpoint,
        tolerance: tol,
        discontinuity_flag,
    })
}

/// Neville extrapolation to `x = 0` through the points nearest the origin,
/// with degree capped at [`tolerances::MAX_EXTRAPOLATION_DEGREE`].
pub fn extrapolate_to_zero(xs: &[f64], ys: &[Cplx]) -> Cplx {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].abs().total_cmp(&xs[b].abs()));
    idx.truncate(tolerances::MAX_EXTRAPOLATION_DEGREE + 1);
    let x: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let mut p: Vec<Cplx> = idx.iter().map(|&i| ys[i]).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (x[i], x[i + level]);
            p[i] = (p[i] * (-xj) - p[i + 1] * (-xi)) / (xi - xj);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_plus_quadratic_divided_limit() {
        let f = Polynomial {
            coeffs: vec![0.0, 2.0, 5.0],
        };
        let r = g_sweep(&f, &[1e-3, 1e-1, 1e-2], SweepTarget::Divided, tolerances::DISCONTINUITY).unwrap();
        let divided: Vec<f64> = r.rows.iter().map(|row| row.divided.re).collect();
        for (d, e) in divided.iter().zip([2.5, 2.05, 2.005]) {
            assert!((d - e).abs() < 1e-12);
        }
        assert!((r.extrapolated_limit - Cplx::new(2.0, 0.0)).norm() < 1e-9);
        assert_eq!(r.endpoint, Endpoint::Undefined);
        assert!(r.discontinuity_flag);
    }

    #[test]
    fn raw_target_is_continuous() {
        let f = Polynomial {
            coeffs: vec![0.0, 2.0, 5.0],
        };
        let r = g_sweep(&f, &[1e-1, 1e-2, 1e-3], SweepTarget::Raw, tolerances::DISCONTINUITY).unwrap();
        assert_eq!(r.endpoint, Endpoint::Defined(Cplx::new(0.0, 0.0)));
        assert!(!r.discontinuity_flag);
    }

    #[test]
    fn rows_sorted_decreasing() {
        let f = Polynomial { coeffs: vec![1.0] };
        let r = g_sweep(&f, &[0.1, 0.3, 0.2], SweepTarget::Raw, 1e-8).unwrap();
        let gs: Vec<f64> = r.rows.iter().map(|x| x.g).collect();
        assert_eq!(gs, vec![0.3, 0.2, 0.1]);
    }

    #[test]
    fn rejects_bad_sweeps() {
        let f = Polynomial { coeffs: vec![1.0] };
        assert!(matches!(
            g_sweep(&f, &[0.1], SweepTarget::Raw, 1e-8),
            Err(Error::InsufficientData { points: 1 })
        ));
        assert!(g_sweep(&f, &[0.1, 0.1], SweepTarget::Raw, 1e-8).is_err());
        assert!(g_sweep(&f, &[0.1, -0.1], SweepTarget::Raw, 1e-8).is_err());
        assert!(g_sweep(&f, &[0.1, 0.0], SweepTarget::Raw, 1e-8).is_err());
    }

    #[test]
    fn neville_is_exact_on_cubics() {
        let xs = [0.5, 0.4, 0.3, 0.2];
        let ys: Vec<Cplx> = xs
            .iter()
            .map(|x| Cplx::new(1.5 - x + 3.0 * x * x * x, -2.0 * x))
            .collect();
        let v = extrapolate_to_zero(&xs, &ys);
        assert!((v - Cplx::new(1.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn closure_probe() {
        let probe = |g: f64| -> Result<Cplx> { Ok(Cplx::new(3.0 * g, 0.0)) };
        let r = g_sweep(&probe, &[1e-2, 1e-3], SweepTarget::Divided, 1e-8).unwrap();
        assert!((r.extrapolated_limit.re - 3.0).abs() < 1e-12);
    }
}
