use super::{Cplx, Ket, Op};
use crate::error::{Error, Result};
use crate::tolerances::SPECTRAL;

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `M = Σ λᵢ |eᵢ⟩⟨eᵢ|`, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Vec<Ket>,
}

impl Eigensystem {
    /// Rebuilds `Σ λᵢ |eᵢ⟩⟨eᵢ|`.
    pub fn reconstruct(&self) -> Op {
        let n = self.values.len();
        let mut entries = vec![Cplx::new(0.0, 0.0); n * n];
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let a = v.amps();
            for i in 0..n {
                for j in 0..n {
                    entries[i * n + j] += *lambda * a[i] * a[j].conj();
                }
            }
        }
        Op::from_vec_unchecked(n, entries)
    }
}

/// Diagonalizes a hermitian operator with cyclic complex Jacobi rotations.
pub fn hermitian_eigensystem(m: &Op) -> Result<Eigensystem> {
    m.require_hermitian()?;
    let n = m.dim();
    let mut a: Vec<Cplx> = m.entries().to_vec();
    // Symmetrize so that round-off in the input cannot bias the rotations.
    for i in 0..n {
        a[i * n + i] = Cplx::new(a[i * n + i].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }
    let mut v = Op::identity(n).entries().to_vec();

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = (scale * f64::EPSILON * 0.5).max(f64::MIN_POSITIVE);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::InvariantBreach("Jacobi eigensolver did not converge".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y * n + y].re.total_cmp(&a[x * n + x].re));
    let values = order.iter().map(|&k| a[k * n + k].re).collect();
    let vectors = order
        .iter()
        .map(|&k| Ket::from_vec_unchecked((0..n).map(|i| v[i * n + k]).collect()))
        .collect();
    let sys = Eigensystem { values, vectors };
    debug_assert!(reconstruction_error(m, &sys) <= SPECTRAL * scale.max(1.0));
    Ok(sys)
}

/// Zeroes `a[p][q]` with the unitary `G = diag(1, e^{-iφ}) · R(θ)` applied as
/// `A ← G† A G`, accumulating `V ← V G`.
fn rotate(a: &mut [Cplx], v: &mut [Cplx], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let beta = apq.norm();
    if beta == 0.0 {
        return;
    }
    let phase = apq / beta;
    let (app, aqq) = (a[p * n + p].re, a[q * n + q].re);
    let tau = (aqq - app) / (2.0 * beta);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let g_pp = Cplx::new(c, 0.0);
    let g_pq = Cplx::new(s, 0.0);
    let g_qp = -s * phase.conj();
    let g_qq = c * phase.conj();

    for k in 0..n {
        let (akp, akq) = (a[k * n + p], a[k * n + q]);
        a[k * n + p] = akp * g_pp + akq * g_qp;
        a[k * n + q] = akp * g_pq + akq * g_qq;
        let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
        v[k * n + p] = vkp * g_pp + vkq * g_qp;
        v[k * n + q] = vkp * g_pq + vkq * g_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[p * n + k], a[q * n + k]);
        a[p * n + k] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[q * n + k] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[p * n + q] = Cplx::new(0.0, 0.0);
    a[q * n + p] = Cplx::new(0.0, 0.0);
    a[p * n + p] = Cplx::new(a[p * n + p].re, 0.0);
    a[q * n + q] = Cplx::new(a[q * n + q].re, 0.0);
}

pub(crate) fn reconstruction_error(m: &Op, sys: &Eigensystem) -> f64 {
    m.entries()
        .iter()
        .zip(sys.reconstruct().entries())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{fidelity, projector_onto};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn sigma_z_spectrum() {
        let sys = hermitian_eigensystem(&Op::sigma_z()).unwrap();
        assert_eq!(sys.values, vec![1.0, -1.0]);
        assert!((fidelity(&sys.vectors[0], &Ket::basis(2, 0).unwrap()).unwrap() - 1.0).abs() < 1e-14);
        assert!((fidelity(&sys.vectors[1], &Ket::basis(2, 1).unwrap()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_x_spectrum() {
        let sys = hermitian_eigensystem(&Op::sigma_x()).unwrap();
        assert!((sys.values[0] - 1.0).abs() < 1e-14);
        assert!((sys.values[1] + 1.0).abs() < 1e-14);
        let plus = Ket::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let minus = Ket::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        assert!((fidelity(&sys.vectors[0], &plus).unwrap() - 1.0).abs() < 1e-14);
        assert!((fidelity(&sys.vectors[1], &minus).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projector_spectrum_is_zero_one() {
        let v = Ket::new(vec![Cplx::new(1.0, 0.5), Cplx::new(0.0, -2.0), Cplx::new(0.3, 0.0)]).unwrap();
        let sys = hermitian_eigensystem(&projector_onto(&v).unwrap()).unwrap();
        for l in sys.values {
            assert!(l.abs() < 1e-12 || (l - 1.0).abs() < 1e-12, "eigenvalue {l}");
        }
    }

    #[test]
    fn sigma_y_reconstructs() {
        let m = Op::sigma_y();
        let sys = hermitian_eigensystem(&m).unwrap();
        assert!(reconstruction_error(&m, &sys) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Op::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigensystem(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn one_dimensional() {
        let m = Op::from_real_rows(&[&[3.5]]).unwrap();
        let sys = hermitian_eigensystem(&m).unwrap();
        assert_eq!(sys.values, vec![3.5]);
    }
}
