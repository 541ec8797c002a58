use crate::algebra::{Cplx, I};
use crate::error::{Error, Result};

/// One term `c · Π_k G_σk(x_k − a_k)` of a [`GaussianSum`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTerm {
    pub coeff: Cplx,
    pub centers: Vec<f64>,
}

/// Superposition of translated Gaussian pointers, `Σᵢ cᵢ G_σ(x − aᵢ)`.
///
/// `G_σ(x) = (2πσ²)^(-1/4) exp(−x²/(4σ²))` is normalized with position
/// spread `σ`, so `⟨G_σ(· − a)|G_σ(· − b)⟩ = exp(−(a − b)²/(8σ²))`. A sum may
/// span several independent pointers (one per weak tap); each term then
/// carries one center per pointer and the overlaps multiply.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSum {
    sigmas: Vec<f64>,
    terms: Vec<GaussianTerm>,
}

impl GaussianSum {
    /// Single-pointer sum from `(coefficient, center)` pairs.
    pub fn new(sigma: f64, terms: impl IntoIterator<Item = (Cplx, f64)>) -> Result<Self> {
        Self::multi(
            vec![sigma],
            terms.into_iter().map(|(coeff, a)| GaussianTerm {
                coeff,
                centers: vec![a],
            }),
        )
    }

    pub fn multi(sigmas: Vec<f64>, terms: impl IntoIterator<Item = GaussianTerm>) -> Result<Self> {
        if sigmas.is_empty() || sigmas.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidArgument(
                "pointer widths must be finite and positive".into(),
            ));
        }
        let mut sum = Self {
            sigmas,
            terms: Vec::new(),
        };
        for t in terms {
            if t.centers.len() != sum.sigmas.len() {
                return Err(Error::DimensionMismatch {
                    context: "GaussianSum term",
                    expected: sum.sigmas.len(),
                    found: t.centers.len(),
                });
            }
            if !(t.coeff.re.is_finite() && t.coeff.im.is_finite()) || t.centers.iter().any(|a| !a.is_finite()) {
                return Err(Error::NonFinite("gaussian term"));
            }
            sum.push(t);
        }
        Ok(sum)
    }

    /// Adds a term, merging it into an existing one with identical centers.
    pub(crate) fn push(&mut self, term: GaussianTerm) {
        if let Some(t) = self.terms.iter_mut().find(|t| t.centers == term.centers) {
            t.coeff += term.coeff;
        } else {
            self.terms.push(term);
        }
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn sigma(&self) -> f64 {
        self.sigmas[0]
    }

    pub fn modes(&self) -> usize {
        self.sigmas.len()
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    /// `Σ_k (a_k − b_k)² / (8σ_k²)`, so the pairwise overlap is `exp(−d)`.
    fn overlap_exponent(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.sigmas)
            .map(|((x, y), s)| (x - y).powi(2) / (8.0 * s * s))
            .sum()
    }

    /// Squared norm in closed form.
    ///
    /// Written as `|Σ c|² + Σᵢⱼ cᵢ* cⱼ (e^{−dᵢⱼ} − 1)` so that nearly cancelling
    /// superpositions (dark ports) keep full relative precision.
    pub fn norm_sqr(&self) -> f64 {
        let total: Cplx = self.terms.iter().map(|t| t.coeff).sum();
        let mut acc = total.norm_sqr();
        for (i, ti) in self.terms.iter().enumerate() {
            for tj in &self.terms[i + 1..] {
                let d = self.overlap_exponent(&ti.centers, &tj.centers);
                acc += 2.0 * (ti.coeff.conj() * tj.coeff).re * (-d).exp_m1();
            }
        }
        acc.max(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨G_σ|self⟩` against the undisplaced pointer.
    pub fn overlap_with_origin(&self) -> Cplx {
        let origin = vec![0.0; self.modes()];
        self.terms
            .iter()
            .map(|t| t.coeff * (-self.overlap_exponent(&origin, &t.centers)).exp())
            .sum()
    }

    /// Unnormalized `⟨self|Q_k|self⟩` and `⟨self|P_k|self⟩`.
    fn moments(&self, mode: usize) -> (f64, f64) {
        let s2 = self.sigmas[mode] * self.sigmas[mode];
        let (mut q, mut p) = (0.0, 0.0);
        for ti in &self.terms {
            for tj in &self.terms {
                let o = (-self.overlap_exponent(&ti.centers, &tj.centers)).exp();
                let cc = ti.coeff.conj() * tj.coeff * o;
                let (a, b) = (ti.centers[mode], tj.centers[mode]);
                q += cc.re * 0.5 * (a + b);
                p += (cc * I).re * (a - b) / (4.0 * s2);
            }
        }
        (q, p)
    }

    /// Normalized pointer expectations `(⟨Q⟩, ⟨P⟩)` for pointer `mode`.
    pub fn readout(&self, mode: usize) -> Result<(f64, f64)> {
        if mode >= self.modes() {
            return Err(Error::InvalidArgument(format!("pointer index {mode} out of range")));
        }
        let n2 = self.norm_sqr();
        if n2 <= crate::tolerances::NULL_POSTSELECTION.powi(2) {
            return Err(Error::DegenerateState("pointer readout of a zero-norm meter state"));
        }
        let (q, p) = self.moments(mode);
        Ok((q / n2, p / n2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Cplx {
        Cplx::new(x, 0.0)
    }

    #[test]
    fn single_term_readout_is_its_center() {
        let g = GaussianSum::new(1.3, [(c(2.0), 0.7)]).unwrap();
        let (q, p) = g.readout(0).unwrap();
        assert!((q - 0.7).abs() < 1e-15);
        assert_eq!(p, 0.0);
        assert!((g.norm_sqr() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn origin_readout_is_zero() {
        let g = GaussianSum::new(1.0, [(c(1.0), 0.0)]).unwrap();
        assert_eq!(g.readout(0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn antisymmetric_pair_norm_is_accurate() {
        // ψ(x − g) − ψ(x): ‖·‖² = 2(1 − exp(−g²/8σ²)) ≈ g²/4σ².
        let g = 1e-6;
        let s = GaussianSum::new(1.0, [(c(1.0), g), (c(-1.0), 0.0)]).unwrap();
        let exact = -2.0 * (-(g * g) / 8.0f64).exp_m1();
        assert!((s.norm_sqr() - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn identical_centers_merge() {
        let s = GaussianSum::new(1.0, [(c(0.25), 0.0), (c(0.75), 0.0)]).unwrap();
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.terms()[0].coeff, c(1.0));
    }

    #[test]
    fn zero_state_cannot_be_read() {
        let s = GaussianSum::new(1.0, [(c(1.0), 0.0), (c(-1.0), 0.0)]).unwrap();
        assert!(s.readout(0).is_err());
    }

    #[test]
    fn rejects_bad_width() {
        assert!(GaussianSum::new(0.0, [(c(1.0), 0.0)]).is_err());
        assert!(GaussianSum::new(f64::NAN, [(c(1.0), 0.0)]).is_err());
    }
}
