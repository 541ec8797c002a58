use std::f64::consts::PI;

use rustfft::FftPlanner;

use super::gaussian::GaussianSum;
use crate::algebra::{Cplx, Ket};
use crate::error::{Error, Result};
use crate::tolerances;

/// Half-width of the default grid in units of σ.
pub const DEFAULT_GRID_HALF_WIDTH: f64 = 9.0;

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 257;

/// Geometry of a discretized pointer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub points: usize,
    pub spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeterKind {
    /// Closed-form Gaussian pointer tracked as a [`GaussianSum`].
    AnalyticGaussian,
    /// Gaussian sampled on a symmetric grid; `P_M` is the exact translation
    /// generator, diagonal in the discrete Fourier basis.
    Grid(Grid),
}

/// Pointer model: a Gaussian of position spread `σ` centered at `⟨Q⟩ = ⟨P⟩ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterModel {
    pub sigma: f64,
    pub kind: MeterKind,
}

impl MeterModel {
    pub fn analytic(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self {
            sigma,
            kind: MeterKind::AnalyticGaussian,
        })
    }

    /// Grid meter with `points` samples spaced by `spacing`.
    ///
    /// Rejects even point counts and grids whose edge amplitude reaches
    /// [`tolerances::GRID_BOUNDARY`].
    pub fn grid(sigma: f64, points: usize, spacing: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "grid point count must be odd and at least 3, got {points}"
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidArgument("grid spacing must be positive".into()));
        }
        let meter = Self {
            sigma,
            kind: MeterKind::Grid(Grid { points, spacing }),
        };
        let m = meter.initial_grid_ket().expect("grid kind");
        let edge = m.amps()[0].norm().max(m.amps()[points - 1].norm());
        if edge >= tolerances::GRID_BOUNDARY {
            return Err(Error::InvalidArgument(format!(
                "grid too narrow: edge amplitude {edge:e} must be below {:e}",
                tolerances::GRID_BOUNDARY
            )));
        }
        Ok(meter)
    }

    /// [`DEFAULT_GRID_POINTS`] points spanning `±DEFAULT_GRID_HALF_WIDTH · σ`.
    pub fn grid_default(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        let half = (DEFAULT_GRID_POINTS - 1) / 2;
        Self::grid(
            sigma,
            DEFAULT_GRID_POINTS,
            DEFAULT_GRID_HALF_WIDTH * sigma / half as f64,
        )
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.kind, MeterKind::Grid(_))
    }

    pub fn grid_spec(&self) -> Option<Grid> {
        match self.kind {
            MeterKind::Grid(g) => Some(g),
            MeterKind::AnalyticGaussian => None,
        }
    }

    /// Number of amplitudes the meter contributes to a joint state.
    pub fn dim(&self) -> usize {
        self.grid_spec().map_or(1, |g| g.points)
    }

    /// Initial pointer as a single-term Gaussian sum.
    pub fn initial_gaussian(&self) -> GaussianSum {
        GaussianSum::new(self.sigma, [(Cplx::new(1.0, 0.0), 0.0)]).expect("validated sigma")
    }

    /// Sampled initial pointer, normalized on the grid. `None` for analytic meters.
    pub fn initial_grid_ket(&self) -> Option<Ket> {
        let grid = self.grid_spec()?;
        let s2 = self.sigma * self.sigma;
        let mut amps: Vec<Cplx> = grid
            .positions()
            .map(|x| Cplx::new((-x * x / (4.0 * s2)).exp(), 0.0))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        Some(Ket::from_vec_unchecked(amps))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "meter width must be positive, got {sigma}"
        )))
    }
}

impl Grid {
    fn half(&self) -> usize {
        (self.points - 1) / 2
    }

    /// `x_k = (k − (N−1)/2) · dx`.
    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        let half = self.half() as f64;
        (0..self.points).map(move |k| (k as f64 - half) * self.spacing)
    }

    /// Momentum of each discrete Fourier mode in FFT output order.
    pub fn momenta(&self) -> Vec<f64> {
        let n = self.points;
        let half = self.half();
        let dp = 2.0 * PI / (n as f64 * self.spacing);
        (0..n)
            .map(|j| {
                let signed = if j <= half { j as f64 } else { j as f64 - n as f64 };
                signed * dp
            })
            .collect()
    }

    /// Multiplies every length-`points` fiber along `axis` of `buf` by
    /// `phase(p)` in momentum space.
    ///
    /// `buf` is a row-major array whose trailing dimensions are `dims`; any
    /// leading system index is folded into the outer loop.
    pub(crate) fn momentum_multiply(
        &self,
        buf: &mut [Cplx],
        dims: &[usize],
        axis: usize,
        multiplier: impl Fn(f64) -> Cplx,
    ) {
        let n = self.points;
        debug_assert_eq!(dims[axis], n);
        let inner: usize = dims[axis + 1..].iter().product();
        let block = n * inner;
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let factors: Vec<Cplx> = self.momenta().into_iter().map(|p| multiplier(p) / n as f64).collect();
        let mut fiber = vec![Cplx::new(0.0, 0.0); n];
        for outer in 0..buf.len() / block {
            for r in 0..inner {
                let base = outer * block + r;
                for (k, f) in fiber.iter_mut().enumerate() {
                    *f = buf[base + k * inner];
                }
                fwd.process(&mut fiber);
                for (f, m) in fiber.iter_mut().zip(&factors) {
                    *f *= m;
                }
                inv.process(&mut fiber);
                for (k, f) in fiber.iter().enumerate() {
                    buf[base + k * inner] = *f;
                }
            }
        }
    }

    /// `exp(−i a P)`: translates every fiber along `axis` by `a`.
    pub(crate) fn translate(&self, buf: &mut [Cplx], dims: &[usize], axis: usize, a: f64) {
        if a == 0.0 {
            return;
        }
        self.momentum_multiply(buf, dims, axis, |p| Cplx::from_polar(1.0, -p * a));
    }

    /// Unnormalized `(⟨Q⟩, ⟨P⟩, ‖·‖²)` of the marginal along `axis`.
    pub(crate) fn moments(&self, buf: &[Cplx], dims: &[usize], axis: usize) -> (f64, f64, f64) {
        let n = self.points;
        let inner: usize = dims[axis + 1..].iter().product();
        let block = n * inner;
        let xs: Vec<f64> = self.positions().collect();
        let ps = self.momenta();
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(n);
        let mut fiber = vec![Cplx::new(0.0, 0.0); n];
        let (mut q, mut p, mut norm) = (0.0, 0.0, 0.0);
        for outer in 0..buf.len() / block {
            for r in 0..inner {
                let base = outer * block + r;
                for (k, f) in fiber.iter_mut().enumerate() {
                    *f = buf[base + k * inner];
                    let w = f.norm_sqr();
                    norm += w;
                    q += w * xs[k];
                }
                fwd.process(&mut fiber);
                p += fiber.iter().zip(&ps).map(|(f, pj)| f.norm_sqr() * pj).sum::<f64>() / n as f64;
            }
        }
        (q, p, norm)
    }
}
