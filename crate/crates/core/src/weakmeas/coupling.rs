use super::gaussian::{GaussianSum, GaussianTerm};
use super::meter::MeterModel;
use crate::algebra::check_dims;
use crate::algebra::{apply, hermitian_eigensystem, inner, projector_onto, tensor_ket, Cplx, JointKet, Ket, Op, I};
use crate::error::{Error, Result};
use crate::tolerances;

/// Spectral decomposition `S = Σ λ Π_λ` used to drive the coupling.
#[derive(Debug, Clone)]
pub struct Spectrum {
    parts: Vec<(f64, Op)>,
}

impl Spectrum {
    /// Diagonalizes a hermitian observable.
    pub fn of(s: &Op) -> Result<Self> {
        let eig = hermitian_eigensystem(s)?;
        let parts = eig
            .values
            .into_iter()
            .zip(eig.vectors)
            .map(|(l, v)| Ok((l, projector_onto(&v)?)))
            .collect::<Result<_>>()?;
        Ok(Self { parts })
    }

    /// Projector onto basis state `k`, split as `1·Π_k + 0·(I − Π_k)` without
    /// an eigensolve so the branches are exact.
    pub fn basis_projector(dim: usize, k: usize) -> Result<Self> {
        let pk = projector_onto(&Ket::basis(dim, k)?)?;
        let rest = Op::identity(dim).sub(&pk)?;
        Ok(Self {
            parts: vec![(1.0, pk), (0.0, rest)],
        })
    }

    pub fn dim(&self) -> usize {
        self.parts[0].1.dim()
    }

    pub fn parts(&self) -> &[(f64, Op)] {
        &self.parts
    }
}

/// One branch `|v⟩ ⊗ Π_k G_σk(x_k − a_k)` of a [`BranchJoint`].
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub system: Ket,
    pub centers: Vec<f64>,
}

/// Joint state with analytic Gaussian pointers: `Σᵢ |vᵢ⟩ ⊗ G(x − aᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchJoint {
    sys_dim: usize,
    sigmas: Vec<f64>,
    branches: Vec<Branch>,
}

impl BranchJoint {
    /// `|in⟩ ⊗ Π_k G_σk` with every pointer at the origin.
    pub fn product(system: Ket, sigmas: Vec<f64>) -> Self {
        let centers = vec![0.0; sigmas.len()];
        Self {
            sys_dim: system.dim(),
            sigmas,
            branches: vec![Branch { system, centers }],
        }
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    fn exponent(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.sigmas)
            .map(|((x, y), s)| (x - y).powi(2) / (8.0 * s * s))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        let mut total = vec![Cplx::new(0.0, 0.0); self.sys_dim];
        for b in &self.branches {
            for (t, a) in total.iter_mut().zip(b.system.amps()) {
                *t += a;
            }
        }
        let mut acc: f64 = total.iter().map(|z| z.norm_sqr()).sum();
        for (i, bi) in self.branches.iter().enumerate() {
            for bj in &self.branches[i + 1..] {
                let d = self.exponent(&bi.centers, &bj.centers);
                let ov = inner(&bi.system, &bj.system).expect("equal dims");
                acc += 2.0 * ov.re * (-d).exp_m1();
            }
        }
        acc.max(0.0).sqrt()
    }

    fn push(&mut self, branch: Branch) {
        if let Some(b) = self.branches.iter_mut().find(|b| b.centers == branch.centers) {
            b.system = b
                .system
                .add_scaled(Cplx::new(1.0, 0.0), &branch.system)
                .expect("equal dims");
        } else {
            self.branches.push(branch);
        }
    }

    pub fn apply_system(&mut self, u: &Op) -> Result<()> {
        check_dims("BranchJoint::apply_system", self.sys_dim, u.dim())?;
        for b in &mut self.branches {
            b.system = apply(u, &b.system)?;
        }
        Ok(())
    }

    /// Applies `exp(−i g S ⊗ P_meter)`.
    pub fn couple(&mut self, spectrum: &Spectrum, g: f64, meter: usize) -> Result<()> {
        check_dims("BranchJoint::couple", self.sys_dim, spectrum.dim())?;
        if meter >= self.sigmas.len() {
            return Err(Error::InvalidArgument(format!("no pointer with index {meter}")));
        }
        if g == 0.0 {
            return Ok(());
        }
        let old = std::mem::take(&mut self.branches);
        for b in old {
            for (lambda, proj) in spectrum.parts() {
                let system = apply(proj, &b.system)?;
                if system.amps().iter().all(|z| *z == Cplx::new(0.0, 0.0)) {
                    continue;
                }
                let mut centers = b.centers.clone();
                centers[meter] += g * lambda;
                self.push(Branch { system, centers });
            }
        }
        Ok(())
    }

    /// Partial inner product `⟨fin|_sys · |joint⟩` as a Gaussian sum.
    pub fn project_system(&self, fin: &Ket) -> Result<GaussianSum> {
        check_dims("BranchJoint::project_system", self.sys_dim, fin.dim())?;
        let terms = self
            .branches
            .iter()
            .map(|b| {
                Ok(GaussianTerm {
                    coeff: inner(fin, &b.system)?,
                    centers: b.centers.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GaussianSum::multi(self.sigmas.clone(), terms)
    }
}

/// Joint state with grid pointers, stored `[system, meter₀, meter₁, …]`
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridJoint {
    sys_dim: usize,
    meters: Vec<MeterModel>,
    amps: Vec<Cplx>,
}

impl GridJoint {
    pub fn product(system: &Ket, meters: Vec<MeterModel>) -> Result<Self> {
        let mut state = system.clone();
        let mut joint: Vec<Cplx> = state.amps().to_vec();
        for m in &meters {
            let ket = m
                .initial_grid_ket()
                .ok_or_else(|| Error::InvalidArgument("grid joint requires grid meters".into()))?;
            state = Ket::from_vec_unchecked(joint);
            joint = tensor_ket(&state, &ket).amps().to_vec();
        }
        Ok(Self {
            sys_dim: system.dim(),
            meters,
            amps: joint,
        })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn meters(&self) -> &[MeterModel] {
        &self.meters
    }

    pub fn amps(&self) -> &[Cplx] {
        &self.amps
    }

    fn dims(&self) -> Vec<usize> {
        std::iter::once(self.sys_dim)
            .chain(self.meters.iter().map(MeterModel::dim))
            .collect()
    }

    pub fn meter_dim(&self) -> usize {
        self.amps.len() / self.sys_dim
    }

    pub fn to_joint_ket(&self) -> JointKet {
        JointKet::from_vec_unchecked(self.sys_dim, self.meter_dim(), self.amps.clone())
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn system_map(&self, u: &Op) -> Vec<Cplx> {
        let md = self.meter_dim();
        let mut out = vec![Cplx::new(0.0, 0.0); self.amps.len()];
        for s in 0..self.sys_dim {
            for t in 0..self.sys_dim {
                let c = u.get(s, t);
                if c == Cplx::new(0.0, 0.0) {
                    continue;
                }
                let src = &self.amps[t * md..(t + 1) * md];
                for (o, a) in out[s * md..(s + 1) * md].iter_mut().zip(src) {
                    *o += c * a;
                }
            }
        }
        out
    }

    pub fn apply_system(&mut self, u: &Op) -> Result<()> {
        check_dims("GridJoint::apply_system", self.sys_dim, u.dim())?;
        self.amps = self.system_map(u);
        Ok(())
    }

    /// Applies `exp(−i g S ⊗ P_meter)` by translating each spectral branch.
    pub fn couple(&mut self, spectrum: &Spectrum, g: f64, meter: usize) -> Result<()> {
        check_dims("GridJoint::couple", self.sys_dim, spectrum.dim())?;
        let grid = self
            .meters
            .get(meter)
            .and_then(MeterModel::grid_spec)
            .ok_or_else(|| Error::InvalidArgument(format!("no grid pointer with index {meter}")))?;
        if g == 0.0 {
            return Ok(());
        }
        let dims = self.dims();
        let mut out = vec![Cplx::new(0.0, 0.0); self.amps.len()];
        for (lambda, proj) in spectrum.parts() {
            let mut part = self.system_map(proj);
            grid.translate(&mut part, &dims, meter + 1, g * lambda);
            for (o, p) in out.iter_mut().zip(&part) {
                *o += p;
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Applies the truncated coupling `1 − i g S ⊗ P_meter`.
    pub fn couple_first_order(&mut self, s: &Op, g: f64, meter: usize) -> Result<()> {
        check_dims("GridJoint::couple_first_order", self.sys_dim, s.dim())?;
        let grid = self
            .meters
            .get(meter)
            .and_then(MeterModel::grid_spec)
            .ok_or_else(|| Error::InvalidArgument(format!("no grid pointer with index {meter}")))?;
        let dims = self.dims();
        let mut kick = self.system_map(s);
        grid.momentum_multiply(&mut kick, &dims, meter + 1, |p| Cplx::new(p, 0.0));
        for (a, k) in self.amps.iter_mut().zip(&kick) {
            *a -= I * g * k;
        }
        Ok(())
    }

    /// Partial inner product `⟨fin|_sys · |joint⟩` over the meters.
    pub fn project_system(&self, fin: &Ket) -> Result<Vec<Cplx>> {
        Ok(self.to_joint_ket().project_system(fin)?.into_amps())
    }
}

/// Joint system ⊗ pointer state in either meter backend.
#[derive(Debug, Clone, PartialEq)]
pub enum CoupledJoint {
    Grid(GridJoint),
    Branches(BranchJoint),
}

impl CoupledJoint {
    /// `|in⟩ ⊗ |m⟩…` for the given meters, which must share one backend.
    pub fn product(system: &Ket, meters: &[MeterModel]) -> Result<Self> {
        if meters.iter().all(MeterModel::is_grid) && !meters.is_empty() {
            Ok(Self::Grid(GridJoint::product(system, meters.to_vec())?))
        } else if meters.iter().all(|m| !m.is_grid()) {
            Ok(Self::Branches(BranchJoint::product(
                system.clone(),
                meters.iter().map(|m| m.sigma).collect(),
            )))
        } else {
            Err(Error::InvalidArgument(
                "all meters of one joint state must use the same backend".into(),
            ))
        }
    }

    pub fn sys_dim(&self) -> usize {
        match self {
            Self::Grid(j) => j.sys_dim(),
            Self::Branches(j) => j.sys_dim(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Self::Grid(j) => j.norm(),
            Self::Branches(j) => j.norm(),
        }
    }

    pub fn apply_system(&mut self, u: &Op) -> Result<()> {
        match self {
            Self::Grid(j) => j.apply_system(u),
            Self::Branches(j) => j.apply_system(u),
        }
    }

    pub fn couple(&mut self, spectrum: &Spectrum, g: f64, meter: usize) -> Result<()> {
        match self {
            Self::Grid(j) => j.couple(spectrum, g, meter),
            Self::Branches(j) => j.couple(spectrum, g, meter),
        }
    }

    /// Unnormalized meter state `⟨fin|joint⟩`; never fails on a null result.
    pub fn project_system(&self, fin: &Ket) -> Result<MeterState> {
        match self {
            Self::Grid(j) => Ok(MeterState::Grid {
                amps: j.project_system(fin)?,
                meters: j.meters().to_vec(),
            }),
            Self::Branches(j) => Ok(MeterState::Analytic(j.project_system(fin)?)),
        }
    }
}

/// Unnormalized pointer state left after postselection.
#[derive(Debug, Clone, PartialEq)]
pub enum MeterState {
    Grid { amps: Vec<Cplx>, meters: Vec<MeterModel> },
    Analytic(GaussianSum),
}

impl MeterState {
    pub fn norm(&self) -> f64 {
        match self {
            Self::Grid { amps, .. } => amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            Self::Analytic(g) => g.norm(),
        }
    }

    pub fn pointers(&self) -> usize {
        match self {
            Self::Grid { meters, .. } => meters.len(),
            Self::Analytic(g) => g.modes(),
        }
    }

    /// Overlap with the undisplaced initial pointer(s).
    pub fn overlap_with_initial(&self) -> Cplx {
        match self {
            Self::Grid { amps, meters } => {
                let mut init: Vec<Cplx> = vec![Cplx::new(1.0, 0.0)];
                for m in meters {
                    let k = m.initial_grid_ket().expect("grid meter");
                    init = tensor_ket(&Ket::from_vec_unchecked(init), &k).amps().to_vec();
                }
                init.iter().zip(amps).map(|(a, b)| a.conj() * b).sum()
            }
            Self::Analytic(g) => g.overlap_with_origin(),
        }
    }

    /// Normalized `(⟨Q⟩, ⟨P⟩)` of pointer `mode`.
    pub fn readout(&self, mode: usize) -> Result<(f64, f64)> {
        match self {
            Self::Analytic(g) => g.readout(mode),
            Self::Grid { amps, meters } => {
                let grid = meters
                    .get(mode)
                    .and_then(MeterModel::grid_spec)
                    .ok_or_else(|| Error::InvalidArgument(format!("pointer index {mode} out of range")))?;
                let dims: Vec<usize> = meters.iter().map(MeterModel::dim).collect();
                let (q, p, n) = grid.moments(amps, &dims, mode);
                if n <= tolerances::NULL_POSTSELECTION.powi(2) {
                    return Err(Error::DegenerateState("pointer readout of a zero-norm meter state"));
                }
                Ok((q / n, p / n))
            }
        }
    }
}

/// Exact coupling `exp(−i g S ⊗ P_M) |in⟩ ⊗ |m⟩`.
///
/// Each eigenbranch `λ` of `S` carries the pointer translated by `g·λ`.
pub fn exact_coupled_joint(input: &Ket, meter: &MeterModel, s: &Op, g: f64) -> Result<CoupledJoint> {
    check_coupling_args(input, s, g)?;
    let spectrum = Spectrum::of(s)?;
    let mut joint = CoupledJoint::product(input, std::slice::from_ref(meter))?;
    joint.couple(&spectrum, g, 0)?;
    Ok(joint)
}

/// First-order expansion `|in⟩⊗|m⟩ − i g (S|in⟩) ⊗ (P_M|m⟩)` on a grid meter.
/// Not normalized.
pub fn first_order_joint(input: &Ket, meter: &MeterModel, s: &Op, g: f64) -> Result<JointKet> {
    check_coupling_args(input, s, g)?;
    if !meter.is_grid() {
        return Err(Error::InvalidArgument(
            "first-order joint state is materialized on grid meters only".into(),
        ));
    }
    let mut joint = GridJoint::product(input, vec![*meter])?;
    joint.couple_first_order(s, g, 0)?;
    Ok(joint.to_joint_ket())
}

fn check_coupling_args(input: &Ket, s: &Op, g: f64) -> Result<()> {
    check_dims("coupling", s.dim(), input.dim())?;
    s.require_hermitian()?;
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "coupling strength must be >= 0, got {g}"
        )));
    }
    Ok(())
}

/// Result of conditioning the joint state on a system outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Postselected {
    /// Unnormalized `⟨fin|joint⟩` with `fin` normalized.
    pub meter: MeterState,
    pub norm: f64,
    /// `‖⟨fin|joint⟩‖² / ‖joint‖²`.
    pub success_probability: f64,
    /// Overlap of the postselected pointer with the undisplaced pointer.
    pub success_amplitude: Cplx,
}

pub fn postselect(joint: &CoupledJoint, fin: &Ket) -> Result<Postselected> {
    let fin = fin.normalized()?;
    let meter = joint.project_system(&fin)?;
    let norm = meter.norm();
    if norm <= tolerances::NULL_POSTSELECTION {
        return Err(Error::NullPostselection { norm });
    }
    let total = joint.norm();
    Ok(Postselected {
        success_probability: (norm / total).powi(2),
        success_amplitude: meter.overlap_with_initial(),
        norm,
        meter,
    })
}

/// Normalized pointer expectations `(⟨Q⟩, ⟨P⟩)` of the first pointer.
pub fn pointer_readout(meter: &MeterState) -> Result<(f64, f64)> {
    meter.readout(0)
}
