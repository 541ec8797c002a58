use crate::algebra::{Cplx, Ket, Op, I};
use crate::error::{Error, Result};
use crate::weakmeas::MeterModel;

/// One stage of a path network.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// `[[t, i·r], [i·r, t]]` with `r = √(1 − t²)` on the `(a, b)` modes.
    BeamSplitter { a: String, b: String, t: f64 },
    /// Multiplies the amplitude on `path` by `e^{iφ}`.
    PhaseShifter { path: String, phi: f64 },
    /// Weak measurement of the projector onto `path` with its own pointer.
    WeakTap { path: String, g: f64, meter: MeterModel },
    /// Moves the amplitude on `from` to `to` (the two modes are swapped so
    /// the stage stays unitary).
    Relabel { from: String, to: String },
}

impl Element {
    pub fn beam_splitter(a: &str, b: &str, t: f64) -> Self {
        Self::BeamSplitter {
            a: a.into(),
            b: b.into(),
            t,
        }
    }

    pub fn phase(path: &str, phi: f64) -> Self {
        Self::PhaseShifter { path: path.into(), phi }
    }

    pub fn tap(path: &str, g: f64, meter: MeterModel) -> Self {
        Self::WeakTap {
            path: path.into(),
            g,
            meter,
        }
    }

    pub fn relabel(from: &str, to: &str) -> Self {
        Self::Relabel {
            from: from.into(),
            to: to.into(),
        }
    }

    /// Path labels this element touches.
    pub fn labels(&self) -> Vec<&str> {
        match self {
            Self::BeamSplitter { a, b, .. } => vec![a, b],
            Self::PhaseShifter { path, .. } | Self::WeakTap { path, .. } => vec![path],
            Self::Relabel { from, to } => vec![from, to],
        }
    }

    pub fn is_tap(&self) -> bool {
        matches!(self, Self::WeakTap { .. })
    }
}

/// A weak tap located in a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapInfo<'a> {
    pub stage: usize,
    pub path: &'a str,
    pub mode: usize,
    pub g: f64,
    pub meter: MeterModel,
}

/// Staged interferometer on a path Hilbert space with one mode per label.
#[derive(Debug, Clone, PartialEq)]
pub struct PathNetwork {
    paths: Vec<String>,
    stages: Vec<Element>,
    source: String,
    postselection: String,
}

impl PathNetwork {
    pub fn new(
        paths: Vec<String>,
        stages: Vec<Element>,
        source: impl Into<String>,
        postselection: impl Into<String>,
    ) -> Result<Self> {
        let net = Self {
            paths,
            stages,
            source: source.into(),
            postselection: postselection.into(),
        };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> Result<()> {
        if self.paths.is_empty() {
            return Err(Error::InvalidArgument("network needs at least one path".into()));
        }
        for (i, p) in self.paths.iter().enumerate() {
            if self.paths[..i].contains(p) {
                return Err(Error::InvalidArgument(format!("duplicate path label {p:?}")));
            }
        }
        self.mode(&self.source)?;
        self.mode(&self.postselection)?;
        for stage in &self.stages {
            for label in stage.labels() {
                self.mode(label)?;
            }
            match stage {
                Element::BeamSplitter { a, b, t } => {
                    if a == b {
                        return Err(Error::InvalidArgument(format!("beam splitter couples {a:?} to itself")));
                    }
                    if !(0.0..=1.0).contains(t) {
                        return Err(Error::InvalidArgument(format!("transmission {t} outside [0, 1]")));
                    }
                }
                Element::PhaseShifter { phi, .. } if !phi.is_finite() => {
                    return Err(Error::InvalidArgument("phase must be finite".into()));
                }
                Element::WeakTap { g, .. } if !(g.is_finite() && *g >= 0.0) => {
                    return Err(Error::InvalidArgument(format!("tap strength must be >= 0, got {g}")));
                }
                Element::Relabel { from, to } if from == to => {
                    return Err(Error::InvalidArgument(format!("relabel of {from:?} onto itself")));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn paths(&self) -> &[String] {
        &self.paths
    }

    pub fn stages(&self) -> &[Element] {
        &self.stages
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn postselection(&self) -> &str {
        &self.postselection
    }

    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    /// Mode index of a path label.
    pub fn mode(&self, label: &str) -> Result<usize> {
        self.paths
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn source_ket(&self) -> Ket {
        Ket::basis(self.dim(), self.mode(&self.source).expect("validated")).expect("in range")
    }

    pub fn detector_ket(&self) -> Ket {
        Ket::basis(self.dim(), self.mode(&self.postselection).expect("validated")).expect("in range")
    }

    /// The stage boundary at which `label` is probed: just after the first
    /// stage that touches it, or before any stage if none does.
    pub fn probe_point(&self, label: &str) -> Result<usize> {
        self.mode(label)?;
        Ok(self
            .stages
            .iter()
            .position(|s| s.labels().contains(&label))
            .map_or(0, |i| i + 1))
    }

    pub fn taps(&self) -> Vec<TapInfo<'_>> {
        self.stages
            .iter()
            .enumerate()
            .filter_map(|(stage, e)| match e {
                Element::WeakTap { path, g, meter } => Some(TapInfo {
                    stage,
                    path,
                    mode: self.mode(path).expect("validated"),
                    g: *g,
                    meter: *meter,
                }),
                _ => None,
            })
            .collect()
    }

    /// Copy with every tap set to strength `g`.
    pub fn with_tap_strength(&self, g: f64) -> Result<Self> {
        let mut net = self.clone();
        for s in &mut net.stages {
            if let Element::WeakTap { g: gt, .. } = s {
                *gt = g;
            }
        }
        net.validate()?;
        Ok(net)
    }

    /// Copy with tap number `index` (in declaration order) set to strength `g`.
    pub fn with_single_tap_strength(&self, index: usize, g: f64) -> Result<Self> {
        let mut net = self.clone();
        let stage = self
            .taps()
            .get(index)
            .map(|t| t.stage)
            .ok_or_else(|| Error::InvalidArgument(format!("no tap with index {index}")))?;
        if let Element::WeakTap { g: gt, .. } = &mut net.stages[stage] {
            *gt = g;
        }
        net.validate()?;
        Ok(net)
    }

    /// Copy with all taps removed.
    pub fn without_taps(&self) -> Self {
        let mut net = self.clone();
        net.stages.retain(|s| !s.is_tap());
        net
    }

    /// Inserts a tap on `path` at the path's probe point.
    pub fn with_tap(&self, path: &str, g: f64, meter: MeterModel) -> Result<Self> {
        let at = self.probe_point(path)?;
        let mut net = self.clone();
        net.stages.insert(at, Element::tap(path, g, meter));
        net.validate()?;
        Ok(net)
    }

    /// Path-space unitary of stage `i`; taps act as the identity here.
    pub fn stage_unitary(&self, i: usize) -> Op {
        let n = self.dim();
        let mut u = Op::identity(n).entries().to_vec();
        let zero = Cplx::new(0.0, 0.0);
        match &self.stages[i] {
            Element::BeamSplitter { a, b, t } => {
                let (a, b) = (self.mode(a).expect("validated"), self.mode(b).expect("validated"));
                let r = (1.0 - t * t).max(0.0).sqrt();
                u[a * n + a] = Cplx::new(*t, 0.0);
                u[b * n + b] = Cplx::new(*t, 0.0);
                u[a * n + b] = I * r;
                u[b * n + a] = I * r;
            }
            Element::PhaseShifter { path, phi } => {
                let k = self.mode(path).expect("validated");
                u[k * n + k] = Cplx::from_polar(1.0, *phi);
            }
            Element::Relabel { from, to } => {
                let (f, t) = (self.mode(from).expect("validated"), self.mode(to).expect("validated"));
                u[f * n + f] = zero;
                u[t * n + t] = zero;
                u[t * n + f] = Cplx::new(1.0, 0.0);
                u[f * n + t] = Cplx::new(1.0, 0.0);
            }
            Element::WeakTap { .. } => {}
        }
        Op::new(n, u).expect("finite entries")
    }

    /// Product of all stage unitaries (taps at `g = 0`).
    pub fn path_unitary(&self) -> Op {
        (0..self.stages.len()).fold(Op::identity(self.dim()), |acc, i| self.stage_unitary(i).matmul(&acc))
    }
}
