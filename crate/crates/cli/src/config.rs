//! Case description files.

use gashell::field::{Basis, Term, VectorField};
use gashell::linearized::{CylinderCase, PerturbedMotion};
use gashell::motion::{Motion, Rigid};
use gashell::stress::Material;
use gashell::surface::{Chart, DiffPolicy, Domain};
use gashell::ShellError;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "gashell-case/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub schema: String,
    pub chart: ChartSpec,
    pub motion: MotionSpec,
    #[serde(default)]
    pub material: MaterialSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub time: f64,
    #[serde(default)]
    pub differentiation: DiffSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub body_force: BodyForceSpec,
    /// Upper components `c^{(1,3)}, c^{(2,3)}`.
    #[serde(default)]
    pub body_moment: [f64; 2],
    pub outputs: Vec<Output>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisSpec {
    #[default]
    Ambient,
    Frame,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub component: usize,
    #[serde(default)]
    pub basis: BasisSpec,
    pub coeff: f64,
    #[serde(default)]
    pub powers: [u32; 3],
    #[serde(default)]
    pub freq: [f64; 3],
    #[serde(default)]
    pub phase: f64,
}

impl TermSpec {
    fn to_term(&self) -> Result<Term, ShellError> {
        if self.component > 2 {
            return Err(invalid(format!("term component must be 0, 1 or 2, got {}", self.component)));
        }
        let finite = self.coeff.is_finite() && self.phase.is_finite() && self.freq.iter().all(|f| f.is_finite());
        if !finite {
            return Err(invalid("term coefficients must be finite".into()));
        }
        let basis = match self.basis {
            BasisSpec::Ambient => Basis::Ambient,
            BasisSpec::Frame => Basis::Frame,
        };
        Ok(Term { component: self.component, basis, coeff: self.coeff, powers: self.powers, freq: self.freq, phase: self.phase })
    }
}

pub fn field(terms: &[TermSpec]) -> Result<VectorField, ShellError> {
    Ok(VectorField::new(terms.iter().map(TermSpec::to_term).collect::<Result<_, _>>()?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChartSpec {
    Plane,
    Cylinder { radius: f64 },
    Sphere { radius: f64 },
    Parametric { terms: Vec<TermSpec>, lo: [f64; 2], hi: [f64; 2] },
}

impl ChartSpec {
    pub fn build(&self) -> Result<Chart, ShellError> {
        match self {
            ChartSpec::Plane => Ok(Chart::Plane),
            ChartSpec::Cylinder { radius } => Chart::cylinder(*radius),
            ChartSpec::Sphere { radius } => Chart::sphere(*radius),
            ChartSpec::Parametric { terms, lo, hi } => {
                if terms.iter().any(|t| t.basis == BasisSpec::Frame) {
                    return Err(invalid("parametric chart terms must use the ambient basis".into()));
                }
                let terms = terms.iter().map(TermSpec::to_term).collect::<Result<_, _>>()?;
                Chart::parametric(terms, Domain { lo: *lo, hi: *hi })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidSpec {
    pub axis: [f64; 3],
    #[serde(default)]
    pub rate: f64,
    #[serde(default)]
    pub angle: f64,
    #[serde(default)]
    pub velocity: [f64; 3],
    #[serde(default)]
    pub offset: [f64; 3],
}

impl RigidSpec {
    fn build(&self) -> Result<Rigid, ShellError> {
        Rigid::new(self.axis, self.rate, self.angle, self.velocity, self.offset)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionSpec {
    Identity,
    Rigid(RigidSpec),
    UniaxialStrain {
        strain: f64,
        #[serde(default)]
        rate: f64,
    },
    Inflation {
        delta: f64,
        #[serde(default)]
        rate: f64,
    },
    Displacement {
        terms: Vec<TermSpec>,
    },
    Superposed {
        rigid: RigidSpec,
        base: Box<MotionSpec>,
    },
    /// `U0 + eps U'`.
    Perturbed {
        background: Vec<TermSpec>,
        perturbation: Vec<TermSpec>,
        eps: f64,
    },
    /// Axial pre-strain of a cylinder plus `eps U'`, `U'` in frame components.
    CylinderPrestrain {
        strain: f64,
        perturbation: Vec<TermSpec>,
        #[serde(default)]
        eps: f64,
    },
}

impl MotionSpec {
    pub fn build(&self) -> Result<Motion, ShellError> {
        Ok(match self {
            MotionSpec::Identity => Motion::Identity,
            MotionSpec::Rigid(r) => Motion::Rigid(r.build()?),
            MotionSpec::UniaxialStrain { strain, rate } => Motion::UniaxialStrain { strain: *strain, rate: *rate },
            MotionSpec::Inflation { delta, rate } => Motion::Inflation { delta: *delta, rate: *rate },
            MotionSpec::Displacement { terms } => Motion::Displacement(field(terms)?),
            MotionSpec::Superposed { rigid, base } => {
                Motion::Superposed { rigid: rigid.build()?, base: Box::new(base.build()?) }
            }
            MotionSpec::Perturbed { eps, .. } | MotionSpec::CylinderPrestrain { eps, .. } => {
                self.perturbed()?.map(|pm| pm.motion(*eps)).unwrap_or(Motion::Identity)
            }
        })
    }

    pub fn perturbed(&self) -> Result<Option<PerturbedMotion>, ShellError> {
        match self {
            MotionSpec::Perturbed { background, perturbation, .. } => {
                Ok(Some(PerturbedMotion::new(field(background)?, field(perturbation)?)))
            }
            MotionSpec::CylinderPrestrain { strain, perturbation, .. } => {
                // radius and material do not enter the motion
                let case = CylinderCase {
                    radius: 1.0,
                    strain: *strain,
                    material: Material::new(1.0, 0.0, 1.0, 1.0)?,
                    perturbation: field(perturbation)?,
                };
                Ok(Some(case.perturbed_motion()))
            }
            _ => Ok(None),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub young: f64,
    pub poisson: f64,
    pub thickness: f64,
    pub density: f64,
}

impl Default for MaterialSpec {
    fn default() -> Self {
        MaterialSpec { young: 1.0, poisson: 0.3, thickness: 0.1, density: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x1: [f64; 2],
    pub x2: [f64; 2],
    pub n1: usize,
    pub n2: usize,
}

impl GridSpec {
    /// `(i, j, [X1, X2])` in row-major order.
    pub fn points(&self) -> Vec<(usize, usize, [f64; 2])> {
        let at = |r: [f64; 2], n: usize, k: usize| r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64;
        (0..self.n1)
            .flat_map(|i| (0..self.n2).map(move |j| (i, j, [at(self.x1, self.n1, i), at(self.x2, self.n2, j)])))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffMode {
    #[default]
    Exact,
    Central,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffSpec {
    #[serde(default)]
    pub mode: DiffMode,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_h2")]
    pub h2: f64,
    /// Time step for central-difference velocities.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Central time step of the energy and mass rates.
    #[serde(default = "default_rate_dt")]
    pub rate_dt: f64,
    /// Divergence stencil: `exact` or `central`.
    #[serde(default)]
    pub divergence: DiffMode,
    #[serde(default = "default_stencil")]
    pub stencil: f64,
}

fn default_h() -> f64 {
    DiffPolicy::DEFAULT_H
}
fn default_h2() -> f64 {
    DiffPolicy::DEFAULT_H2
}
fn default_dt() -> f64 {
    1e-5
}
fn default_rate_dt() -> f64 {
    1e-4
}
fn default_stencil() -> f64 {
    gashell::balance::Divergence::DEFAULT_H
}

impl Default for DiffSpec {
    fn default() -> Self {
        DiffSpec {
            mode: DiffMode::Exact,
            h: default_h(),
            h2: default_h2(),
            dt: default_dt(),
            rate_dt: default_rate_dt(),
            divergence: DiffMode::Exact,
            stencil: default_stencil(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub momentum: f64,
    pub angular: f64,
    pub energy: f64,
    pub mass: f64,
    pub cylinder: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { momentum: 1e-6, angular: 1e-10, energy: 1e-6, mass: 1e-6, cylinder: 1e-8 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyForceSpec {
    #[default]
    Zero,
    Manufactured,
    Constant([f64; 3]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Output {
    G,
    B,
    #[serde(rename = "curvatures")]
    Curvatures,
    #[serde(rename = "detF")]
    DetF,
    #[serde(rename = "stretches")]
    Stretches,
    E,
    H,
    Edot,
    Hdot,
    #[serde(rename = "omega")]
    Omega,
    Stilde,
    N,
    S,
    #[serde(rename = "energy")]
    Energy,
    #[serde(rename = "momentum")]
    Momentum,
    #[serde(rename = "angular")]
    Angular,
    #[serde(rename = "energy_balance")]
    EnergyBalance,
    #[serde(rename = "mass")]
    Mass,
    #[serde(rename = "linearized")]
    Linearized,
    #[serde(rename = "cylinder")]
    Cylinder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

fn invalid(msg: String) -> ShellError {
    ShellError::InvalidInput(msg)
}

/// A validated case ready for evaluation.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub config: CaseConfig,
    pub chart: Chart,
    pub motion: Motion,
    pub material: Material,
    pub perturbed: Option<PerturbedMotion>,
    pub cylinder: Option<CylinderCase>,
}

impl CaseConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn prepare(&self) -> Result<Prepared, ShellError> {
        if self.schema != SCHEMA {
            return Err(invalid(format!("unsupported schema `{}`; expected `{SCHEMA}`", self.schema)));
        }
        let g = &self.grid;
        if g.n1 < 2 || g.n2 < 2 {
            return Err(invalid(format!("grid needs at least 2 points per axis, got {}x{}", g.n1, g.n2)));
        }
        if !g.x1.iter().chain(&g.x2).all(|x| x.is_finite()) {
            return Err(invalid("grid ranges must be finite".into()));
        }
        let t = &self.tolerances;
        if ![t.momentum, t.angular, t.energy, t.mass, t.cylinder].iter().all(|x| x.is_finite() && *x > 0.0) {
            return Err(invalid("tolerances must be positive".into()));
        }
        let d = &self.differentiation;
        if ![d.h, d.h2, d.dt, d.rate_dt, d.stencil].iter().all(|x| x.is_finite() && *x > 0.0) {
            return Err(invalid("differentiation steps must be positive".into()));
        }
        if self.outputs.is_empty() {
            return Err(invalid("no outputs requested".into()));
        }
        let m = &self.material;
        let material = Material::new(m.young, m.poisson, m.thickness, m.density)?;
        let chart = self.chart.build()?;
        let motion = self.motion.build()?;
        let perturbed = self.motion.perturbed()?;
        if self.outputs.contains(&Output::Linearized) && perturbed.is_none() {
            return Err(invalid("output `linearized` needs a `perturbed` or `cylinder_prestrain` motion".into()));
        }
        let cylinder = match (&self.motion, &chart) {
            (MotionSpec::CylinderPrestrain { strain, perturbation, .. }, Chart::Cylinder { radius }) => {
                Some(CylinderCase { radius: *radius, strain: *strain, material, perturbation: field(perturbation)? })
            }
            (MotionSpec::CylinderPrestrain { .. }, _) => {
                return Err(invalid("motion `cylinder_prestrain` needs a cylinder chart".into()))
            }
            _ => None,
        };
        if self.outputs.contains(&Output::Cylinder) && cylinder.is_none() {
            return Err(invalid("output `cylinder` needs a `cylinder_prestrain` motion".into()));
        }
        Ok(Prepared { config: self.clone(), chart, motion, material, perturbed, cylinder })
    }

    pub fn diff_policy(&self) -> DiffPolicy {
        match self.differentiation.mode {
            DiffMode::Exact => DiffPolicy::Exact,
            DiffMode::Central => DiffPolicy::Central { h: self.differentiation.h, h2: self.differentiation.h2 },
        }
    }
}
