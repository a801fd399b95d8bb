//! Pointwise residuals of the local balance laws.

use crate::autodiff::Jet;
use crate::error::{Result, ShellError};
use crate::ga3::{wedge_vectors, Multivector, Vec3};
use crate::kinematics::{motion_partials, Deformation, KinematicOptions, KinematicState};
use crate::motion::Motion;
use crate::stress::{Material, StressPoint};
use crate::surface::{Chart, DiffPolicy, SurfaceFrame};

/// Tensor components `X^{ai}` with their coordinate derivatives
/// `grad[k][a][i] = ∂_k X^{ai}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentGrad<const N: usize> {
    pub value: [[f64; 2]; N],
    pub grad: [[[f64; 2]; N]; 2],
}

/// `T^{ai}_{|i} e_a` from the components `T^{ai}` over the spatial frame.
pub fn divergence_vector(t: &ComponentGrad<3>, spatial: &SurfaceFrame, reference: &SurfaceFrame) -> Vec3 {
    let mut out = Vec3::zero();
    for a in 0..3 {
        let mut s = 0.0;
        for i in 0..2 {
            s += t.grad[i][a][i];
            for b in 0..3 {
                s += t.value[b][i] * spatial.christoffel[i][a][b];
            }
            for j in 0..2 {
                s += t.value[a][j] * reference.christoffel[i][i][j];
            }
        }
        out = out + spatial.e[a].scale(s);
    }
    out
}

/// Divergence of a couple-stress field from its components `M^{Ii}` over
/// the lower bivector basis, `I` running over (1,3), (2,3).
pub fn divergence_bivector(m: &ComponentGrad<2>, spatial: &SurfaceFrame, reference: &SurfaceFrame) -> Multivector {
    let gamma = spatial.bivector_christoffels();
    let basis = spatial.bivector_basis();
    let mut c = [0.0; 3];
    for big_i in 0..2 {
        let mut s = 0.0;
        for i in 0..2 {
            s += m.grad[i][big_i][i];
            for big_j in 0..2 {
                s += m.value[big_j][i] * gamma[i][big_i][big_j];
            }
            for j in 0..2 {
                s += m.value[big_i][j] * reference.christoffel[i][i][j];
            }
        }
        c[big_i] = s;
    }
    for i in 0..2 {
        for big_j in 0..2 {
            c[2] += m.value[big_j][i] * gamma[i][2][big_j];
        }
    }
    basis.from_upper(c)
}

/// `-ω . q`, the rate of work of a bivector torque.
pub fn bivector_work(omega: &Multivector, q: &Multivector) -> f64 {
    -omega.inner(q).scalar_part()
}

#[derive(Clone, Debug, PartialEq)]
pub enum BodyForce {
    Zero,
    Constant(Vec3),
    /// Chosen so that momentum balance holds exactly.
    Manufactured,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Divergence {
    Exact,
    Central { h: f64 },
}

impl Divergence {
    pub const DEFAULT_H: f64 = 1e-3;
}

/// Deliberate corruptions used to check that residuals respond correctly.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Probe {
    /// Added to `S^{12}` after assembly.
    pub s12_offset: f64,
    /// Added to the body moment after the shear closure has used it.
    pub moment_offset: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub chart: Chart,
    pub motion: Motion,
    pub material: Material,
    pub body_force: BodyForce,
    /// Upper components `c^{(1,3)}, c^{(2,3)}`; the `e1^e2` part is zero.
    pub body_moment: [f64; 2],
    pub divergence: Divergence,
}

impl Case {
    pub fn new(chart: Chart, motion: Motion, material: Material) -> Self {
        Case {
            chart,
            motion,
            material,
            body_force: BodyForce::Zero,
            body_moment: [0.0; 2],
            divergence: Divergence::Central { h: Divergence::DEFAULT_H },
        }
    }

    pub fn stress(&self, u: [f64; 2], t: f64) -> Result<StressPoint> {
        StressPoint::evaluate(&self.chart, &self.motion, &self.material, self.body_moment, u, t)
    }

    /// `S^{ai}` and its exact coordinate derivatives.
    pub fn stress_gradient_exact(&self, u: [f64; 2], t: f64) -> Result<ComponentGrad<3>> {
        let uj = [Jet::var(u[0], 0), Jet::var(u[1], 1)];
        let pj = StressPoint::evaluate(&self.chart, &self.motion, &self.material, self.body_moment, uj, t)?;
        Ok(ComponentGrad {
            value: pj.second_pk.map(|r| r.map(|x| x.v)),
            grad: std::array::from_fn(|k| pj.second_pk.map(|r| r.map(|x| x.g[k]))),
        })
    }

    /// `S^{ai}` with derivatives from central differences of step `h`.
    pub fn stress_gradient_central(&self, u: [f64; 2], t: f64, h: f64) -> Result<ComponentGrad<3>> {
        if !self.chart.domain().contains_box(u, h) {
            return Err(ShellError::StencilOutOfDomain { u, h });
        }
        let at = |du: [f64; 2]| self.stress([u[0] + du[0], u[1] + du[1]], t).map(|p| p.second_pk);
        let value = at([0.0, 0.0])?;
        let mut grad = [[[0.0; 2]; 3]; 2];
        for k in 0..2 {
            let mut d = [0.0; 2];
            d[k] = h;
            let plus = at(d)?;
            d[k] = -h;
            let minus = at(d)?;
            for a in 0..3 {
                for i in 0..2 {
                    grad[k][a][i] = (plus[a][i] - minus[a][i]) / (2.0 * h);
                }
            }
        }
        Ok(ComponentGrad { value, grad })
    }

    /// `Ṫ(∂̇)` by the configured divergence policy.
    pub fn stress_divergence(&self, u: [f64; 2], t: f64, divergence: Divergence) -> Result<Vec3> {
        let def = Deformation::<f64>::evaluate(&self.chart, &self.motion, u, t)?;
        let comps = match divergence {
            Divergence::Exact => self.stress_gradient_exact(u, t)?,
            Divergence::Central { h } => self.stress_gradient_central(u, t, h)?,
        };
        Ok(divergence_vector(&comps, &def.spatial, &def.reference))
    }

    pub fn acceleration(&self, u: [f64; 2], t: f64) -> Result<Vec3> {
        Ok(motion_partials(&self.chart, &self.motion, u, t, &KinematicOptions::default())?.accel)
    }

    pub fn body_force_at(&self, u: [f64; 2], t: f64) -> Result<Vec3> {
        match &self.body_force {
            BodyForce::Zero => Ok(Vec3::zero()),
            BodyForce::Constant(b) => Ok(*b),
            BodyForce::Manufactured => {
                let rho0 = self.material.density;
                let a = self.acceleration(u, t)?;
                let div = self.stress_divergence(u, t, Divergence::Exact)?;
                Ok((a.scale(rho0) - div).scale(1.0 / rho0))
            }
        }
    }

    /// `ρ0 ∂V/∂t - Ṫ(∂̇) - ρ0 b`.
    pub fn momentum_residual(&self, u: [f64; 2], t: f64) -> Result<Vec3> {
        let rho0 = self.material.density;
        let a = self.acceleration(u, t)?;
        let div = self.stress_divergence(u, t, self.divergence)?;
        let b = self.body_force_at(u, t)?;
        Ok(a.scale(rho0) - div - b.scale(rho0))
    }

    /// Upper components over (1,3), (2,3), (1,2) of
    /// `F(E_i) ∧ T(E^i) + Ṁ(∂̇) + ρ0 c`.
    pub fn angular_momentum_residual(&self, u: [f64; 2], t: f64, probe: Probe) -> Result<[f64; 3]> {
        let mut p = self.stress(u, t)?;
        p.second_pk[0][1] += probe.s12_offset;
        let spatial = &p.deformation.spatial;
        let reference = &p.deformation.reference;
        let tcols = p.first_pk();
        let mut r = Multivector::zero();
        for i in 0..2 {
            r = r + wedge_vectors(spatial.e[i], tcols[i]);
        }
        let m = ComponentGrad { value: p.couple, grad: p.couple_grad };
        r = r + divergence_bivector(&m, spatial, reference);
        let c = [self.body_moment[0] + probe.moment_offset[0], self.body_moment[1] + probe.moment_offset[1], 0.0];
        let basis = spatial.bivector_basis();
        r = r + basis.from_upper(c).scale(self.material.density);
        Ok(basis.upper_components(&r))
    }

    /// `ρ0 ∂E/∂t - S̃^{ij} Ė_ij - 𝗡^{ij} Ḣ_ij` with the energy rate from a
    /// central time difference of step `dt`.
    pub fn energy_residual(&self, u: [f64; 2], t: f64, dt: f64) -> Result<f64> {
        let energy = |s: f64| -> Result<f64> {
            let d = Deformation::<f64>::evaluate(&self.chart, &self.motion, u, s)?;
            Ok(self.material.energy_density(&d.strain, &d.curvature_change, &d.reference.metric_inv))
        };
        let rate = (energy(t + dt)? - energy(t - dt)?) / (2.0 * dt);
        let k = KinematicState::evaluate(&self.chart, &self.motion, u, t, &KinematicOptions::default())?;
        let gi = &k.reference.metric_inv;
        let s = self.material.modified_stress(&k.strain, gi);
        let n = self.material.couple_stress(&k.curvature_change, gi);
        let mut power = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                power += s[i][j] * k.strain_rate[i][j] + n[i][j] * k.curvature_rate[i][j];
            }
        }
        Ok(rate - power)
    }

    /// Time derivative of `ρ det F`, with `ρ = ρ0 𝔙/𝔳` and
    /// `det F = sqrt(det g / det G)`.
    pub fn mass_residual(&self, u: [f64; 2], t: f64, dt: f64) -> Result<f64> {
        let reference = self.chart.frame(u, DiffPolicy::Exact)?;
        let product = |s: f64| -> Result<f64> {
            let mp = motion_partials(&self.chart, &self.motion, u, s, &KinematicOptions::default())?;
            let spatial = SurfaceFrame::from_partials(&mp.x)?;
            let rho = self.material.density * reference.volume / spatial.volume;
            Ok(rho * (spatial.metric_det() / reference.metric_det()).sqrt())
        };
        Ok((product(t + dt)? - product(t - dt)?) / (2.0 * dt))
    }
}

/// Max and RMS norms of per-point residual magnitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub max: f64,
    pub rms: f64,
    pub count: usize,
    pub tolerance: f64,
}

impl ResidualReport {
    pub fn new(values: &[f64], tolerance: f64) -> Self {
        let mut max = 0.0_f64;
        let mut sq = 0.0;
        for v in values {
            max = max.max(v.abs());
            sq += v * v;
        }
        let rms = if values.is_empty() { 0.0 } else { (sq / values.len() as f64).sqrt() };
        ResidualReport { max, rms, count: values.len(), tolerance }
    }

    pub fn passes(&self) -> bool {
        self.max <= self.tolerance
    }
}
