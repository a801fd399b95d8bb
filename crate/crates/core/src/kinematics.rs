//! Deformation and rate measures of a motion at a convected point.

use crate::autodiff::{Jet, Real, TJet};
use crate::error::{Result, ShellError};
use crate::ga3::{wedge_vectors, Multivector, Vec3};
use crate::linalg::{apply3, outer, zero3, Mat2, Mat3};
use crate::motion::Motion;
use crate::surface::{central_partials, jet_partials, sym_eigen2, Chart, DiffPolicy, Partials, SurfaceFrame};

/// Position, velocity and acceleration of a convected point together with
/// coordinate derivatives of position and velocity.
#[derive(Clone, Copy, Debug)]
pub struct MotionPartials {
    pub x: Partials<f64>,
    pub v: Partials<f64>,
    pub accel: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KinematicOptions {
    pub diff: DiffPolicy,
    /// Time step for velocities when `diff` is central.
    pub dt: f64,
}

impl Default for KinematicOptions {
    fn default() -> Self {
        KinematicOptions { diff: DiffPolicy::Exact, dt: 1e-5 }
    }
}

pub fn motion_partials(
    chart: &Chart,
    motion: &Motion,
    u: [f64; 2],
    t: f64,
    opts: &KinematicOptions,
) -> Result<MotionPartials> {
    let dom = chart.domain();
    match opts.diff {
        DiffPolicy::Exact => {
            if !dom.contains(u) {
                return Err(ShellError::OutOfDomain { u });
            }
            let uj = [Jet::var(TJet::constant(u[0]), 0), Jet::var(TJet::constant(u[1]), 1)];
            let r = motion.place(chart, uj, Jet::constant(TJet::var(t)));
            let pick = |f: &dyn Fn(&Jet<TJet<f64>>) -> TJet<f64>, g: &dyn Fn(TJet<f64>) -> f64| {
                r.map(|c| g(f(&c)))
            };
            let part = |g: &dyn Fn(TJet<f64>) -> f64| Partials {
                x: pick(&|c| c.v, g),
                d: [pick(&|c| c.g[0], g), pick(&|c| c.g[1], g)],
                dd: [
                    [pick(&|c| c.h[0][0], g), pick(&|c| c.h[0][1], g)],
                    [pick(&|c| c.h[1][0], g), pick(&|c| c.h[1][1], g)],
                ],
            };
            Ok(MotionPartials {
                x: part(&|s| s.v),
                v: part(&|s| s.d),
                accel: r.map(|c| c.v.dd),
            })
        }
        DiffPolicy::Central { h, h2 } => {
            if !dom.contains_box(u, h.max(h2)) {
                return Err(ShellError::OutOfDomain { u });
            }
            let dt = opts.dt;
            let at = |w: [f64; 2], s: f64| motion.place(chart, w, s);
            let x = central_partials(|w| at(w, t), u, h, h2);
            let v = central_partials(|w| (at(w, t + dt) - at(w, t - dt)) * (0.5 / dt), u, h, h2);
            let accel = (at(u, t + dt) - at(u, t) * 2.0 + at(u, t - dt)) * (1.0 / (dt * dt));
            Ok(MotionPartials { x, v, accel })
        }
    }
}

/// Exact spatial-configuration partials at a generic scalar type.
pub fn spatial_partials<T: Real>(chart: &Chart, motion: &Motion, u: [T; 2], t: f64) -> Partials<T> {
    jet_partials(|w| motion.place(chart, w, Jet::cst(t)), u)
}

/// Fails unless `e1 x e2` points to the same side as the rotated
/// reference normal.
pub fn check_orientation<T: Real>(
    reference: &SurfaceFrame<T>,
    spatial: &SurfaceFrame<T>,
    rotation: &Mat3,
) -> Result<()> {
    let n = apply3(rotation, reference.e[2].re());
    let det = spatial.volume.re() * spatial.e[2].re().dot(&n) / reference.volume.re();
    if det > 0.0 {
        Ok(())
    } else {
        Err(ShellError::OrientationReversed { det })
    }
}

/// Strain and bending measures, generic so that they can be differentiated
/// in the coordinates.
#[derive(Clone, Copy, Debug)]
pub struct Deformation<T = f64> {
    pub reference: SurfaceFrame<T>,
    pub spatial: SurfaceFrame<T>,
    pub strain: Mat2<T>,
    pub curvature_change: Mat2<T>,
    pub det_f: T,
}

impl<T: Real> Deformation<T> {
    pub fn from_frames(reference: SurfaceFrame<T>, spatial: SurfaceFrame<T>, rotation: &Mat3) -> Result<Self> {
        check_orientation(&reference, &spatial, rotation)?;
        let strain = std::array::from_fn(|i| {
            std::array::from_fn(|j| (spatial.metric[i][j] - reference.metric[i][j]) * 0.5)
        });
        let curvature_change = std::array::from_fn(|i| {
            std::array::from_fn(|j| spatial.second_form[i][j] - reference.second_form[i][j])
        });
        let det_f = spatial.volume / reference.volume;
        Ok(Deformation { reference, spatial, strain, curvature_change, det_f })
    }

    /// Exact evaluation; `u` may carry derivative information.
    pub fn evaluate(chart: &Chart, motion: &Motion, u: [T; 2], t: f64) -> Result<Self> {
        let ur = [u[0].re(), u[1].re()];
        if !chart.domain().contains(ur) {
            return Err(ShellError::OutOfDomain { u: ur });
        }
        let reference = SurfaceFrame::from_partials(&jet_partials(|w| chart.position(w), u))?;
        let spatial = SurfaceFrame::from_partials(&spatial_partials(chart, motion, u, t))?;
        Self::from_frames(reference, spatial, &motion.rotation(t))
    }
}

/// Full kinematic state at a convected point.
///
/// `l[a][b] = e_a . l(e_b)` with index 2 standing for the normal; `n` and
/// `w` are its symmetric and antisymmetric parts.
#[derive(Clone, Copy, Debug)]
pub struct KinematicState {
    pub reference: SurfaceFrame,
    pub spatial: SurfaceFrame,
    pub det_f: f64,
    pub cauchy_green: Mat2,
    pub strain: Mat2,
    pub stretches: [f64; 2],
    pub curvature_change: Mat2,
    pub velocity: Vec3,
    pub velocity_gradient: [Vec3; 2],
    pub acceleration: Vec3,
    pub l: Mat3,
    pub n: Mat3,
    pub w: Mat3,
    pub omega: Multivector,
    pub strain_rate: Mat2,
    pub curvature_rate: Mat2,
}

impl KinematicState {
    pub fn evaluate(
        chart: &Chart,
        motion: &Motion,
        u: [f64; 2],
        t: f64,
        opts: &KinematicOptions,
    ) -> Result<Self> {
        let reference = chart.frame(u, opts.diff)?;
        let mp = motion_partials(chart, motion, u, t, opts)?;
        let spatial = SurfaceFrame::from_partials(&mp.x)?;
        Self::from_parts(reference, spatial, &mp, &motion.rotation(t))
    }

    pub fn from_parts(
        reference: SurfaceFrame,
        spatial: SurfaceFrame,
        mp: &MotionPartials,
        rotation: &Mat3,
    ) -> Result<Self> {
        let def = Deformation::from_frames(reference, spatial, rotation)?;
        let g = spatial.metric;
        let cg = crate::linalg::mul2(&reference.metric_inv, &g);
        let stretches = sym_eigen2(&cg).map(|x| x.max(0.0).sqrt());

        let dv = mp.v.d;
        let e = spatial.e;
        let mut l = zero3();
        for a in 0..3 {
            for j in 0..2 {
                l[a][j] = e[a].dot(&dv[j]);
            }
        }
        for i in 0..2 {
            l[i][2] = -l[2][i];
        }
        let mut n = zero3();
        let mut w = zero3();
        for a in 0..3 {
            for b in 0..3 {
                n[a][b] = 0.5 * (l[a][b] + l[b][a]);
                w[a][b] = 0.5 * (l[a][b] - l[b][a]);
            }
        }
        let r = spatial.reciprocal;
        let mut omega = Multivector::zero();
        for a in 0..3 {
            let wa = r[0].scale(w[0][a]) + r[1].scale(w[1][a]) + r[2].scale(w[2][a]);
            omega = omega + wedge_vectors(r[a], wa).scale(0.5);
        }

        let strain_rate = [[n[0][0], n[0][1]], [n[1][0], n[1][1]]];
        let gamma = &spatial.christoffel;
        let bm = spatial.shape_operator();
        let mut curvature_rate = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let d_l3j = spatial.de[i][2].dot(&dv[j]) + e[2].dot(&mp.v.dd[i][j]);
                let mut s = d_l3j;
                for k in 0..2 {
                    s -= gamma[i][k][j] * l[2][k];
                    s += bm[k][i] * l[k][j];
                }
                curvature_rate[i][j] = s;
            }
        }

        Ok(KinematicState {
            reference,
            spatial,
            det_f: def.det_f,
            cauchy_green: g,
            strain: def.strain,
            stretches,
            curvature_change: def.curvature_change,
            velocity: mp.v.x,
            velocity_gradient: dv,
            acceleration: mp.accel,
            l,
            n,
            w,
            omega,
            strain_rate,
            curvature_rate,
        })
    }

    /// `F = e_a ⊗ E^a`, extended to the normal by `F(E3) = e3`.
    pub fn deformation_gradient(&self) -> Mat3 {
        let mut f = zero3();
        for a in 0..3 {
            f = crate::linalg::add3(&f, &outer(self.spatial.e[a], self.reference.reciprocal[a]));
        }
        f
    }

    /// Mixed components `F^a_i`: ambient coordinates of `e_i`.
    pub fn f_components(&self) -> [[f64; 2]; 3] {
        std::array::from_fn(|a| std::array::from_fn(|i| self.spatial.e[i].0[a]))
    }

    /// `w(y) = w_ba (e^a . y) e^b`.
    pub fn spin(&self, y: Vec3) -> Vec3 {
        let r = self.spatial.reciprocal;
        let mut out = Vec3::zero();
        for a in 0..3 {
            let ya = r[a].dot(&y);
            for b in 0..3 {
                out = out + r[b].scale(self.w[b][a] * ya);
            }
        }
        out
    }

    /// Vector form of the angular velocity, `-I3 ω`.
    pub fn angular_velocity(&self) -> Vec3 {
        self.omega.dual().vector_part()
    }

    /// `ω . e_A` over (1,3), (2,3), (1,2).
    pub fn omega_lower(&self) -> [f64; 3] {
        self.spatial.bivector_basis().lower_components(&self.omega)
    }

    /// `ω . e^A`.
    pub fn omega_upper(&self) -> [f64; 3] {
        self.spatial.bivector_basis().upper_components(&self.omega)
    }

    /// `v_{a|i} = e_a . ∂_i V`.
    pub fn velocity_component_gradient(&self, a: usize, i: usize) -> f64 {
        self.spatial.e[a].dot(&self.velocity_gradient[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Basis, Term, VectorField};
    use crate::linalg::{mul3, transpose3};
    use crate::motion::Rigid;

    fn opts() -> KinematicOptions {
        KinematicOptions::default()
    }

    fn max2(a: &Mat2) -> f64 {
        crate::linalg::max_abs2(a)
    }

    #[test]
    fn identity_motion_is_rest() {
        let chart = Chart::cylinder(2.0).unwrap();
        let k = KinematicState::evaluate(&chart, &Motion::Identity, [0.2, 0.4], 0.0, &opts()).unwrap();
        assert!(max2(&k.strain) < 1e-15);
        assert!(max2(&k.curvature_change) < 1e-15);
        assert!((k.det_f - 1.0).abs() < 1e-15);
        assert!((k.stretches[0] - 1.0).abs() < 1e-12 && (k.stretches[1] - 1.0).abs() < 1e-12);
        assert!(k.omega.max_abs() < 1e-15);
    }

    #[test]
    fn uniaxial_strain_values() {
        let m = Motion::UniaxialStrain { strain: 0.1, rate: 0.0 };
        for chart in [Chart::Plane, Chart::cylinder(1.5).unwrap()] {
            let k = KinematicState::evaluate(&chart, &m, [0.3, 0.7], 0.0, &opts()).unwrap();
            assert!((k.strain[0][0] - 0.105).abs() < 1e-15);
            assert!((k.det_f - 1.1).abs() < 1e-15);
            assert!((k.stretches[1] - 1.1).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_spin_about_normal() {
        let m = Motion::Rigid(Rigid::rotation([0.0, 0.0, 1.0], 0.7).unwrap());
        let k = KinematicState::evaluate(&Chart::Plane, &m, [0.5, -0.2], 0.4, &opts()).unwrap();
        let v = k.angular_velocity();
        assert!((v - Vec3::new(0.0, 0.0, 0.7)).max_abs() < 1e-12);
        for y in k.spatial.e {
            let via_omega = Multivector::vector(y).inner(&k.omega).vector_part();
            assert!((k.spin(y) - via_omega).max_abs() < 1e-12);
        }
    }

    #[test]
    fn bending_omega_components() {
        let field = VectorField::new(vec![
            Term::wave(2, Basis::Ambient, 0.1, [1.0, 0.5, 2.0], 0.2),
            Term::monomial(0, Basis::Ambient, 0.05, [1, 1, 1]),
        ]);
        let k = KinematicState::evaluate(&Chart::Plane, &Motion::Displacement(field), [0.3, 0.2], 0.5, &opts())
            .unwrap();
        let up = k.omega_upper();
        let low = k.omega_lower();
        let gi = k.spatial.metric_inv;
        for i in 0..2 {
            let v3i = k.velocity_component_gradient(2, i);
            let raised: f64 = (0..2).map(|j| gi[i][j] * k.velocity_component_gradient(2, j)).sum();
            assert!((low[i] + v3i).abs() < 1e-12);
            assert!((up[i] - raised).abs() < 1e-12);
        }
    }

    #[test]
    fn strain_rate_matches_pulled_back_stretching() {
        let field = VectorField::new(vec![Term::wave(0, Basis::Ambient, 0.1, [1.0, 0.0, 1.0], 0.0)]);
        let k = KinematicState::evaluate(&Chart::cylinder(1.0).unwrap(), &Motion::Displacement(field), [0.1, 0.3], 0.2, &opts())
            .unwrap();
        let r = k.spatial.reciprocal;
        let mut nmat = zero3();
        for a in 0..3 {
            for b in 0..3 {
                nmat = crate::linalg::add3(&nmat, &crate::linalg::scale3(&outer(r[a], r[b]), k.n[a][b]));
            }
        }
        let f = k.deformation_gradient();
        let fnf = mul3(&transpose3(&f), &mul3(&nmat, &f));
        for i in 0..2 {
            for j in 0..2 {
                let ei = k.reference.e[i];
                let v = ei.dot(&apply3(&fnf, k.reference.e[j]));
                assert!((v - k.strain_rate[i][j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn orientation_reversal_detected() {
        let flip = VectorField::new(vec![Term::monomial(2, Basis::Ambient, -2.0, [0, 0, 0])]);
        // reflect z -> -z is not a motion of the plane's normal, so build a
        // mirror through x: x -> -x
        let mirror = VectorField::new(vec![Term::monomial(0, Basis::Ambient, -2.0, [1, 0, 0])]);
        let r = KinematicState::evaluate(&Chart::Plane, &Motion::Displacement(mirror), [0.1, 0.1], 0.0, &opts());
        assert!(matches!(r, Err(ShellError::OrientationReversed { .. })));
        assert!(KinematicState::evaluate(&Chart::Plane, &Motion::Displacement(flip), [0.1, 0.1], 0.0, &opts()).is_ok());
    }
}
