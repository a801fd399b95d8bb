//! First-order perturbation about a pre-strained state `U = U0 + ε U'`.

use crate::autodiff::{Jet, Real};
use crate::balance::{Case, Divergence};
use crate::error::{Result, ShellError};
use crate::field::{Basis, Term, VectorField};
use crate::ga3::{wedge_vectors, Multivector, Vec3};
use crate::kinematics::{check_orientation, motion_partials, spatial_partials, Deformation, KinematicOptions};
use crate::linalg::{
    add3, apply3, det3, identity3, inv3, mul2, mul3, outer, scale3, trace3, transpose3, zero3, Mat2, Mat3,
};
use crate::motion::Motion;
use crate::stress::{in_plane_stress, Material};
use crate::surface::{jet_partials, Chart, DiffPolicy, SurfaceFrame};

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedMotion {
    pub background: VectorField,
    pub perturbation: VectorField,
    pub t: f64,
}

impl PerturbedMotion {
    pub fn new(background: VectorField, perturbation: VectorField) -> Self {
        PerturbedMotion { background, perturbation, t: 0.0 }
    }

    pub fn motion(&self, eps: f64) -> Motion {
        Motion::Displacement(self.background.plus_scaled(&self.perturbation, eps))
    }
}

/// The tensors that are expanded to first order, flattened for comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantities {
    /// `F` as an ambient matrix, extended by `F(E3) = e3`.
    pub f: Mat3,
    pub det_f: f64,
    pub f_inv: Mat3,
    pub strain: Mat2,
    pub normal: Vec3,
    pub curvature_change: Mat2,
    /// `𝗡^{ij}`.
    pub couple: Mat2,
    /// In-plane `S^{ij}`.
    pub stress: Mat2,
    /// Columns `T(E^i)` of the in-plane part.
    pub first_pk: [Vec3; 2],
    /// Columns `M(E^i)`.
    pub couple_first: [Multivector; 2],
    /// `ρ det F` at fixed `ρ`.
    pub mass: f64,
}

impl Quantities {
    pub const NAMES: [&'static str; 11] = ["F", "detF", "Finv", "E", "e3", "H", "N", "S", "T", "M", "rho"];

    pub fn groups(&self) -> Vec<(&'static str, Vec<f64>)> {
        let m3 = |m: &Mat3| m.iter().flatten().copied().collect::<Vec<_>>();
        let m2 = |m: &Mat2| m.iter().flatten().copied().collect::<Vec<_>>();
        vec![
            ("F", m3(&self.f)),
            ("detF", vec![self.det_f]),
            ("Finv", m3(&self.f_inv)),
            ("E", m2(&self.strain)),
            ("e3", self.normal.0.to_vec()),
            ("H", m2(&self.curvature_change)),
            ("N", m2(&self.couple)),
            ("S", m2(&self.stress)),
            ("T", self.first_pk.iter().flat_map(|v| v.0).collect()),
            ("M", self.couple_first.iter().flat_map(|m| m.0).collect()),
            ("rho", vec![self.mass]),
        ]
    }
}

/// Zeroth- and first-order coefficients of every expanded tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub zeroth: Quantities,
    pub first: Quantities,
}

fn frame_matrix<T: Real>(spatial: &[Vec3<T>; 3], reference: &SurfaceFrame<T>) -> Mat3<T> {
    let mut f = zero3();
    for a in 0..3 {
        f = add3(&f, &outer(spatial[a], reference.reciprocal[a]));
    }
    f
}

/// Full nonlinear evaluation at perturbation scale `eps`.
pub fn nonlinear_quantities(
    chart: &Chart,
    pm: &PerturbedMotion,
    material: &Material,
    eps: f64,
    u: [f64; 2],
) -> Result<Quantities> {
    let motion = pm.motion(eps);
    let def = Deformation::<f64>::evaluate(chart, &motion, u, pm.t)?;
    let (reference, spatial) = (&def.reference, &def.spatial);
    let f = frame_matrix(&spatial.e, reference);
    let gi = &reference.metric_inv;
    let modified = material.modified_stress(&def.strain, gi);
    let couple = material.couple_stress(&def.curvature_change, gi);
    let stress = in_plane_stress(&modified, &couple, &spatial.shape_operator());
    let e = &spatial.e;
    let first_pk = std::array::from_fn(|i| e[0].scale(stress[0][i]) + e[1].scale(stress[1][i]));
    let couple_first = std::array::from_fn(|i| {
        wedge_vectors(e[0], e[2]).scale(couple[0][i]) + wedge_vectors(e[1], e[2]).scale(couple[1][i])
    });
    let det_f = det3(&f);
    Ok(Quantities {
        f,
        det_f,
        f_inv: inv3(&f),
        strain: def.strain,
        normal: e[2],
        curvature_change: def.curvature_change,
        couple,
        stress,
        first_pk,
        couple_first,
        mass: material.density * det_f,
    })
}

struct Parts<T> {
    reference: SurfaceFrame<T>,
    background: SurfaceFrame<T>,
    du: [Vec3<T>; 2],
    ddu: [[Vec3<T>; 2]; 2],
    det_f0: T,
    normal_prime: Vec3<T>,
    f0: Mat3<T>,
    f_prime: Mat3<T>,
}

fn parts<T: Real>(chart: &Chart, pm: &PerturbedMotion, u: [T; 2]) -> Result<Parts<T>> {
    let reference = SurfaceFrame::from_partials(&jet_partials(|w| chart.position(w), u))?;
    let bg = Motion::Displacement(pm.background.clone());
    let background = SurfaceFrame::from_partials(&spatial_partials(chart, &bg, u, pm.t))?;
    check_orientation(&reference, &background, &identity3())?;
    let up = jet_partials(|w| pm.perturbation.eval(chart, w, Jet::cst(pm.t)), u);
    let (du, ddu) = (up.d, up.dd);
    let det_f0 = background.volume / reference.volume;
    let [e01, e02, _] = background.e;
    let tr = background.reciprocal[0].dot(&du[0]) + background.reciprocal[1].dot(&du[1]);
    let normal_prime = (du[0].cross(&e02) + e01.cross(&du[1]) - e01.cross(&e02).scale(tr))
        .scale((det_f0 * reference.volume).recip());
    let f0 = frame_matrix(&background.e, &reference);
    let f_prime = frame_matrix(&[du[0], du[1], normal_prime], &reference);
    Ok(Parts { reference, background, du, ddu, det_f0, normal_prime, f0, f_prime })
}

/// Analytic zeroth- and first-order coefficients of every tensor.
pub fn expansion(chart: &Chart, pm: &PerturbedMotion, material: &Material, u: [f64; 2]) -> Result<Expansion> {
    if !chart.domain().contains(u) {
        return Err(ShellError::OutOfDomain { u });
    }
    let p = parts::<f64>(chart, pm, u)?;
    let pj = parts::<Jet<f64>>(chart, pm, [Jet::var(u[0], 0), Jet::var(u[1], 1)])?;
    let (r, b) = (&p.reference, &p.background);
    let gi = &r.metric_inv;
    let e30 = b.e[2];

    let f0_inv = inv3(&p.f0);
    let f_inv_prime = scale3(&mul3(&f0_inv, &mul3(&p.f_prime, &f0_inv)), -1.0);
    let det_prime = p.det_f0 * trace3(&mul3(&f0_inv, &p.f_prime));

    let strain0: Mat2 = std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (b.metric[i][j] - r.metric[i][j])));
    let strain1: Mat2 =
        std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (b.e[i].dot(&p.du[j]) + p.du[i].dot(&b.e[j]))));
    let bend0: Mat2 = std::array::from_fn(|i| std::array::from_fn(|j| b.second_form[i][j] - r.second_form[i][j]));
    let bend1: Mat2 = std::array::from_fn(|i| {
        std::array::from_fn(|j| e30.dot(&p.ddu[i][j]) + p.normal_prime.dot(&b.de[i][j]))
    });

    // F⁻¹bF, mixed [j][i]
    let fb0_inv = transpose3(&inv3(&pj.f0));
    let fb_prime = transpose3(&pj.f_prime);
    let chain = mul3(&fb0_inv, &mul3(&fb_prime, &fb0_inv));
    let e30j = pj.background.e[2];
    let npj = pj.normal_prime;
    let mut curv0 = [[0.0; 2]; 2];
    let mut curv1 = [[0.0; 2]; 2];
    for j in 0..2 {
        let rj = pj.reference.reciprocal[j];
        let pulled = apply3(&fb0_inv, rj);
        let w = apply3(&chain, rj);
        for i in 0..2 {
            let d_pulled = pulled.map(|c| c.g[i]);
            let d_w = w.map(|c| c.g[i]);
            curv0[j][i] = e30j.re().dot(&d_pulled);
            curv1[j][i] = -e30j.re().dot(&d_w) + npj.re().dot(&d_pulled);
        }
    }

    let couple0 = material.couple_stress(&bend0, gi);
    let couple1 = material.couple_stress(&bend1, gi);
    let mod0 = material.modified_stress(&strain0, gi);
    let mod1 = material.modified_stress(&strain1, gi);
    let stress0 = in_plane_stress(&mod0, &couple0, &curv0);
    let extra = mul2(&curv1, &couple0);
    let base1 = in_plane_stress(&mod1, &couple1, &curv0);
    let stress1: Mat2 = std::array::from_fn(|i| std::array::from_fn(|j| base1[i][j] + extra[i][j]));

    let e0 = b.e;
    let t0 = std::array::from_fn(|i| e0[0].scale(stress0[0][i]) + e0[1].scale(stress0[1][i]));
    let t1 = std::array::from_fn(|i| {
        e0[0].scale(stress1[0][i])
            + e0[1].scale(stress1[1][i])
            + p.du[0].scale(stress0[0][i])
            + p.du[1].scale(stress0[1][i])
    });
    let m0 = std::array::from_fn(|i| {
        wedge_vectors(e0[0], e30).scale(couple0[0][i]) + wedge_vectors(e0[1], e30).scale(couple0[1][i])
    });
    let m1 = std::array::from_fn(|i| {
        let mut s = Multivector::zero();
        for j in 0..2 {
            s = s
                + (wedge_vectors(p.du[j], e30) + wedge_vectors(e0[j], p.normal_prime)).scale(couple0[j][i])
                + wedge_vectors(e0[j], e30).scale(couple1[j][i]);
        }
        s
    });

    let zeroth = Quantities {
        f: p.f0,
        det_f: p.det_f0,
        f_inv: f0_inv,
        strain: strain0,
        normal: e30,
        curvature_change: bend0,
        couple: couple0,
        stress: stress0,
        first_pk: t0,
        couple_first: m0,
        mass: material.density * p.det_f0,
    };
    let first = Quantities {
        f: p.f_prime,
        det_f: det_prime,
        f_inv: f_inv_prime,
        strain: strain1,
        normal: p.normal_prime,
        curvature_change: bend1,
        couple: couple1,
        stress: stress1,
        first_pk: t1,
        couple_first: m1,
        mass: material.density * det_prime,
    };
    Ok(Expansion { zeroth, first })
}

/// `(Q(δ) - Q(-δ)) / 2δ` from the nonlinear pipeline, grouped like
/// [`Quantities::groups`].
pub fn first_order_fd(
    chart: &Chart,
    pm: &PerturbedMotion,
    material: &Material,
    u: [f64; 2],
    delta: f64,
) -> Result<Vec<(&'static str, Vec<f64>)>> {
    let plus = nonlinear_quantities(chart, pm, material, delta, u)?.groups();
    let minus = nonlinear_quantities(chart, pm, material, -delta, u)?.groups();
    Ok(plus
        .into_iter()
        .zip(minus)
        .map(|((name, a), (_, b))| (name, a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * delta)).collect()))
        .collect())
}

/// Step used for the first-order extraction oracle.
pub const FD_DELTA: f64 = 1e-5;

/// Second-order remainder of one tensor over a decreasing list of scales.
#[derive(Clone, Debug, PartialEq)]
pub struct RemainderSeries {
    pub name: &'static str,
    /// `max |Q(ε) - Q0 - ε Q'|` per scale.
    pub remainders: Vec<f64>,
}

impl RemainderSeries {
    pub fn ratios(&self) -> Vec<f64> {
        self.remainders.windows(2).map(|w| w[0] / w[1]).collect()
    }

    /// Second order: every halving shrinks the remainder by `[3.5, 4.5]`,
    /// unless the smallest remainder is already below `floor`.
    pub fn is_second_order(&self, floor: f64) -> bool {
        if self.remainders.iter().all(|r| *r <= floor) {
            return true;
        }
        self.ratios().iter().all(|r| (3.5..=4.5).contains(r))
    }
}

pub fn remainders(
    chart: &Chart,
    pm: &PerturbedMotion,
    material: &Material,
    u: [f64; 2],
    scales: &[f64],
) -> Result<Vec<RemainderSeries>> {
    let ex = expansion(chart, pm, material, u)?;
    let (g0, g1) = (ex.zeroth.groups(), ex.first.groups());
    let mut out: Vec<RemainderSeries> =
        g0.iter().map(|(name, _)| RemainderSeries { name, remainders: Vec::new() }).collect();
    for &eps in scales {
        let q = nonlinear_quantities(chart, pm, material, eps, u)?.groups();
        for (k, (_, vals)) in q.iter().enumerate() {
            let r = vals
                .iter()
                .zip(&g0[k].1)
                .zip(&g1[k].1)
                .map(|((q, a), b)| (q - a - eps * b).abs())
                .fold(0.0_f64, f64::max);
            out[k].remainders.push(r);
        }
    }
    Ok(out)
}

/// Linearized momentum residual `ρ0 ∂²U'/∂t² - Ṫ'(∂̇) - ρ0 b' - ρ' b0`,
/// with the first-order parts of `Ṫ(∂̇)` and `ρ det F` taken by central
/// differences in `ε`.
pub fn linearized_momentum_residual(
    chart: &Chart,
    pm: &PerturbedMotion,
    material: &Material,
    u: [f64; 2],
    body_force: [Vec3; 2],
) -> Result<Vec3> {
    let d = FD_DELTA;
    let div = |eps: f64| {
        Case::new(chart.clone(), pm.motion(eps), *material).stress_divergence(u, pm.t, Divergence::Exact)
    };
    let div_prime = (div(d)? - div(-d)?).scale(0.5 / d);
    let ex = expansion(chart, pm, material, u)?;
    let opts = KinematicOptions::default();
    let accel = |f: &VectorField| -> Result<Vec3> {
        Ok(motion_partials(chart, &Motion::Displacement(f.clone()), u, pm.t, &opts)?.accel)
    };
    let rho0 = ex.zeroth.mass;
    let rho1 = ex.first.mass;
    Ok(accel(&pm.perturbation)?.scale(rho0) + accel(&pm.background)?.scale(rho1)
        - div_prime
        - body_force[1].scale(rho0)
        - body_force[0].scale(rho1))
}

/// First-order quantities about the undeformed state `U0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallDisplacement {
    /// `e_i'` = `∂_i U'`.
    pub frame: [Vec3; 2],
    /// Tangential part of `e^i'`, `-E^k (E^i . ∂_k U')`.
    pub reciprocal: [Vec3; 2],
    pub normal: Vec3,
    /// `∂ . U'`.
    pub det_f: f64,
    pub strain: Mat2,
    pub curvature_change: Mat2,
    pub couple: Mat2,
    pub stress: Mat2,
}

pub fn small_displacement(
    chart: &Chart,
    perturbation: &VectorField,
    material: &Material,
    u: [f64; 2],
    t: f64,
) -> Result<SmallDisplacement> {
    let r = chart.frame(u, DiffPolicy::Exact)?;
    let up = jet_partials(|w| perturbation.eval(chart, w, Jet::cst(t)), u);
    let (du, ddu) = (up.d, up.dd);
    let div = r.reciprocal[0].dot(&du[0]) + r.reciprocal[1].dot(&du[1]);
    let reciprocal = std::array::from_fn(|i| {
        -(r.reciprocal[0].scale(r.reciprocal[i].dot(&du[0])) + r.reciprocal[1].scale(r.reciprocal[i].dot(&du[1])))
    });
    let inv_v = 1.0 / r.volume;
    let normal = du[0].cross(&r.e[1]).scale(inv_v) + r.e[0].cross(&du[1]).scale(inv_v) - r.e[2].scale(div);
    let strain = std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (r.e[i].dot(&du[j]) + du[i].dot(&r.e[j]))));
    let curvature_change: Mat2 = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut s = r.e[2].dot(&ddu[i][j]);
            for k in 0..2 {
                s -= r.christoffel[i][k][j] * r.e[2].dot(&du[k]);
            }
            s
        })
    });
    let gi = &r.metric_inv;
    let couple = material.couple_stress(&curvature_change, gi);
    let stress = in_plane_stress(&material.modified_stress(&strain, gi), &couple, &r.shape_operator());
    Ok(SmallDisplacement { frame: du, reciprocal, normal, det_f: div, strain, curvature_change, couple, stress })
}

/// Uni-axial pre-strain of an arc-length cylinder with a perturbation given
/// in the reference frame.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderCase {
    pub radius: f64,
    /// Background axial strain.
    pub strain: f64,
    pub material: Material,
    pub perturbation: VectorField,
}

/// Component tables of the cylinder problem; `1` marks first-order parts.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderTables {
    pub det_f0: f64,
    pub strain0: Mat2,
    pub strain1: Mat2,
    pub bend0: Mat2,
    pub bend1: Mat2,
    pub couple0: Mat2,
    pub couple1: Mat2,
    pub stress0: Mat2,
    pub stress1: Mat2,
}

impl CylinderTables {
    /// `(name, value)` pairs in a fixed order, e.g. `Eprime_12`.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out = vec![("detF0".to_string(), self.det_f0)];
        let blocks = [
            ("E0", &self.strain0),
            ("Eprime", &self.strain1),
            ("H0", &self.bend0),
            ("Hprime", &self.bend1),
            ("N0", &self.couple0),
            ("Nprime", &self.couple1),
            ("S0", &self.stress0),
            ("Sprime", &self.stress1),
        ];
        for (name, m) in blocks {
            for i in 0..2 {
                for j in 0..2 {
                    out.push((format!("{name}_{}{}", i + 1, j + 1), m[i][j]));
                }
            }
        }
        out
    }
}

impl CylinderCase {
    pub fn chart(&self) -> Result<Chart> {
        Chart::cylinder(self.radius)
    }

    pub fn perturbed_motion(&self) -> PerturbedMotion {
        let background = VectorField::new(vec![Term::monomial(0, Basis::Ambient, self.strain, [1, 0, 0])]);
        PerturbedMotion::new(background, self.perturbation.clone())
    }

    /// Frame components `U'_a` with first and second partials, indexed
    /// `[a]`, `[i][a]`, `[i][j][a]`.
    pub fn perturbation_components(&self, u: [f64; 2]) -> Result<([f64; 3], [[f64; 3]; 2], [[[f64; 3]; 2]; 2])> {
        let chart = self.chart()?;
        let f = chart.frame(u, DiffPolicy::Exact)?;
        let deviation = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (f.metric[i][j] - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0_f64, f64::max);
        if deviation > 1e-12 {
            return Err(ShellError::NonOrthonormalFrame { deviation });
        }
        let p = jet_partials(
            |w| {
                let frame = chart.frame_vectors(w);
                let v = self.perturbation.eval(&chart, w, Jet::cst(0.0));
                Vec3(std::array::from_fn(|a| frame[a].dot(&v)))
            },
            u,
        );
        Ok((p.x.0, [p.d[0].0, p.d[1].0], [[p.dd[0][0].0, p.dd[0][1].0], [p.dd[1][0].0, p.dd[1][1].0]]))
    }

    /// The closed-form component tables.
    pub fn closed_form(&self, u: [f64; 2]) -> Result<CylinderTables> {
        let (uc, d, dd) = self.perturbation_components(u)?;
        let c = 1.0 / self.radius;
        let eps = self.strain;
        let m = &self.material;
        let nu = m.poisson;
        let k = m.membrane_stiffness();
        let kb = m.bending_stiffness();
        let shear = m.young * m.thickness / (1.0 + nu);
        let bshear = m.young * m.thickness.powi(3) / (12.0 * (1.0 + nu));

        let e011 = 0.5 * eps * eps + eps;
        let strain0 = [[e011, 0.0], [0.0, 0.0]];
        let e12 = 0.5 * (d[0][1] + d[1][0]) + 0.5 * eps * d[1][0];
        let strain1 = [[(1.0 + eps) * d[0][0], e12], [e12, d[1][1] - c * uc[2]]];
        let h12 = dd[0][1][2] + c * d[0][1];
        let bend1 = [
            [dd[0][0][2], h12],
            [h12, dd[1][1][2] + 2.0 * c * d[1][1] - c * c * uc[2]],
        ];
        let n12 = bshear * bend1[0][1];
        let couple1 = [
            [kb * (bend1[0][0] + nu * bend1[1][1]), n12],
            [n12, kb * (bend1[1][1] + nu * bend1[0][0])],
        ];
        let stress0 = [[k * e011, 0.0], [0.0, k * nu * e011]];
        let stress1 = [
            [k * (strain1[0][0] + nu * strain1[1][1]) + c * couple1[1][1], shear * strain1[0][1]],
            [shear * strain1[1][0] + c * couple1[1][0], k * (strain1[1][1] + nu * strain1[0][0])],
        ];
        Ok(CylinderTables {
            det_f0: 1.0 + eps,
            strain0,
            strain1,
            bend0: [[0.0; 2]; 2],
            bend1,
            couple0: [[0.0; 2]; 2],
            couple1,
            stress0,
            stress1,
        })
    }

    /// The same tables from the nonlinear pipeline, first orders by central
    /// differences in the perturbation scale.
    pub fn general(&self, u: [f64; 2]) -> Result<CylinderTables> {
        let chart = self.chart()?;
        let pm = self.perturbed_motion();
        let q0 = nonlinear_quantities(&chart, &pm, &self.material, 0.0, u)?;
        let qp = nonlinear_quantities(&chart, &pm, &self.material, FD_DELTA, u)?;
        let qm = nonlinear_quantities(&chart, &pm, &self.material, -FD_DELTA, u)?;
        let fd = |a: &Mat2, b: &Mat2| -> Mat2 {
            std::array::from_fn(|i| std::array::from_fn(|j| (a[i][j] - b[i][j]) / (2.0 * FD_DELTA)))
        };
        Ok(CylinderTables {
            det_f0: q0.det_f,
            strain0: q0.strain,
            strain1: fd(&qp.strain, &qm.strain),
            bend0: q0.curvature_change,
            bend1: fd(&qp.curvature_change, &qm.curvature_change),
            couple0: q0.couple,
            couple1: fd(&qp.couple, &qm.couple),
            stress0: q0.stress,
            stress1: fd(&qp.stress, &qm.stress),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn material() -> Material {
        Material::new(1.0, 0.3, 0.1, 1.0).unwrap()
    }

    fn wavy() -> VectorField {
        VectorField::new(vec![
            Term::wave(2, Basis::Frame, 0.3, [1.0, 0.5, 0.0], 0.2),
            Term::monomial(0, Basis::Ambient, 0.2, [1, 1, 0]),
            Term::wave(1, Basis::Ambient, 0.1, [0.0, 1.3, 0.0], 0.0),
        ])
    }

    #[test]
    fn zero_perturbation_has_zero_first_order() {
        let pm = PerturbedMotion::new(VectorField::default(), VectorField::default());
        let ex = expansion(&Chart::cylinder(1.0).unwrap(), &pm, &material(), [0.1, 0.2]).unwrap();
        for (_, v) in ex.first.groups() {
            assert!(v.iter().all(|x| x.abs() < 1e-15));
        }
        assert!((ex.zeroth.det_f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_first_order_matches_fd() {
        let chart = Chart::sphere(1.4).unwrap();
        let bg = VectorField::new(vec![
            Term::wave(2, Basis::Frame, 0.1, [1.0, 1.0, 0.0], 0.0),
            Term::monomial(0, Basis::Ambient, 0.05, [0, 1, 0]),
        ]);
        let pm = PerturbedMotion::new(bg, wavy());
        let u = [1.1, 0.4];
        let ex = expansion(&chart, &pm, &material(), u).unwrap();
        let fd = first_order_fd(&chart, &pm, &material(), u, FD_DELTA).unwrap();
        for ((name, a), (_, b)) in ex.first.groups().iter().zip(&fd) {
            let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(d < 1e-8, "{name}: {d}");
        }
    }

    #[test]
    fn remainders_are_second_order() {
        let pm = PerturbedMotion::new(
            VectorField::new(vec![Term::monomial(0, Basis::Ambient, 0.1, [1, 0, 0])]),
            wavy(),
        );
        let series = remainders(&Chart::cylinder(2.0).unwrap(), &pm, &material(), [0.3, 0.5], &[1e-2, 5e-3, 2.5e-3])
            .unwrap();
        for s in &series {
            assert!(s.is_second_order(1e-12), "{} {:?}", s.name, s.remainders);
        }
    }

    #[test]
    fn small_displacement_agrees_with_general() {
        let chart = Chart::sphere(2.0).unwrap();
        let pm = PerturbedMotion::new(VectorField::default(), wavy());
        let u = [0.9, -0.3];
        let ex = expansion(&chart, &pm, &material(), u).unwrap();
        let sd = small_displacement(&chart, &pm.perturbation, &material(), u, 0.0).unwrap();
        let d2 = |a: &Mat2, b: &Mat2| crate::linalg::max_abs2(&crate::linalg::sub2(a, b));
        assert!(d2(&ex.first.curvature_change, &sd.curvature_change) < 1e-12);
        assert!(d2(&ex.first.strain, &sd.strain) < 1e-12);
        assert!(d2(&ex.first.stress, &sd.stress) < 1e-12);
        assert!((ex.first.normal - sd.normal).max_abs() < 1e-12);
        assert!((ex.first.det_f - sd.det_f).abs() < 1e-12);
    }

    #[test]
    fn plane_second_derivative_bending() {
        let f = VectorField::new(vec![Term::monomial(2, Basis::Ambient, 0.5, [2, 0, 0])]);
        let sd = small_displacement(&Chart::Plane, &f, &material(), [0.4, 0.1], 0.0).unwrap();
        assert_eq!(sd.curvature_change, [[1.0, 0.0], [0.0, 0.0]]);
    }

    #[test]
    fn cylinder_background_values() {
        let case = CylinderCase { radius: 2.0, strain: 0.1, material: material(), perturbation: VectorField::default() };
        let cf = case.closed_form([0.3, 0.4]).unwrap();
        let g = case.general([0.3, 0.4]).unwrap();
        assert!((g.strain0[0][0] - 0.105).abs() < 1e-15);
        assert!((g.det_f0 - 1.1).abs() < 1e-15);
        assert!(crate::linalg::max_abs2(&g.bend0) < 1e-15);
        assert!((cf.stress0[1][1] - g.stress0[1][1]).abs() < 1e-15);
    }
}
