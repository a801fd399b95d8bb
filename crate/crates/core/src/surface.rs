//! Pointwise differential geometry of a parametrized surface.

use crate::autodiff::{Jet, Real};
use crate::error::{Result, ShellError};
use crate::field::{Basis, Term};
use crate::ga3::{wedge_vectors, BivectorBasis, Multivector, Vec3};

/// Below this value of `det(G_ij)` a frame is treated as collapsed.
pub const DEGENERATE_DET: f64 = 1e-12;

/// Margin kept away from the sphere's coordinate poles.
pub const SPHERE_POLE_MARGIN: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Domain {
    pub const UNBOUNDED: Domain =
        Domain { lo: [f64::NEG_INFINITY; 2], hi: [f64::INFINITY; 2] };

    pub fn contains(&self, u: [f64; 2]) -> bool {
        (0..2).all(|k| u[k] >= self.lo[k] && u[k] <= self.hi[k])
    }

    /// Whether the closed box of half-width `r` around `u` fits inside.
    pub fn contains_box(&self, u: [f64; 2], r: f64) -> bool {
        (0..2).all(|k| u[k] - r >= self.lo[k] && u[k] + r <= self.hi[k])
    }
}

/// User-supplied chart: position given by ambient coefficient terms.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricChart {
    pub terms: Vec<Term>,
    pub domain: Domain,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Chart {
    /// `(X1, X2, 0)`.
    Plane,
    /// Arc-length cylinder `(X1, R cos(X2/R), R sin(X2/R))` with inward normal.
    Cylinder { radius: f64 },
    /// Colatitude/longitude sphere with outward normal.
    Sphere { radius: f64 },
    Parametric(ParametricChart),
}

impl Chart {
    pub fn cylinder(radius: f64) -> Result<Chart> {
        check_radius(radius)?;
        Ok(Chart::Cylinder { radius })
    }

    pub fn sphere(radius: f64) -> Result<Chart> {
        check_radius(radius)?;
        Ok(Chart::Sphere { radius })
    }

    pub fn parametric(terms: Vec<Term>, domain: Domain) -> Result<Chart> {
        for t in &terms {
            if t.basis != Basis::Ambient || t.component > 2 || !t.is_static() {
                return Err(ShellError::InvalidInput(
                    "chart terms must be static ambient components 0..=2".into(),
                ));
            }
        }
        Ok(Chart::Parametric(ParametricChart { terms, domain }))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Chart::Plane => "plane",
            Chart::Cylinder { .. } => "cylinder",
            Chart::Sphere { .. } => "sphere",
            Chart::Parametric(_) => "parametric",
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Chart::Plane | Chart::Cylinder { .. } => Domain::UNBOUNDED,
            Chart::Sphere { .. } => Domain {
                lo: [SPHERE_POLE_MARGIN, f64::NEG_INFINITY],
                hi: [std::f64::consts::PI - SPHERE_POLE_MARGIN, f64::INFINITY],
            },
            Chart::Parametric(p) => p.domain,
        }
    }

    pub fn position<T: Real>(&self, u: [T; 2]) -> Vec3<T> {
        match self {
            Chart::Plane => Vec3([u[0], u[1], T::zero()]),
            Chart::Cylinder { radius } => {
                let a = u[1] / *radius;
                Vec3([u[0], a.cos() * *radius, a.sin() * *radius])
            }
            Chart::Sphere { radius } => {
                let (st, ct) = (u[0].sin(), u[0].cos());
                let (sp, cp) = (u[1].sin(), u[1].cos());
                Vec3([st * cp * *radius, st * sp * *radius, ct * *radius])
            }
            Chart::Parametric(p) => {
                let mut x = [T::zero(); 3];
                for term in &p.terms {
                    x[term.component] += term.scalar(u, T::zero());
                }
                Vec3(x)
            }
        }
    }

    /// `E1, E2` and the unit normal `E3` at `u`, by forward differentiation.
    pub fn frame_vectors<T: Real>(&self, u: [T; 2]) -> [Vec3<T>; 3] {
        let x = self.position([Jet::var(u[0], 0), Jet::var(u[1], 1)]);
        let e1 = x.map(|c| c.g[0]);
        let e2 = x.map(|c| c.g[1]);
        let m = e1.cross(&e2);
        let n = m.scale(m.norm().recip());
        [e1, e2, n]
    }

    pub fn partials(&self, u: [f64; 2], diff: DiffPolicy) -> Result<Partials<f64>> {
        let dom = self.domain();
        match diff {
            DiffPolicy::Exact => {
                if !dom.contains(u) {
                    return Err(ShellError::OutOfDomain { u });
                }
                Ok(jet_partials(|v| self.position(v), u))
            }
            DiffPolicy::Central { h, h2 } => {
                if !dom.contains_box(u, h.max(h2)) {
                    return Err(ShellError::OutOfDomain { u });
                }
                Ok(central_partials(|v| self.position(v), u, h, h2))
            }
        }
    }

    pub fn frame(&self, u: [f64; 2], diff: DiffPolicy) -> Result<SurfaceFrame<f64>> {
        SurfaceFrame::from_partials(&self.partials(u, diff)?)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(ShellError::InvalidInput(format!("radius must be positive, got {r}")))
    }
}

/// How partial derivatives of charts and motions are obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiffPolicy {
    Exact,
    /// Central differences; `h` for first derivatives, `h2` for second.
    Central { h: f64, h2: f64 },
}

impl DiffPolicy {
    pub const DEFAULT_H: f64 = 1e-5;
    pub const DEFAULT_H2: f64 = 1e-4;

    pub fn central() -> Self {
        DiffPolicy::Central { h: Self::DEFAULT_H, h2: Self::DEFAULT_H2 }
    }
}

impl Default for DiffPolicy {
    fn default() -> Self {
        DiffPolicy::Exact
    }
}

/// Value, first and second coordinate derivatives of a vector map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partials<T = f64> {
    pub x: Vec3<T>,
    pub d: [Vec3<T>; 2],
    pub dd: [[Vec3<T>; 2]; 2],
}

pub fn jet_partials<T: Real>(f: impl Fn([Jet<T>; 2]) -> Vec3<Jet<T>>, u: [T; 2]) -> Partials<T> {
    let r = f([Jet::var(u[0], 0), Jet::var(u[1], 1)]);
    Partials {
        x: r.map(|c| c.v),
        d: [r.map(|c| c.g[0]), r.map(|c| c.g[1])],
        dd: [
            [r.map(|c| c.h[0][0]), r.map(|c| c.h[0][1])],
            [r.map(|c| c.h[1][0]), r.map(|c| c.h[1][1])],
        ],
    }
}

pub fn central_partials(
    f: impl Fn([f64; 2]) -> Vec3<f64>,
    u: [f64; 2],
    h: f64,
    h2: f64,
) -> Partials<f64> {
    let at = |a: f64, b: f64| f([u[0] + a, u[1] + b]);
    let x = at(0.0, 0.0);
    let d0 = (at(h, 0.0) - at(-h, 0.0)) * (0.5 / h);
    let d1 = (at(0.0, h) - at(0.0, -h)) * (0.5 / h);
    let inv = 1.0 / (h2 * h2);
    let d00 = (at(h2, 0.0) - x * 2.0 + at(-h2, 0.0)) * inv;
    let d11 = (at(0.0, h2) - x * 2.0 + at(0.0, -h2)) * inv;
    let d01 = (at(h2, h2) - at(h2, -h2) - at(-h2, h2) + at(-h2, -h2)) * (0.25 * inv);
    Partials { x, d: [d0, d1], dd: [[d00, d01], [d01, d11]] }
}

/// All pointwise geometry of one configuration.
///
/// Index conventions: `christoffel[i][a][b]` is `Γ^a_{ib} = E^a . ∂_i E_b`
/// with `a, b` over 0..3 where 2 is the normal; bivector indices run over
/// (1,3), (2,3), (1,2) in that order.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceFrame<T = f64> {
    pub position: Vec3<T>,
    /// `E1, E2, E3`.
    pub e: [Vec3<T>; 3],
    /// `E^1, E^2, E^3 = E3`.
    pub reciprocal: [Vec3<T>; 3],
    pub pseudoscalar: Multivector<T>,
    pub volume: T,
    pub metric: [[T; 2]; 2],
    pub metric_inv: [[T; 2]; 2],
    pub second_form: [[T; 2]; 2],
    pub christoffel: [[[T; 3]; 3]; 2],
    /// `∂_i E_a`.
    pub de: [[Vec3<T>; 3]; 2],
}

impl<T: Real> SurfaceFrame<T> {
    pub fn from_partials(p: &Partials<T>) -> Result<Self> {
        let [e1, e2] = p.d;
        let m = e1.cross(&e2);
        let g = [[e1.dot(&e1), e1.dot(&e2)], [e2.dot(&e1), e2.dot(&e2)]];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if !(det.re() >= DEGENERATE_DET) {
            return Err(ShellError::DegenerateFrame { det: det.re() });
        }
        let volume = m.norm();
        let inv_v = volume.recip();
        let e3 = m.scale(inv_v);
        let inv_det = det.recip();
        let gi = [
            [g[1][1] * inv_det, -g[0][1] * inv_det],
            [-g[1][0] * inv_det, g[0][0] * inv_det],
        ];
        let r1 = e1.scale(gi[0][0]) + e2.scale(gi[0][1]);
        let r2 = e1.scale(gi[1][0]) + e2.scale(gi[1][1]);
        let e = [e1, e2, e3];
        let reciprocal = [r1, r2, e3];

        let mut de = [[Vec3::zero(); 3]; 2];
        for i in 0..2 {
            de[i][0] = p.dd[i][0];
            de[i][1] = p.dd[i][1];
            let dm = p.dd[i][0].cross(&e2) + e1.cross(&p.dd[i][1]);
            de[i][2] = (dm - e3.scale(e3.dot(&dm))).scale(inv_v);
        }
        let mut christoffel = [[[T::zero(); 3]; 3]; 2];
        for i in 0..2 {
            for a in 0..3 {
                for b in 0..3 {
                    christoffel[i][a][b] = reciprocal[a].dot(&de[i][b]);
                }
            }
        }
        let mut second_form = [[T::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                second_form[i][j] = e3.dot(&p.dd[i][j]);
            }
        }
        let pseudoscalar = wedge_vectors(e1, e2).scale(inv_v);
        Ok(SurfaceFrame {
            position: p.x,
            e,
            reciprocal,
            pseudoscalar,
            volume,
            metric: g,
            metric_inv: gi,
            second_form,
            christoffel,
            de,
        })
    }

    pub fn metric_det(&self) -> T {
        self.metric[0][0] * self.metric[1][1] - self.metric[0][1] * self.metric[1][0]
    }

    /// Mixed components `B^i_j = G^{ik} B_kj`, indexed `[i][j]`.
    pub fn shape_operator(&self) -> [[T; 2]; 2] {
        mat_mul2(&self.metric_inv, &self.second_form)
    }

    pub fn bivector_basis(&self) -> BivectorBasis<T> {
        BivectorBasis::new(&self.e, &self.reciprocal)
    }

    /// `Γ^A_{iB} = E^A . ∂_i E_B` evaluated from the definition,
    /// indexed `[i][A][B]`.
    pub fn bivector_christoffels(&self) -> [[[T; 3]; 3]; 2] {
        let basis = self.bivector_basis();
        let [e1, e2, e3] = self.e;
        let mut out = [[[T::zero(); 3]; 3]; 2];
        for i in 0..2 {
            let [d1, d2, d3] = self.de[i];
            let deriv = [
                wedge_vectors(d1, e3) + wedge_vectors(e1, d3),
                wedge_vectors(d2, e3) + wedge_vectors(e2, d3),
                wedge_vectors(d1, e2) + wedge_vectors(e1, d2),
            ];
            for a in 0..3 {
                for b in 0..3 {
                    out[i][a][b] = basis.upper[a].inner(&deriv[b]).scalar_part();
                }
            }
        }
        out
    }

    /// The same coefficients assembled from vector Christoffels and the
    /// second fundamental form.
    pub fn bivector_christoffels_from_identities(&self) -> [[[T; 3]; 3]; 2] {
        let g = &self.christoffel;
        let b = &self.second_form;
        let bm = self.shape_operator();
        let mut out = [[[T::zero(); 3]; 3]; 2];
        for i in 0..2 {
            // columns: (1,3), (2,3), (1,2)
            out[i][0][0] = g[i][0][0];
            out[i][1][0] = g[i][1][0];
            out[i][2][0] = -bm[1][i];
            out[i][0][1] = g[i][0][1];
            out[i][1][1] = g[i][1][1];
            out[i][2][1] = bm[0][i];
            out[i][0][2] = b[i][1];
            out[i][1][2] = -b[i][0];
            out[i][2][2] = g[i][0][0] + g[i][1][1];
        }
        out
    }
}

impl SurfaceFrame<f64> {
    /// Eigenvalues of `B^i_j`, ascending.
    pub fn principal_curvatures(&self) -> [f64; 2] {
        sym_eigen2(&self.shape_operator())
    }
}

/// Eigenvalues of a 2x2 matrix similar to a symmetric one, ascending.
pub fn sym_eigen2(m: &[[f64; 2]; 2]) -> [f64; 2] {
    let half = 0.5 * (m[0][0] + m[1][1]);
    let skew = 0.5 * (m[0][0] - m[1][1]);
    let disc = (skew * skew + m[0][1] * m[1][0]).max(0.0).sqrt();
    [half - disc, half + disc]
}

pub fn mat_mul2<T: Real>(a: &[[T; 2]; 2], b: &[[T; 2]; 2]) -> [[T; 2]; 2] {
    let mut out = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max3(a: &[[[f64; 3]; 3]; 2], b: &[[[f64; 3]; 3]; 2]) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..2 {
            for x in 0..3 {
                for y in 0..3 {
                    m = m.max((a[i][x][y] - b[i][x][y]).abs());
                }
            }
        }
        m
    }

    #[test]
    fn plane_frame_is_identity() {
        let f = Chart::Plane.frame([0.3, -2.0], DiffPolicy::Exact).unwrap();
        assert_eq!(f.e[0], Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(f.e[1], Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(f.e[2], Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(f.volume, 1.0);
        assert_eq!(f.principal_curvatures(), [0.0, 0.0]);
        assert_eq!(f.christoffel, [[[0.0; 3]; 3]; 2]);
    }

    #[test]
    fn normal_is_minus_i3_times_pseudoscalar() {
        let chart = Chart::sphere(1.5).unwrap();
        let f = chart.frame([0.8, 2.0], DiffPolicy::Exact).unwrap();
        let n = f.pseudoscalar.dual();
        assert!((n.vector_part() - f.e[2]).max_abs() < 1e-14);
        assert!((f.pseudoscalar * f.pseudoscalar).approx_eq(&Multivector::scalar(-1.0), 1e-14));
    }

    #[test]
    fn cylinder_christoffels() {
        let r = 2.0;
        let f = Chart::cylinder(r).unwrap().frame([0.4, 0.9], DiffPolicy::Exact).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert!(f.christoffel[i][k][j].abs() < 1e-15);
                }
            }
        }
        assert!((f.christoffel[1][2][1] - 1.0 / r).abs() < 1e-14);
        assert!((f.christoffel[1][1][2] + 1.0 / r).abs() < 1e-14);
        let c = f.principal_curvatures();
        assert!(c[0].abs() < 1e-14 && (c[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn sphere_curvature_sign_and_volume() {
        let f = Chart::sphere(2.0).unwrap().frame([1.0, 0.2], DiffPolicy::Exact).unwrap();
        let c = f.principal_curvatures();
        assert!((c[0] + 0.5).abs() < 1e-12 && (c[1] + 0.5).abs() < 1e-12);
        assert!((f.metric_det() - f.volume * f.volume).abs() < 1e-12);
    }

    #[test]
    fn bivector_routes_agree() {
        let chart = Chart::parametric(
            vec![
                Term::monomial(0, Basis::Ambient, 1.0, [1, 0, 0]),
                Term::monomial(0, Basis::Ambient, 0.3, [0, 1, 0]),
                Term::monomial(1, Basis::Ambient, 1.0, [0, 1, 0]),
                Term::wave(2, Basis::Ambient, 0.2, [1.0, 2.0, 0.0], 0.1),
                Term::monomial(2, Basis::Ambient, 0.1, [1, 1, 0]),
            ],
            Domain::UNBOUNDED,
        )
        .unwrap();
        let f = chart.frame([0.3, -0.4], DiffPolicy::Exact).unwrap();
        let d = max3(&f.bivector_christoffels(), &f.bivector_christoffels_from_identities());
        assert!(d < 1e-13, "{d}");
    }

    #[test]
    fn sphere_poles_are_excluded() {
        let chart = Chart::sphere(1.0).unwrap();
        assert!(matches!(
            chart.frame([0.0, 0.0], DiffPolicy::Exact),
            Err(ShellError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn collapsed_parametrization_is_degenerate() {
        let chart = Chart::parametric(
            vec![Term::monomial(0, Basis::Ambient, 1.0, [1, 0, 0])],
            Domain::UNBOUNDED,
        )
        .unwrap();
        assert!(matches!(
            chart.frame([0.1, 0.1], DiffPolicy::Exact),
            Err(ShellError::DegenerateFrame { .. })
        ));
    }
}
