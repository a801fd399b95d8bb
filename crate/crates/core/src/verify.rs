//! Executable checks grouped into suites.
//!
//! Each check compares a computed quantity with an independent oracle and
//! records the measured discrepancy next to its bound. Random sampling is
//! seeded from [`VerifyOptions::seed`], and the checks run in a fixed order,
//! so a report prints the same bytes on every run.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::autodiff::Jet;
use crate::balance::{
    bivector_work, divergence_bivector, BodyForce, Case, ComponentGrad, Divergence, Probe,
};
use crate::error::{Result, ShellError};
use crate::field::{Basis, Term, VectorField};
use crate::ga3::{Multivector, Vec3};
use crate::kinematics::{Deformation, KinematicOptions, KinematicState};
use crate::linalg::{max_abs2, sub2, Mat2};
use crate::linearized::{
    expansion, first_order_fd, remainders, small_displacement, CylinderCase,
    PerturbedMotion, FD_DELTA,
};
use crate::motion::{Motion, Rigid};
use crate::stress::{
    cauchy_from_first_pk, first_pk_from_cauchy, shear_closure, Material, StressPoint, StressState,
};
use crate::surface::{Chart, DiffPolicy, SurfaceFrame};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Kinematics,
    Stress,
    Balance,
    Linearized,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 5] =
        [Suite::Geometry, Suite::Kinematics, Suite::Stress, Suite::Balance, Suite::Linearized];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Kinematics => "kinematics",
            Suite::Stress => "stress",
            Suite::Balance => "balance",
            Suite::Linearized => "linearized",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = ShellError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometry" => Ok(Suite::Geometry),
            "kinematics" => Ok(Suite::Kinematics),
            "stress" => Ok(Suite::Stress),
            "balance" => Ok(Suite::Balance),
            "linearized" => Ok(Suite::Linearized),
            "all" => Ok(Suite::All),
            other => Err(ShellError::UnknownSuite(other.to_string())),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Replaces the bound of every absolute-tolerance check.
    pub tol: Option<f64>,
    /// Points per axis of the coordinate grids.
    pub grid: usize,
    pub seed: u64,
    /// Adds 0.1 to `S^{12}` in the angular-momentum checks.
    pub inject_asymmetry: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tol: None, grid: 4, seed: 20_240_917, inject_asymmetry: false }
    }
}

impl VerifyOptions {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 2 {
            return Err(ShellError::InvalidInput(format!("grid needs at least 2 points per axis, got {}", self.grid)));
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(ShellError::InvalidInput(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    Within(f64, f64),
    AtLeast(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
    pub note: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        let m = self.measured;
        match self.bound {
            Bound::AtMost(t) => m <= t,
            Bound::Within(lo, hi) => (lo..=hi).contains(&m),
            Bound::AtLeast(t) => m >= t,
        }
    }

    pub fn id(&self) -> String {
        format!("{}/{}", self.suite, self.name)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {} measured={:.3e}", self.id(), self.measured)?;
        match self.bound {
            Bound::AtMost(t) => write!(f, " tol={t:.1e}")?,
            Bound::Within(lo, hi) => write!(f, " range=[{lo}, {hi}]")?,
            Bound::AtLeast(t) => write!(f, " min={t}")?,
        }
        if let Some(n) = &self.note {
            write!(f, " {n}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Checks whose name starts with `prefix` in `suite`.
    pub fn select<'a>(&'a self, suite: &'a str, prefix: &'a str) -> impl Iterator<Item = &'a Check> {
        self.checks.iter().filter(move |c| c.suite == suite && c.name.starts_with(prefix))
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        let verdict = if failed == 0 { "PASS" } else { "FAIL" };
        writeln!(f, "{verdict}: {} checks, {failed} failed", self.checks.len())
    }
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> Result<Report> {
    opts.validate()?;
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::MODULES.to_vec(),
        s => vec![s],
    };
    let mut report = Report::default();
    for s in suites {
        let mut ctx = Ctx { opts, suite: s.name(), checks: Vec::new() };
        match s {
            Suite::Geometry => geometry(&mut ctx),
            Suite::Kinematics => kinematics(&mut ctx),
            Suite::Stress => stress(&mut ctx),
            Suite::Balance => balance(&mut ctx),
            Suite::Linearized => linearized(&mut ctx),
            Suite::All => unreachable!(),
        }
        report.checks.extend(ctx.checks);
    }
    Ok(report)
}

struct Ctx<'a> {
    opts: &'a VerifyOptions,
    suite: &'static str,
    checks: Vec<Check>,
}

impl Ctx<'_> {
    fn push(&mut self, name: String, measured: Result<f64>, bound: Bound, note: Option<String>) {
        let (measured, note) = match measured {
            Ok(v) => (v, note),
            Err(e) => (f64::NAN, Some(format!("error=\"{e}\""))),
        };
        self.checks.push(Check { suite: self.suite, name, measured, bound, note });
    }

    fn at_most(&mut self, name: impl Into<String>, measured: Result<f64>, tol: f64) {
        let tol = self.opts.tol.unwrap_or(tol);
        self.push(name.into(), measured, Bound::AtMost(tol), None);
    }

    fn at_most_noted(&mut self, name: impl Into<String>, measured: Result<(f64, String)>, tol: f64) {
        let tol = self.opts.tol.unwrap_or(tol);
        let (m, note) = match measured {
            Ok((m, n)) => (Ok(m), Some(n)),
            Err(e) => (Err(e), None),
        };
        self.push(name.into(), m, Bound::AtMost(tol), note);
    }

    fn order_two(&mut self, name: impl Into<String>, errors: Result<(f64, f64)>) {
        let (m, note) = match errors {
            Ok((a, b)) => (Ok(a / b), Some(format!("errors=({a:.3e}, {b:.3e})"))),
            Err(e) => (Err(e), None),
        };
        self.push(name.into(), m, Bound::Within(3.5, 4.5), note);
    }

    fn at_least(&mut self, name: impl Into<String>, measured: Result<f64>, min: f64) {
        self.push(name.into(), measured, Bound::AtLeast(min), None);
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.opts.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
    }
}

/// Maximum that propagates NaN instead of skipping it.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, nan_max)
}

fn max_over<I: IntoIterator>(items: I, mut f: impl FnMut(I::Item) -> Result<f64>) -> Result<f64> {
    let mut m = 0.0;
    for x in items {
        m = nan_max(m, f(x)?);
    }
    Ok(m)
}

fn mat_gap(a: &Mat2, b: &Mat2) -> f64 {
    max_abs2(&sub2(a, b))
}

fn rand3(rng: &mut ChaCha8Rng) -> [f64; 3] {
    std::array::from_fn(|_| rng.gen_range(-1.0..1.0))
}

fn label(chart: &Chart) -> String {
    match chart {
        Chart::Cylinder { radius } | Chart::Sphere { radius } => format!("{}-R{radius}", chart.name()),
        _ => chart.name().to_string(),
    }
}

fn sample_point(chart: &Chart, rng: &mut ChaCha8Rng) -> [f64; 2] {
    match chart {
        Chart::Sphere { .. } => [rng.gen_range(0.05..PI - 0.05), rng.gen_range(-PI..PI)],
        Chart::Cylinder { radius } => [rng.gen_range(-2.0..2.0), rng.gen_range(-PI * radius..PI * radius)],
        _ => [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
    }
}

fn grid(chart: &Chart, n: usize) -> Vec<[f64; 2]> {
    let (lo, hi) = match chart {
        Chart::Sphere { .. } => ([0.5, -1.0], [2.6, 1.0]),
        _ => ([-1.0, -1.0], [1.0, 1.0]),
    };
    let at = |k: usize, a: usize| lo[k] + (hi[k] - lo[k]) * a as f64 / (n - 1) as f64;
    (0..n).flat_map(|a| (0..n).map(move |b| [at(0, a), at(1, b)])).collect()
}

fn cylinder(r: f64) -> Chart {
    Chart::Cylinder { radius: r }
}

fn sphere(r: f64) -> Chart {
    Chart::Sphere { radius: r }
}

// ---------------------------------------------------------------- geometry

const GEOMETRY_SAMPLES: usize = 100;
const RANDOM_PAIRS: usize = 1000;

fn geometry(ctx: &mut Ctx) {
    let charts = [Chart::Plane, cylinder(0.5), cylinder(2.0), sphere(1.0), sphere(3.0)];
    let central = DiffPolicy::central();
    let mut rng = ctx.rng(1);
    for chart in &charts {
        let name = label(chart);
        let pts: Vec<[f64; 2]> = (0..GEOMETRY_SAMPLES).map(|_| sample_point(chart, &mut rng)).collect();
        let frames = |p: DiffPolicy| -> Result<Vec<SurfaceFrame>> { pts.iter().map(|u| chart.frame(*u, p)).collect() };
        let exact = frames(DiffPolicy::Exact);
        let fd = frames(central);
        let pairs = exact.and_then(|e| fd.map(|f| (e, f)));

        ctx.at_most(
            format!("det_metric_volume/{name}"),
            pairs.clone().map(|(ex, _)| max_of(ex.iter().map(|f| (f.metric_det() - f.volume * f.volume).abs()))),
            1e-10,
        );
        ctx.at_most(
            format!("det_metric_volume_fd/{name}"),
            pairs
                .clone()
                .map(|(ex, fd)| max_of(ex.iter().zip(&fd).map(|(e, f)| (f.metric_det() - e.volume * e.volume).abs()))),
            1e-6,
        );
        ctx.at_most(
            format!("bivector_christoffel/{name}"),
            pairs.clone().map(|(ex, _)| {
                max_of(ex.iter().map(|f| christoffel_gap(&f.bivector_christoffels(), &f.bivector_christoffels_from_identities())))
            }),
            1e-10,
        );
        ctx.at_most(
            format!("bivector_christoffel_fd/{name}"),
            pairs.clone().map(|(ex, fd)| {
                max_of(
                    ex.iter()
                        .zip(&fd)
                        .map(|(e, f)| christoffel_gap(&e.bivector_christoffels(), &f.bivector_christoffels_from_identities())),
                )
            }),
            1e-6,
        );
        ctx.at_most(
            format!("curvature_relations/{name}"),
            pairs.clone().map(|(ex, _)| max_of(ex.iter().map(|f| curvature_relation_gap(f, f)))),
            1e-10,
        );
        ctx.at_most(
            format!("curvature_relations_fd/{name}"),
            pairs.clone().map(|(ex, fd)| max_of(ex.iter().zip(&fd).map(|(e, f)| curvature_relation_gap(f, e)))),
            1e-6,
        );
        ctx.at_most(
            format!("frame_duality/{name}"),
            pairs.clone().map(|(ex, _)| max_of(ex.iter().map(frame_duality_gap))),
            1e-10,
        );
        let expected = principal_curvatures_of(chart);
        ctx.at_most(
            format!("principal_curvatures/{name}"),
            pairs.clone().map(|(ex, _)| {
                max_of(ex.iter().map(|f| {
                    let k = f.principal_curvatures();
                    nan_max((k[0] - expected[0]).abs(), (k[1] - expected[1]).abs())
                }))
            }),
            1e-8,
        );
        if !matches!(chart, Chart::Plane) {
            let u = pts[0];
            let gap = |h: f64| -> Result<f64> {
                let e = chart.frame(u, DiffPolicy::Exact)?;
                let f = chart.frame(u, DiffPolicy::Central { h, h2: h })?;
                let mut m = max_of((0..2).map(|i| (f.e[i] - e.e[i]).max_abs()));
                m = nan_max(m, mat_gap(&f.second_form, &e.second_form));
                m = nan_max(m, christoffel_gap(&f.bivector_christoffels(), &e.bivector_christoffels()));
                Ok(m)
            };
            ctx.order_two(format!("central_difference_order/{name}"), gap(1e-2).and_then(|a| Ok((a, gap(5e-3)?))));
        }
    }
    ga_checks(ctx);
}

fn christoffel_gap(a: &[[[f64; 3]; 3]; 2], b: &[[[f64; 3]; 3]; 2]) -> f64 {
    max_of((0..2).flat_map(|i| (0..3).flat_map(move |x| (0..3).map(move |y| (a[i][x][y] - b[i][x][y]).abs()))))
}

/// `Γ^3_ij = B_ij`, `Γ^i_{j3} = -B^i_j`, `Γ^3_{i3} = 0`, with the
/// Christoffels of `f` and the curvature of `r`.
fn curvature_relation_gap(f: &SurfaceFrame, r: &SurfaceFrame) -> f64 {
    let shape = r.shape_operator();
    let mut m = 0.0;
    for i in 0..2 {
        m = nan_max(m, f.christoffel[i][2][2].abs());
        for j in 0..2 {
            m = nan_max(m, (f.christoffel[i][2][j] - r.second_form[i][j]).abs());
            m = nan_max(m, (f.christoffel[j][i][2] + shape[i][j]).abs());
        }
    }
    m
}

/// `E^i . E_j = δ`, `E3 . E_i = 0`, `|E3| = 1`, `E3 = -I3 I`.
fn frame_duality_gap(f: &SurfaceFrame) -> f64 {
    let mut m = (f.e[2].norm() - 1.0).abs();
    for i in 0..2 {
        m = nan_max(m, f.e[2].dot(&f.e[i]).abs());
        for j in 0..2 {
            let d = if i == j { 1.0 } else { 0.0 };
            m = nan_max(m, (f.reciprocal[i].dot(&f.e[j]) - d).abs());
        }
    }
    nan_max(m, (f.pseudoscalar.dual().vector_part() - f.e[2]).max_abs())
}

fn principal_curvatures_of(chart: &Chart) -> [f64; 2] {
    match chart {
        Chart::Cylinder { radius } => [0.0, 1.0 / radius],
        Chart::Sphere { radius } => [-1.0 / radius, -1.0 / radius],
        _ => [0.0, 0.0],
    }
}

fn random_frame(rng: &mut ChaCha8Rng) -> ([Vec3; 3], [Vec3; 3]) {
    let e: [Vec3; 3] = std::array::from_fn(|k| {
        let mut v = rand3(rng).map(|x| 0.4 * x);
        v[k] += 1.0;
        Vec3(v)
    });
    let vol = e[0].dot(&e[1].cross(&e[2]));
    let r = [e[1].cross(&e[2]).scale(1.0 / vol), e[2].cross(&e[0]).scale(1.0 / vol), e[0].cross(&e[1]).scale(1.0 / vol)];
    (e, r)
}

fn ga_checks(ctx: &mut Ctx) {
    let mut rng = ctx.rng(2);
    let mut cross = 0.0;
    let mut split = 0.0;
    for _ in 0..RANDOM_PAIRS {
        let (a, b) = (Vec3(rand3(&mut rng)), Vec3(rand3(&mut rng)));
        let (ma, mb) = (Multivector::vector(a), Multivector::vector(b));
        let wedge = ma.wedge(&mb);
        cross = nan_max(cross, (wedge.dual().vector_part() - a.cross(&b)).max_abs());
        let lhs = ma.gp(&mb);
        let rhs = ma.inner(&mb) + wedge;
        split = nan_max(split, (lhs - rhs).max_abs());
        let c = Multivector::bivector(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        split = nan_max(split, (ma.gp(&c) - ma.inner(&c) - ma.wedge(&c)).max_abs());
    }
    ctx.at_most("ga/cross_product_is_dual_wedge", Ok(cross), 1e-12);
    ctx.at_most("ga/product_splits_into_inner_and_outer", Ok(split), 1e-12);
    let i3 = Multivector::<f64>::pseudoscalar();
    ctx.at_most("ga/pseudoscalar_squares_to_minus_one", Ok((i3.gp(&i3) + Multivector::scalar(1.0)).max_abs()), 1e-15);

    let mut duality = 0.0;
    let mut round_trip = 0.0;
    for _ in 0..RANDOM_PAIRS {
        let (e, r) = random_frame(&mut rng);
        let basis = crate::ga3::BivectorBasis::new(&e, &r);
        for a in 0..3 {
            for b in 0..3 {
                let d = if a == b { 1.0 } else { 0.0 };
                duality = nan_max(duality, (basis.upper[a].inner(&basis.lower[b]).scalar_part() - d).abs());
            }
        }
        let w = Multivector::bivector(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let back = basis.from_upper(basis.upper_components(&w));
        let back2 = basis.from_lower(basis.lower_components(&w));
        round_trip = nan_max(round_trip, nan_max((back - w).max_abs(), (back2 - w).max_abs()));
    }
    ctx.at_most("ga/bivector_basis_duality", Ok(duality), 1e-12);
    ctx.at_most("ga/bivector_component_round_trip", Ok(round_trip), 1e-12);
}

// -------------------------------------------------------------- kinematics

fn kinematics(ctx: &mut Ctx) {
    let opts = KinematicOptions::default();
    let material = Material { young: 1.0, poisson: 0.3, thickness: 0.1, density: 1.0 };
    let charts = [Chart::Plane, cylinder(2.0), sphere(1.0), cylinder(0.5), sphere(3.0)];
    let mut rng = ctx.rng(3);
    for (k, chart) in charts.iter().enumerate() {
        let rigid = Rigid::new(
            rand3(&mut rng),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-PI..PI),
            rand3(&mut rng),
            rand3(&mut rng),
        );
        let t = rng.gen_range(0.0..1.0);
        let measured = rigid.and_then(|r| {
            let motion = Motion::Rigid(r);
            max_over(grid(chart, ctx.opts.grid), |u| {
                let s = KinematicState::evaluate(chart, &motion, u, t, &opts)?;
                let gi = &s.reference.metric_inv;
                Ok(max_of([
                    max_abs2(&s.strain),
                    max_abs2(&s.curvature_change),
                    max_abs2(&s.strain_rate),
                    max_abs2(&s.curvature_rate),
                    max_abs2(&material.modified_stress(&s.strain, gi)),
                    max_abs2(&material.couple_stress(&s.curvature_change, gi)),
                ]))
            })
        });
        ctx.at_most(format!("rigid_annihilation/{}-{}", k + 1, label(chart)), measured, 1e-8);
    }

    for (name, chart, motion, pts) in rate_motions() {
        let t = 0.37;
        let err = |dt: f64, bending: bool| -> Result<f64> {
            max_over(&pts, |u| {
                let s = KinematicState::evaluate(&chart, &motion, *u, t, &opts)?;
                let a = Deformation::<f64>::evaluate(&chart, &motion, *u, t + dt)?;
                let b = Deformation::<f64>::evaluate(&chart, &motion, *u, t - dt)?;
                let (rate, pa, pb) = if bending {
                    (s.curvature_rate, a.curvature_change, b.curvature_change)
                } else {
                    (s.strain_rate, a.strain, b.strain)
                };
                let fd: Mat2 = std::array::from_fn(|i| std::array::from_fn(|j| (pa[i][j] - pb[i][j]) / (2.0 * dt)));
                Ok(mat_gap(&rate, &fd))
            })
        };
        ctx.order_two(format!("strain_rate_order/{name}"), err(1e-4, false).and_then(|a| Ok((a, err(5e-5, false)?))));
        ctx.order_two(format!("bending_rate_order/{name}"), err(1e-4, true).and_then(|a| Ok((a, err(5e-5, true)?))));
        let spin = max_over(&pts, |u| {
            let s = KinematicState::evaluate(&chart, &motion, *u, t, &opts)?;
            Ok(max_of(s.spatial.e.iter().map(|y| {
                let oracle = Multivector::vector(*y).inner(&s.omega).vector_part();
                (s.spin(*y) - oracle).max_abs()
            })))
        });
        ctx.at_most(format!("spin_is_inner_product_with_omega/{name}"), spin, 1e-10);
        let pull_back = max_over(&pts, |u| {
            let s = KinematicState::evaluate(&chart, &motion, *u, t, &opts)?;
            let mut l = crate::linalg::zero3();
            for i in 0..2 {
                l = crate::linalg::add3(&l, &crate::linalg::outer(s.velocity_gradient[i], s.spatial.reciprocal[i]));
            }
            let n = crate::linalg::scale3(&crate::linalg::add3(&l, &crate::linalg::transpose3(&l)), 0.5);
            let m: Mat2 = std::array::from_fn(|i| {
                std::array::from_fn(|j| s.spatial.e[i].dot(&crate::linalg::apply3(&n, s.spatial.e[j])))
            });
            Ok(mat_gap(&m, &s.strain_rate))
        });
        ctx.at_most(format!("pulled_back_stretching/{name}"), pull_back, 1e-10);
        let omega = max_over(&pts, |u| {
            let s = KinematicState::evaluate(&chart, &motion, *u, t, &opts)?;
            let v3: [f64; 2] = std::array::from_fn(|i| s.velocity_component_gradient(2, i));
            let lower = s.omega_lower();
            let upper = s.omega_upper();
            let gi = &s.spatial.metric_inv;
            let mut m = 0.0;
            for i in 0..2 {
                let raised = gi[i][0] * v3[0] + gi[i][1] * v3[1];
                m = nan_max(m, (lower[i] + v3[i]).abs());
                m = nan_max(m, (upper[i] - raised).abs());
            }
            Ok(m)
        });
        ctx.at_most(format!("omega_normal_components/{name}"), omega, 1e-10);
    }

    let spin = Rigid::rotation([0.0, 0.0, 1.0], 0.7).and_then(|r| {
        let s = KinematicState::evaluate(
            &Chart::Plane,
            &Motion::Rigid(r),
            [0.3, -0.2],
            0.4,
            &KinematicOptions { diff: DiffPolicy::central(), ..opts },
        )?;
        Ok((s.angular_velocity() - Vec3::new(0.0, 0.0, 0.7)).max_abs())
    });
    ctx.at_most("plane_rotation_angular_velocity", spin, 1e-6);

    let identity = max_over(grid(&sphere(1.0), ctx.opts.grid), |u| {
        let s = KinematicState::evaluate(&sphere(1.0), &Motion::Identity, u, 0.0, &opts)?;
        Ok(max_of([
            max_abs2(&s.strain),
            max_abs2(&s.curvature_change),
            (s.det_f - 1.0).abs(),
            (s.stretches[0] - 1.0).abs(),
            (s.stretches[1] - 1.0).abs(),
        ]))
    });
    ctx.at_most("identity_motion", identity, 1e-14);

    for chart in [Chart::Plane, cylinder(2.0)] {
        let m = KinematicState::evaluate(&chart, &Motion::UniaxialStrain { strain: 0.1, rate: 0.0 }, [0.3, 0.2], 0.0, &opts)
            .map(|s| {
                max_of([
                    (s.strain[0][0] - 0.105).abs(),
                    s.strain[0][1].abs(),
                    s.strain[1][1].abs(),
                    (s.det_f - 1.1).abs(),
                    (s.stretches[0] - 1.0).abs(),
                    (s.stretches[1] - 1.1).abs(),
                ])
            });
        ctx.at_most(format!("uniaxial_strain/{}", label(&chart)), m, 1e-14);
    }

    let (r, delta) = (2.0, 0.05);
    let m = KinematicState::evaluate(&cylinder(r), &Motion::Inflation { delta, rate: 0.0 }, [0.1, 0.7], 0.0, &opts)
        .map(|s| {
            max_of([
                (s.strain[1][1] - 0.5 * ((1.0 + delta) * (1.0 + delta) - 1.0)).abs(),
                (s.curvature_change[1][1] - delta / r).abs(),
                s.curvature_change[0][0].abs(),
                s.curvature_change[0][1].abs(),
            ])
        });
    ctx.at_most("cylinder_inflation", m, 1e-12);
}

fn rate_motions() -> Vec<(&'static str, Chart, Motion, Vec<[f64; 2]>)> {
    let timed = |component, coeff, powers, freq, phase| Term { component, basis: Basis::Ambient, coeff, powers, freq, phase };
    let plane_base = Motion::Displacement(VectorField::new(vec![
        Term::wave(2, Basis::Ambient, 0.2, [1.2, 0.8, 2.0], 0.0),
        timed(0, 0.1, [1, 0, 0], [0.0, 0.0, 1.3], 0.2),
    ]));
    let plane = match Rigid::new([0.3, 0.2, 1.0], 0.8, 0.1, [0.1, 0.0, 0.2], [0.0; 3]) {
        Ok(rigid) => Motion::Superposed { rigid, base: Box::new(plane_base) },
        Err(_) => plane_base,
    };
    vec![
        (
            "cylinder-wave",
            cylinder(1.5),
            Motion::Displacement(VectorField::new(vec![
                Term::wave(2, Basis::Frame, 0.2, [1.0, 0.7, 2.0], 0.3),
                Term::wave(0, Basis::Ambient, 0.1, [0.5, 0.0, 1.5], 0.0),
            ])),
            vec![[0.3, 0.5], [-0.4, 1.1], [0.8, -0.6]],
        ),
        (
            "sphere-breathing",
            sphere(1.0),
            Motion::Displacement(VectorField::new(vec![
                Term::wave(2, Basis::Frame, 0.15, [0.0, 0.0, 2.5], 0.1),
                Term::wave(1, Basis::Frame, 0.1, [1.0, 1.0, 1.7], 0.4),
            ])),
            vec![[1.0, 0.2], [0.7, -0.9], [2.1, 1.4]],
        ),
        ("plane-rotating-wave", Chart::Plane, plane, vec![[0.3, -0.2], [-0.7, 0.4], [1.0, 0.9]]),
    ]
}

// ------------------------------------------------------------------ stress

fn random_spd(rng: &mut ChaCha8Rng) -> Mat2 {
    let a: Mat2 = std::array::from_fn(|i| {
        std::array::from_fn(|j| rng.gen_range(-0.3..0.3) + if i == j { 1.0 } else { 0.0 })
    });
    std::array::from_fn(|i| std::array::from_fn(|j| a[0][i] * a[0][j] + a[1][i] * a[1][j]))
}

fn random_sym(rng: &mut ChaCha8Rng, scale: f64) -> Mat2 {
    let (a, b, c) = (rng.gen_range(-scale..scale), rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
    [[a, b], [b, c]]
}

fn random_material(rng: &mut ChaCha8Rng) -> Material {
    Material {
        young: rng.gen_range(0.5..3.0),
        poisson: rng.gen_range(0.0..0.45),
        thickness: rng.gen_range(0.05..0.3),
        density: rng.gen_range(0.5..2.0),
    }
}

fn stress(ctx: &mut Ctx) {
    const DRAWS: usize = 100;
    const STEP: f64 = 1e-6;
    let mut rng = ctx.rng(4);
    let (mut grad_s, mut grad_n, mut min_energy, mut symmetry) = (0.0, 0.0, f64::INFINITY, 0.0);
    for _ in 0..DRAWS {
        let m = random_material(&mut rng);
        let gi = crate::linalg::inv2(&random_spd(&mut rng));
        let e = random_sym(&mut rng, 0.1);
        let h = random_sym(&mut rng, 0.5);
        let s = m.modified_stress(&e, &gi);
        let n = m.couple_stress(&h, &gi);
        let energy = |e: &Mat2, h: &Mat2| m.energy_density(e, h, &gi);
        let fd = |bending: bool, i: usize, j: usize| {
            let (mut p, mut q) = if bending { (h, h) } else { (e, e) };
            p[i][j] += STEP;
            q[i][j] -= STEP;
            let (a, b) = if bending { (energy(&e, &p), energy(&e, &q)) } else { (energy(&p, &h), energy(&q, &h)) };
            (a - b) / (2.0 * STEP)
        };
        let rel = |analytic: &Mat2, bending: bool| {
            let scale = max_abs2(analytic).max(f64::MIN_POSITIVE);
            max_of((0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (fd(bending, i, j) - analytic[i][j]).abs())) / scale
        };
        grad_s = nan_max(grad_s, rel(&s, false));
        grad_n = nan_max(grad_n, rel(&n, true));
        min_energy = min_energy.min(energy(&e, &h));
        symmetry = nan_max(symmetry, nan_max((s[0][1] - s[1][0]).abs(), (n[0][1] - n[1][0]).abs()));
    }
    ctx.at_most("constitutive_gradient/modified_stress", Ok(grad_s), 1e-6);
    ctx.at_most("constitutive_gradient/couple_stress", Ok(grad_n), 1e-6);
    ctx.at_least("energy_nonnegative", Ok(min_energy), 0.0);
    ctx.at_most("constitutive_symmetry", Ok(symmetry), 1e-14);

    let m = Material { young: 1.0, poisson: 0.3, thickness: 0.1, density: 1.0 };
    let id = [[1.0, 0.0], [0.0, 1.0]];
    let eps = 0.01;
    let k = 1.0 * 0.1 / (1.0 - 0.09);
    let oracle = 0.5 * k * ((1.0 - 0.3) * 2.0 * eps * eps + 0.3 * 4.0 * eps * eps);
    let got = m.energy_density(&[[eps, 0.0], [0.0, eps]], &[[0.0; 2]; 2], &id);
    ctx.at_most("energy_trace_strain_example", Ok((got - oracle).abs()), 1e-15);

    let thick = Material { thickness: 0.2, ..m };
    let (e, h) = ([[0.02, 0.01], [0.01, -0.03]], [[0.3, -0.1], [-0.1, 0.2]]);
    let zero = [[0.0; 2]; 2];
    let membrane = thick.energy_density(&e, &zero, &id) / m.energy_density(&e, &zero, &id);
    let bending = thick.energy_density(&zero, &h, &id) / m.energy_density(&zero, &h, &id);
    ctx.at_most("thickness_scaling/membrane", Ok((membrane - 2.0).abs()), 1e-12);
    ctx.at_most("thickness_scaling/bending", Ok((bending - 8.0).abs()), 1e-12);

    let motion = Motion::Displacement(VectorField::new(vec![
        Term::wave(2, Basis::Frame, 0.1, [1.0, 0.8, 1.0], 0.3),
        Term::monomial(0, Basis::Ambient, 0.05, [1, 1, 0]),
    ]));
    let chart = sphere(1.2);
    let round_trip = max_over(grid(&chart, ctx.opts.grid), |u| {
        let s = StressState::evaluate(&chart, &motion, &m, [0.0; 2], u, 0.2)?;
        let p = StressPoint::<f64>::evaluate(&chart, &motion, &m, [0.0; 2], u, 0.2)?;
        let d = &p.deformation;
        let sigma = cauchy_from_first_pk(&s.first_pk, &d.spatial, d.det_f);
        let back = first_pk_from_cauchy(&sigma, &d.spatial, d.det_f);
        Ok(max_of((0..2).map(|i| (back[i] - s.first_pk[i]).max_abs())))
    });
    ctx.at_most("cauchy_round_trip", round_trip, 1e-12);

    let plane = Chart::Plane.frame([0.2, 0.3], DiffPolicy::Exact);
    let closure = plane.map(|f| {
        let couple = [[0.3, 0.1], [0.1, -0.2]];
        let mut grad = [[[0.0; 2]; 2]; 2];
        let uniform = shear_closure(&couple, &grad, &f, &f, [0.0; 2], 1.0);
        let moment = shear_closure(&couple, &grad, &f, &f, [0.2, 0.0], 1.5);
        grad[0][0][0] = 1.0;
        let linear = shear_closure(&couple, &grad, &f, &f, [0.0; 2], 1.0);
        max_of([
            uniform[0].abs(),
            uniform[1].abs(),
            (moment[0] + 1.5 * 0.2).abs(),
            moment[1].abs(),
            (linear[0] + 1.0).abs(),
            linear[1].abs(),
        ])
    });
    ctx.at_most("shear_closure_examples", closure, 1e-14);

    let pre = Material { young: 1.3, poisson: 0.25, thickness: 0.1, density: 1.0 };
    let strain = 0.1;
    let bg = StressPoint::<f64>::evaluate(
        &cylinder(2.0),
        &Motion::UniaxialStrain { strain, rate: 0.0 },
        &pre,
        [0.0; 2],
        [0.4, 0.9],
        0.0,
    )
    .map(|p| {
        let e0 = strain + 0.5 * strain * strain;
        let k = pre.membrane_stiffness();
        max_of([
            (p.second_pk[0][0] - k * e0).abs(),
            (p.second_pk[1][1] - k * pre.poisson * e0).abs(),
            p.second_pk[0][1].abs(),
            p.second_pk[1][0].abs(),
            p.second_pk[2][0].abs(),
            p.second_pk[2][1].abs(),
        ])
    });
    ctx.at_most("uniaxial_cylinder_background_stress", bg, 1e-12);
}

// ----------------------------------------------------------------- balance

fn balance_material() -> Material {
    Material { young: 2.0, poisson: 0.25, thickness: 0.2, density: 1.5 }
}

fn bending_motion() -> Motion {
    Motion::Displacement(VectorField::new(vec![
        Term::wave(2, Basis::Frame, 0.05, [1.0, 0.8, 1.5], 0.3),
        Term::monomial(0, Basis::Ambient, 0.04, [1, 1, 1]),
        Term::wave(1, Basis::Ambient, 0.03, [0.0, 1.2, 0.0], 0.0),
    ]))
}

fn stretching_motion() -> Motion {
    let timed = |component, coeff, powers, freq, phase| Term { component, basis: Basis::Ambient, coeff, powers, freq, phase };
    Motion::Displacement(VectorField::new(vec![
        timed(0, 0.1, [1, 0, 0], [0.0, 0.0, 1.5], 0.2),
        timed(1, 0.05, [0, 1, 0], [0.0, 0.0, 1.1], 0.0),
        Term::wave(0, Basis::Ambient, 0.05, [0.7, 0.3, 1.2], 0.0),
    ]))
}

fn flexural_wave() -> Motion {
    Motion::Displacement(VectorField::new(vec![Term::wave(2, Basis::Ambient, 0.02, [1.0, 0.6, 1.3], 0.0)]))
}

fn balance(ctx: &mut Ctx) {
    let material = balance_material();
    let t = 0.4;
    let momentum_cases = [
        ("cylinder-bending", cylinder(1.5), bending_motion(), vec![[0.3, 0.5], [-0.4, 0.2], [0.6, -0.3]]),
        ("sphere-bending", sphere(1.2), bending_motion(), vec![[0.9, 0.3], [1.4, -0.5], [2.0, 0.8]]),
        ("plane-stretching", Chart::Plane, stretching_motion(), vec![[0.3, 0.5], [-0.4, 0.2], [0.6, -0.3]]),
    ];
    for (name, chart, motion, pts) in &momentum_cases {
        let mut case = Case::new(chart.clone(), motion.clone(), material);
        case.body_force = BodyForce::Manufactured;
        case.divergence = Divergence::Exact;
        ctx.at_most(
            format!("momentum_manufactured_exact/{name}"),
            max_over(pts, |u| Ok(case.momentum_residual(*u, t)?.max_abs())),
            1e-10,
        );
        let mut err = |h: f64| {
            case.divergence = Divergence::Central { h };
            max_over(pts, |u| Ok(case.momentum_residual(*u, t)?.max_abs()))
        };
        let errors = err(1e-2).and_then(|a| Ok((a, err(5e-3)?)));
        ctx.order_two(format!("momentum_manufactured_order/{name}"), errors);
        let def = divergence_definition_gap(&case, pts[0], t);
        ctx.at_most(format!("divergence_matches_definition/{name}"), def, 1e-10);
    }

    let accel = 0.8;
    let mut lift = Case::new(
        cylinder(1.0),
        Motion::Displacement(VectorField::new(vec![Term::monomial(2, Basis::Ambient, 0.5 * accel, [0, 0, 2])])),
        material,
    );
    lift.body_force = BodyForce::Constant(Vec3::new(0.0, 0.0, accel));
    lift.divergence = Divergence::Exact;
    ctx.at_most(
        "momentum_uniform_acceleration",
        max_over(grid(&lift.chart, ctx.opts.grid), |u| Ok(lift.momentum_residual(u, t)?.max_abs())),
        1e-12,
    );

    let probe = if ctx.opts.inject_asymmetry { Probe { s12_offset: 0.1, ..Probe::default() } } else { Probe::default() };
    let angular_cases = [
        ("cylinder-bending", cylinder(0.8), [0.1, -0.05]),
        ("sphere-bending", sphere(1.2), [-0.02, 0.03]),
        ("plane-bending", Chart::Plane, [0.0, 0.04]),
    ];
    for (name, chart, moment) in &angular_cases {
        let mut case = Case::new(chart.clone(), bending_motion(), material);
        case.body_moment = *moment;
        let pts = grid(chart, ctx.opts.grid);
        for (k, comp) in ["13", "23", "12"].iter().enumerate() {
            let r = max_over(&pts, |u| Ok(case.angular_momentum_residual(*u, 0.3, probe)?[k].abs()));
            ctx.at_most(format!("angular_momentum/{name}/{comp}"), r, 1e-10);
        }
    }
    let mut case = Case::new(cylinder(0.8), bending_motion(), material);
    case.body_moment = [0.1, -0.05];
    let u = [0.2, 0.7];
    let r = case
        .angular_momentum_residual(u, 0.3, Probe { s12_offset: 0.1, ..Probe::default() })
        .map(|r| ((r[2].abs() - 0.1).abs(), format!("r12={:.12}", r[2])));
    ctx.at_most_noted("angular_momentum_probe/s12_offset", r, 1e-10);
    let delta = 0.01;
    let r = case
        .angular_momentum_residual(u, 0.3, Probe { moment_offset: [delta, 0.0], ..Probe::default() })
        .map(|r| ((r[0] - material.density * delta).abs(), format!("r13={:.12}", r[0])));
    ctx.at_most_noted("angular_momentum_probe/body_moment", r, 1e-10);

    let energy_cases = [
        ("plane-stretching", Chart::Plane, stretching_motion(), [0.3, 0.2]),
        ("plane-flexural-wave", Chart::Plane, flexural_wave(), [0.3, 0.2]),
        ("cylinder-bending", cylinder(1.5), bending_motion(), [0.3, 0.5]),
    ];
    for (name, chart, motion, u) in &energy_cases {
        let case = Case::new(chart.clone(), motion.clone(), material);
        let err = |dt: f64| case.energy_residual(*u, 0.5, dt).map(f64::abs);
        ctx.order_two(format!("energy_closure_order/{name}"), err(1e-3).and_then(|a| Ok((a, err(5e-4)?))));
    }
    let share = KinematicState::evaluate(&Chart::Plane, &flexural_wave(), [0.3, 0.2], 0.5, &KinematicOptions::default())
        .map(|k| {
            let gi = &k.reference.metric_inv;
            let s = material.modified_stress(&k.strain, gi);
            let n = material.couple_stress(&k.curvature_change, gi);
            let contract = |a: &Mat2, b: &Mat2| (0..2).flat_map(|i| (0..2).map(move |j| a[i][j] * b[i][j])).sum::<f64>();
            let (pm, pb) = (contract(&s, &k.strain_rate).abs(), contract(&n, &k.curvature_rate).abs());
            pb / (pm + pb)
        });
    ctx.at_least("energy_bending_power_share/plane-flexural-wave", share, 0.5);

    for (name, chart, motion, _) in &momentum_cases {
        let case = Case::new(chart.clone(), motion.clone(), material);
        let m = max_over(grid(chart, ctx.opts.grid), |u| Ok(case.mass_residual(u, t, 1e-4)?.abs()));
        ctx.at_most(format!("mass_conservation/{name}"), m, 1e-6);
    }

    let mut rng = ctx.rng(5);
    let mut work = 0.0;
    for _ in 0..RANDOM_PAIRS {
        let w = Multivector::bivector(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let q = Multivector::bivector(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let oracle = w.dual().vector_part().dot(&q.dual().vector_part());
        work = nan_max(work, (bivector_work(&w, &q) - oracle).abs());
    }
    ctx.at_most("bivector_work_random_pairs", Ok(work), 1e-12);
    let i3 = Multivector::<f64>::pseudoscalar();
    let w = i3.gp(&Multivector::vector(Vec3::new(0.0, 0.0, 1.0)));
    let q = i3.gp(&Multivector::vector(Vec3::new(0.0, 0.0, 2.0)));
    ctx.at_most("bivector_work_example", Ok((bivector_work(&w, &q) - 2.0).abs()), 1e-15);
}

/// Divergences against `∂_i X^i + X^j Γ^i_{ij}` of the first Piola
/// columns, differentiated by jets.
fn divergence_definition_gap(case: &Case, u: [f64; 2], t: f64) -> Result<f64> {
    let uj = [Jet::var(u[0], 0), Jet::var(u[1], 1)];
    let pj = StressPoint::evaluate(&case.chart, &case.motion, &case.material, case.body_moment, uj, t)?;
    let reference = case.chart.frame(u, DiffPolicy::Exact)?;
    let cols = pj.first_pk();
    let mcols = pj.couple_first();
    let mut vdef = Vec3::zero();
    let mut mdef = Multivector::zero();
    for i in 0..2 {
        vdef = vdef + cols[i].map(|c| c.g[i]);
        mdef = mdef + Multivector(mcols[i].0.map(|c| c.g[i]));
        for j in 0..2 {
            let g = reference.christoffel[i][i][j];
            vdef = vdef + cols[j].map(|c| c.v).scale(g);
            mdef = mdef + Multivector(mcols[j].0.map(|c| c.v)).scale(g);
        }
    }
    let vcomp = case.stress_divergence(u, t, Divergence::Exact)?;
    let p = case.stress(u, t)?;
    let mcomp = divergence_bivector(
        &ComponentGrad { value: p.couple, grad: p.couple_grad },
        &p.deformation.spatial,
        &p.deformation.reference,
    );
    Ok(nan_max((vcomp - vdef).max_abs(), (mcomp - mdef).max_abs()))
}

// -------------------------------------------------------------- linearized

fn linearized_material() -> Material {
    Material { young: 1.0, poisson: 0.3, thickness: 0.1, density: 1.0 }
}

fn wavy() -> VectorField {
    VectorField::new(vec![
        Term::wave(2, Basis::Frame, 0.3, [1.0, 0.5, 0.0], 0.2),
        Term::monomial(0, Basis::Ambient, 0.2, [1, 1, 0]),
        Term::wave(1, Basis::Ambient, 0.1, [0.0, 1.3, 0.0], 0.0),
    ])
}

fn perturbation_pairs() -> Vec<(&'static str, Chart, PerturbedMotion, [f64; 2])> {
    vec![
        ("plane-flat", Chart::Plane, PerturbedMotion::new(VectorField::default(), wavy()), [0.4, -0.3]),
        (
            "cylinder-uniaxial",
            cylinder(2.0),
            PerturbedMotion::new(VectorField::new(vec![Term::monomial(0, Basis::Ambient, 0.1, [1, 0, 0])]), wavy()),
            [0.3, 0.5],
        ),
        (
            "sphere-wavy",
            sphere(1.4),
            PerturbedMotion::new(
                VectorField::new(vec![
                    Term::wave(2, Basis::Frame, 0.1, [1.0, 1.0, 0.0], 0.0),
                    Term::monomial(0, Basis::Ambient, 0.05, [0, 1, 0]),
                ]),
                wavy(),
            ),
            [1.1, 0.4],
        ),
        (
            "cylinder-bent",
            cylinder(0.8),
            PerturbedMotion::new(
                VectorField::new(vec![Term::wave(2, Basis::Frame, 0.08, [1.0, 0.9, 0.0], 0.1)]),
                VectorField::new(vec![
                    Term::monomial(2, Basis::Frame, 0.3, [2, 0, 0]),
                    Term::monomial(1, Basis::Ambient, 0.2, [1, 1, 0]),
                    Term::wave(0, Basis::Frame, 0.1, [0.0, 1.0, 0.0], 0.5),
                ]),
            ),
            [0.2, -0.4],
        ),
    ]
}

/// Remainders below this are treated as exact.
const REMAINDER_FLOOR: f64 = 1e-12;

fn linearized(ctx: &mut Ctx) {
    let material = linearized_material();
    let scales = [1e-2, 5e-3, 2.5e-3];
    for (name, chart, pm, u) in perturbation_pairs() {
        match remainders(&chart, &pm, &material, u, &scales) {
            Ok(series) => {
                for s in series {
                    let id = format!("richardson/{name}/{}", s.name);
                    if s.remainders.iter().all(|r| *r <= REMAINDER_FLOOR) {
                        let m = max_of(s.remainders.iter().copied());
                        ctx.push(id, Ok(m), Bound::AtMost(REMAINDER_FLOOR), Some("below floor".into()));
                    } else {
                        let ratios = s.ratios();
                        let worst = ratios.iter().copied().fold(4.0_f64, |w, r| if (r - 4.0).abs() > (w - 4.0).abs() || r.is_nan() { r } else { w });
                        let note = format!("ratios=({})", ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>().join(", "));
                        ctx.push(id, Ok(worst), Bound::Within(3.5, 4.5), Some(note));
                    }
                }
            }
            Err(e) => ctx.push(format!("richardson/{name}"), Err(e), Bound::Within(3.5, 4.5), None),
        }
        let agreement = expansion(&chart, &pm, &material, u).and_then(|ex| {
            let fd = first_order_fd(&chart, &pm, &material, u, FD_DELTA)?;
            Ok(max_of(
                ex.first.groups().iter().zip(&fd).flat_map(|((_, a), (_, b))| a.iter().zip(b).map(|(x, y)| (x - y).abs())),
            ))
        });
        ctx.at_most(format!("first_order_matches_fd/{name}"), agreement, 1e-7);
    }

    let flat = PerturbedMotion::new(VectorField::default(), wavy());
    for (chart, u) in [(Chart::Plane, [0.4, -0.3]), (cylinder(0.7), [0.1, 0.9]), (sphere(2.0), [0.9, -0.3])] {
        let m = expansion(&chart, &flat, &material, u).and_then(|ex| {
            let sd = small_displacement(&chart, &flat.perturbation, &material, u, 0.0)?;
            let first = &ex.first;
            let zeroth = &ex.zeroth;
            Ok(max_of([
                mat_gap(&first.strain, &sd.strain),
                mat_gap(&first.curvature_change, &sd.curvature_change),
                mat_gap(&first.couple, &sd.couple),
                mat_gap(&first.stress, &sd.stress),
                (first.normal - sd.normal).max_abs(),
                (first.det_f - sd.det_f).abs(),
                max_abs2(&zeroth.stress),
                max_abs2(&zeroth.couple),
            ]))
        });
        ctx.at_most(format!("small_displacement/{}", label(&chart)), m, 1e-10);
    }

    let rotation = infinitesimal_rotation(2.0, [0.3, -0.5, 0.8]);
    let m = small_displacement(&cylinder(2.0), &rotation, &material, [0.3, 0.7], 0.0)
        .map(|sd| nan_max(max_abs2(&sd.strain), max_abs2(&sd.curvature_change)));
    ctx.at_most("infinitesimal_rotation_is_strain_free", m, 1e-12);

    cylinder_checks(ctx);
}

/// `a x X` on an arc-length cylinder of radius `r`.
fn infinitesimal_rotation(r: f64, a: [f64; 3]) -> VectorField {
    let k = [0.0, 1.0 / r, 0.0];
    let sin = |c: usize, coeff: f64| Term::wave(c, Basis::Ambient, coeff * r, k, -PI / 2.0);
    let cos = |c: usize, coeff: f64| Term::wave(c, Basis::Ambient, coeff * r, k, 0.0);
    let lin = |c: usize, coeff: f64| Term::monomial(c, Basis::Ambient, coeff, [1, 0, 0]);
    VectorField::new(vec![
        sin(0, a[1]),
        cos(0, -a[2]),
        lin(1, a[2]),
        sin(1, -a[0]),
        cos(2, a[0]),
        lin(2, -a[1]),
    ])
}

fn random_perturbation(rng: &mut ChaCha8Rng) -> VectorField {
    let mut terms = Vec::new();
    for c in 0..3 {
        let freq = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), 0.0];
        terms.push(Term::wave(c, Basis::Frame, rng.gen_range(-0.5..0.5), freq, rng.gen_range(-PI..PI)));
        let powers = [rng.gen_range(0..3u32), rng.gen_range(0..3u32), 0];
        terms.push(Term::monomial(c, Basis::Frame, rng.gen_range(-0.3..0.3), powers));
    }
    VectorField::new(terms)
}

fn cylinder_checks(ctx: &mut Ctx) {
    const DRAWS: usize = 20;
    let blocks = ["detF0", "E0", "Eprime", "H0", "Hprime", "N0", "Nprime", "S0", "Sprime"];
    let mut component_max: Vec<(String, f64)> = Vec::new();
    let mut exact = 0.0;
    let mut moved = 0.0;
    let mut failure = None;
    let mut rng = ctx.rng(6);
    for _ in 0..DRAWS {
        let radius = rng.gen_range(0.5..3.0);
        let case = CylinderCase {
            radius,
            strain: rng.gen_range(-0.1..0.2),
            material: random_material(&mut rng),
            perturbation: random_perturbation(&mut rng),
        };
        let u = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let tables = case.closed_form(u).and_then(|c| Ok((c, case.general(u)?)));
        let (closed, general) = match tables {
            Ok(t) => t,
            Err(e) => {
                failure.get_or_insert(e);
                continue;
            }
        };
        let eps = case.strain;
        exact = nan_max(exact, (general.strain0[0][0] - (eps + 0.5 * eps * eps)).abs());
        exact = nan_max(exact, (general.det_f0 - (1.0 + eps)).abs());
        let mut s1 = closed.stress1;
        let shift = closed.couple1[1][1] / radius;
        s1[0][0] -= shift;
        s1[1][1] += shift;
        moved = nan_max(moved, mat_gap(&s1, &general.stress1));
        let entries = closed.entries().into_iter().zip(general.entries());
        if component_max.is_empty() {
            component_max = closed.entries().into_iter().map(|(n, _)| (n, 0.0)).collect();
        }
        for (slot, ((_, a), (_, b))) in component_max.iter_mut().zip(entries) {
            slot.1 = nan_max(slot.1, (a - b).abs());
        }
    }
    for block in &blocks {
        let id = format!("cylinder_closed_form/{block}");
        match &failure {
            Some(e) => ctx.push(id, Err(e.clone()), Bound::AtMost(1e-8), None),
            None => {
                let tol = ctx.opts.tol.unwrap_or(1e-8);
                let members: Vec<&(String, f64)> =
                    component_max.iter().filter(|(n, _)| n.split('_').next() == Some(*block)).collect();
                let d = max_of(members.iter().map(|(_, d)| *d));
                let over: Vec<&str> = members.iter().filter(|(_, d)| !(*d <= tol)).map(|(n, _)| n.as_str()).collect();
                let note = (!over.is_empty()).then(|| format!("over_tol={}", over.join(",")));
                ctx.push(id, Ok(d), Bound::AtMost(tol), note);
            }
        }
    }
    let (m, shifted) = match failure {
        Some(e) => (Err(e.clone()), Err(e)),
        None => (Ok(exact), Ok(moved)),
    };
    ctx.at_most("cylinder_background_exact", m, 1e-14);
    ctx.at_most("cylinder_closed_form/Sprime_curvature_term_on_22", shifted, 1e-8);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::MODULES.iter().chain([Suite::All].iter()) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!(matches!("bogus".parse::<Suite>(), Err(ShellError::UnknownSuite(_))));
    }

    #[test]
    fn nan_fails_every_bound() {
        for bound in [Bound::AtMost(1.0), Bound::Within(0.0, 1.0), Bound::AtLeast(0.0)] {
            let c = Check { suite: "x", name: "y".into(), measured: f64::NAN, bound, note: None };
            assert!(!c.passed());
        }
        assert!(nan_max(0.0, f64::NAN).is_nan());
    }

    #[test]
    fn check_line_format() {
        let c = Check { suite: "geometry", name: "a/b".into(), measured: 1.5e-15, bound: Bound::AtMost(1e-10), note: None };
        assert_eq!(c.to_string(), "[PASS] geometry/a/b measured=1.500e-15 tol=1.0e-10");
    }

    #[test]
    fn grid_spans_box() {
        let g = grid(&Chart::Plane, 3);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], [-1.0, -1.0]);
        assert_eq!(g[8], [1.0, 1.0]);
    }

    #[test]
    fn options_are_validated() {
        assert!(run(Suite::Stress, &VerifyOptions { grid: 1, ..VerifyOptions::default() }).is_err());
        assert!(run(Suite::Stress, &VerifyOptions { tol: Some(-1.0), ..VerifyOptions::default() }).is_err());
    }
}
