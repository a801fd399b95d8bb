use gashell::balance::bivector_work;
use gashell::ga3::{cross_product, Multivector, Vec3};
use gashell::kinematics::{KinematicOptions, KinematicState};
use gashell::motion::{Motion, Rigid};
use gashell::stress::Material;
use gashell::surface::{Chart, DiffPolicy};
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-2.0..2.0_f64)
}

fn multivector() -> impl Strategy<Value = Multivector> {
    prop::array::uniform8(-2.0..2.0_f64).prop_map(Multivector)
}

fn bivector() -> impl Strategy<Value = Multivector> {
    vec3().prop_map(|b| Multivector::bivector(b[0], b[1], b[2]))
}

fn sym2() -> impl Strategy<Value = [[f64; 2]; 2]> {
    (-0.5..0.5_f64, -0.5..0.5_f64, -0.5..0.5_f64).prop_map(|(a, b, c)| [[a, b], [b, c]])
}

fn chart() -> impl Strategy<Value = (Chart, [f64; 2])> {
    prop_oneof![
        (vec2(-3.0, 3.0)).prop_map(|u| (Chart::Plane, u)),
        (0.3..3.0_f64, vec2(-2.0, 2.0)).prop_map(|(r, u)| (Chart::cylinder(r).unwrap(), u)),
        (0.3..3.0_f64, 0.2..2.9_f64, -3.0..3.0_f64).prop_map(|(r, th, ph)| (Chart::sphere(r).unwrap(), [th, ph])),
    ]
}

fn vec2(lo: f64, hi: f64) -> impl Strategy<Value = [f64; 2]> {
    prop::array::uniform2(lo..hi)
}

fn close(a: &Multivector, b: &Multivector, tol: f64) -> bool {
    (*a - *b).max_abs() <= tol * (1.0 + a.max_abs().max(b.max_abs()))
}

fn max_abs2(m: &[[f64; 2]; 2]) -> f64 {
    m.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

proptest! {
    #[test]
    fn geometric_product_is_associative(a in multivector(), b in multivector(), c in multivector()) {
        prop_assert!(close(&a.gp(&b).gp(&c), &a.gp(&b.gp(&c)), 1e-12));
    }

    #[test]
    fn vector_product_splits(a in vec3(), b in vec3()) {
        let (va, vb) = (Multivector::vector(Vec3(a)), Multivector::vector(Vec3(b)));
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let split = Multivector::scalar(dot) + va.wedge(&vb);
        prop_assert!(close(&va.gp(&vb), &split, 1e-13));
    }

    #[test]
    fn cross_product_is_dual_of_wedge(a in vec3(), b in vec3()) {
        let c = cross_product(Vec3(a), Vec3(b));
        let w = Multivector::vector(Vec3(a)).wedge(&Multivector::vector(Vec3(b)));
        prop_assert!(close(&w.dual(), &Multivector::vector(c), 1e-13));
        // plain component formula
        let expect = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        for k in 0..3 {
            prop_assert!((c.0[k] - expect[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn reverse_is_an_anti_automorphism(a in multivector(), b in multivector()) {
        prop_assert!(close(&a.gp(&b).reverse(), &b.reverse().gp(&a.reverse()), 1e-12));
    }

    #[test]
    fn bivector_work_equals_dual_vector_dot(w in bivector(), q in bivector()) {
        let (wv, qv) = (w.dual().vector_part(), q.dual().vector_part());
        let lhs = bivector_work(&w, &q);
        prop_assert!((lhs - wv.dot(&qv)).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn reciprocal_frame_is_dual((chart, u) in chart()) {
        let f = chart.frame(u, DiffPolicy::Exact).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { 1.0 } else { 0.0 };
                prop_assert!((f.e[i].dot(&f.reciprocal[j]) - d).abs() < 1e-12);
            }
        }
        let det = f.metric[0][0] * f.metric[1][1] - f.metric[0][1] * f.metric[1][0];
        prop_assert!((det - f.volume * f.volume).abs() < 1e-12 * det.abs().max(1.0));
    }

    #[test]
    fn exact_and_central_frames_agree((chart, u) in chart()) {
        let a = chart.frame(u, DiffPolicy::Exact).unwrap();
        let b = chart.frame(u, DiffPolicy::central()).unwrap();
        let scale = 1.0 + max_abs2(&a.second_form);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((a.metric[i][j] - b.metric[i][j]).abs() < 1e-8);
                prop_assert!((a.second_form[i][j] - b.second_form[i][j]).abs() < 1e-5 * scale);
            }
        }
    }

    #[test]
    fn rigid_motions_are_strain_free(
        (chart, u) in chart(),
        axis in vec3().prop_filter("nonzero axis", |a| a.iter().map(|x| x * x).sum::<f64>() > 0.01),
        rate in -2.0..2.0_f64,
        angle in -3.0..3.0_f64,
        velocity in vec3(),
        offset in vec3(),
        t in -1.0..1.0_f64,
    ) {
        let rigid = Rigid::new(axis, rate, angle, velocity, offset).unwrap();
        let opts = KinematicOptions { diff: DiffPolicy::Exact, ..Default::default() };
        let k = KinematicState::evaluate(&chart, &Motion::Rigid(rigid), u, t, &opts).unwrap();
        for m in [&k.strain, &k.curvature_change, &k.strain_rate, &k.curvature_rate] {
            prop_assert!(max_abs2(m) < 1e-10, "{:?}", m);
        }
        prop_assert!((k.det_f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_energy_is_half_the_work(
        strain in sym2(),
        bending in sym2(),
        (chart, u) in chart(),
        young in 0.1..10.0_f64,
        poisson in -0.9..0.49_f64,
        thickness in 0.01..0.5_f64,
    ) {
        let m = Material::new(young, poisson, thickness, 1.0).unwrap();
        let gi = chart.frame(u, DiffPolicy::Exact).unwrap().metric_inv;
        let s = m.modified_stress(&strain, &gi);
        let n = m.couple_stress(&bending, &gi);
        let mut work = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                work += s[i][j] * strain[i][j] + n[i][j] * bending[i][j];
                prop_assert!((s[i][j] - s[j][i]).abs() <= 1e-13 * (1.0 + s[i][j].abs()));
            }
        }
        let w = m.energy_density(&strain, &bending, &gi);
        prop_assert!(w >= -1e-15);
        prop_assert!((w - 0.5 * work).abs() <= 1e-12 * (1.0 + w.abs()));
    }

    #[test]
    fn uniaxial_strain_matches_green_lagrange(strain in -0.5..1.0_f64, u in vec2(-2.0, 2.0)) {
        let opts = KinematicOptions { diff: DiffPolicy::Exact, ..Default::default() };
        let k = KinematicState::evaluate(&Chart::Plane, &Motion::UniaxialStrain { strain, rate: 0.0 }, u, 0.0, &opts).unwrap();
        prop_assert!((k.strain[0][0] - (strain + 0.5 * strain * strain)).abs() < 1e-13);
        prop_assert!(k.strain[0][1].abs() < 1e-14 && k.strain[1][1].abs() < 1e-14);
        prop_assert!((k.det_f - (1.0 + strain)).abs() < 1e-13);
        prop_assert!((k.stretches[0].max(k.stretches[1]) - (1.0 + strain).max(1.0)).abs() < 1e-12);
    }
}
