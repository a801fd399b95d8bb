use gashell::field::{Basis, Term, VectorField};
use gashell::linearized::CylinderCase;
use gashell::stress::Material;

// U'_1 = a X1 X2, U'_2 = b X2^2, U'_3 = c X1^2 + d X2, frame components
const A: f64 = 0.3;
const B: f64 = -0.2;
const C3: f64 = 0.4;
const D: f64 = 0.15;

fn case(radius: f64, strain: f64, m: Material) -> CylinderCase {
    let perturbation = VectorField::new(vec![
        Term::monomial(0, Basis::Frame, A, [1, 1, 0]),
        Term::monomial(1, Basis::Frame, B, [0, 2, 0]),
        Term::monomial(2, Basis::Frame, C3, [2, 0, 0]),
        Term::monomial(2, Basis::Frame, D, [0, 1, 0]),
    ]);
    CylinderCase { radius, strain, material: m, perturbation }
}

/// Hand-evaluated component tables for the field above.
struct Hand {
    e0_11: f64,
    e1: [[f64; 2]; 2],
    h1: [[f64; 2]; 2],
    n1: [[f64; 2]; 2],
    s0: [[f64; 2]; 2],
    s1_membrane: [[f64; 2]; 2],
}

fn hand(radius: f64, eps: f64, m: &Material, x: [f64; 2]) -> Hand {
    let c = 1.0 / radius;
    let (x1, x2) = (x[0], x[1]);
    let u3 = C3 * x1 * x1 + D * x2;
    let (d1u1, d2u1) = (A * x2, A * x1);
    let (d1u2, d2u2) = (0.0, 2.0 * B * x2);
    let (d11u3, d22u3, d12u3) = (2.0 * C3, 0.0, 0.0);

    let e12 = 0.5 * (d1u2 + d2u1) + 0.5 * eps * d2u1;
    let e1 = [[(1.0 + eps) * d1u1, e12], [e12, d2u2 - c * u3]];
    let h12 = d12u3 + c * d1u2;
    let h1 = [[d11u3, h12], [h12, d22u3 + 2.0 * c * d2u2 - c * c * u3]];

    let (y, nu, h) = (m.young, m.poisson, m.thickness);
    let kb = y * h.powi(3) / (12.0 * (1.0 - nu * nu));
    let n12 = y * h.powi(3) / (12.0 * (1.0 + nu)) * h1[0][1];
    let n1 = [[kb * (h1[0][0] + nu * h1[1][1]), n12], [n12, kb * (h1[1][1] + nu * h1[0][0])]];

    let km = y * h / (1.0 - nu * nu);
    let e0_11 = 0.5 * eps * eps + eps;
    let s0 = [[km * e0_11, 0.0], [0.0, km * nu * e0_11]];
    let s12 = y * h / (1.0 + nu) * e1[0][1];
    let s1_membrane = [[km * (e1[0][0] + nu * e1[1][1]), s12], [s12, km * (e1[1][1] + nu * e1[0][0])]];
    Hand { e0_11, e1, h1, n1, s0, s1_membrane }
}

fn assert_close(name: &str, got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol, "{name}: got {got:.15e}, want {want:.15e}");
}

const POINTS: [[f64; 2]; 4] = [[0.0, 0.0], [0.7, -0.4], [-0.9, 0.8], [0.25, 1.0]];
const SHAPES: [(f64, f64); 3] = [(1.0, 0.05), (0.6, -0.1), (2.5, 0.2)];

fn material() -> Material {
    Material::new(2.0, 0.3, 0.2, 1.0).unwrap()
}

#[test]
fn background_is_reproduced_exactly() {
    let m = material();
    for (radius, eps) in SHAPES {
        let cyl = case(radius, eps, m);
        for x in POINTS {
            let g = cyl.general(x).unwrap();
            let h = hand(radius, eps, &m, x);
            assert_close("detF0", g.det_f0, 1.0 + eps, 1e-14);
            assert_close("E0_11", g.strain0[0][0], h.e0_11, 1e-14);
            for (i, j) in [(0, 1), (1, 0), (1, 1)] {
                assert_close("E0", g.strain0[i][j], 0.0, 1e-14);
            }
            for i in 0..2 {
                for j in 0..2 {
                    assert_close("H0", g.bend0[i][j], 0.0, 1e-13);
                    assert_close("N0", g.couple0[i][j], 0.0, 1e-13);
                    assert_close("S0", g.stress0[i][j], h.s0[i][j], 1e-13);
                }
            }
        }
    }
}

#[test]
fn first_order_strain_bending_and_couple_match_tables() {
    let m = material();
    for (radius, eps) in SHAPES {
        let cyl = case(radius, eps, m);
        for x in POINTS {
            let g = cyl.general(x).unwrap();
            let h = hand(radius, eps, &m, x);
            for i in 0..2 {
                for j in 0..2 {
                    assert_close(&format!("Eprime_{i}{j}"), g.strain1[i][j], h.e1[i][j], 1e-8);
                    assert_close(&format!("Hprime_{i}{j}"), g.bend1[i][j], h.h1[i][j], 1e-8);
                    assert_close(&format!("Nprime_{i}{j}"), g.couple1[i][j], h.n1[i][j], 1e-8);
                }
            }
        }
    }
}

#[test]
fn closed_form_reproduces_its_own_tables() {
    let m = material();
    for (radius, eps) in SHAPES {
        let cyl = case(radius, eps, m);
        for x in POINTS {
            let t = cyl.closed_form(x).unwrap();
            let h = hand(radius, eps, &m, x);
            let c = 1.0 / radius;
            assert_close("detF0", t.det_f0, 1.0 + eps, 0.0);
            assert_close("E0_11", t.strain0[0][0], h.e0_11, 0.0);
            assert_close("Sprime_11", t.stress1[0][0], h.s1_membrane[0][0] + c * h.n1[1][1], 1e-12);
            assert_close("Sprime_22", t.stress1[1][1], h.s1_membrane[1][1], 1e-12);
            assert_close("Sprime_21", t.stress1[1][0], h.s1_membrane[1][0] + c * h.n1[1][0], 1e-12);
        }
    }
}

// The in-plane stress is S = S~ + b N with b^1_k = 0 and b^2_2 = C for axial
// pre-strain, so the curvature term belongs on S'_22 and S'_21.
#[test]
fn first_order_stress_carries_curvature_term_on_second_row() {
    let m = material();
    for (radius, eps) in SHAPES {
        let cyl = case(radius, eps, m);
        for x in POINTS {
            let g = cyl.general(x).unwrap();
            let h = hand(radius, eps, &m, x);
            let c = 1.0 / radius;
            assert_close("Sprime_11", g.stress1[0][0], h.s1_membrane[0][0], 1e-8);
            assert_close("Sprime_12", g.stress1[0][1], h.s1_membrane[0][1], 1e-8);
            assert_close("Sprime_21", g.stress1[1][0], h.s1_membrane[1][0] + c * h.n1[1][0], 1e-8);
            assert_close("Sprime_22", g.stress1[1][1], h.s1_membrane[1][1] + c * h.n1[1][1], 1e-8);
        }
    }
}
