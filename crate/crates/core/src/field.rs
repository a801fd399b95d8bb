//! Analytic vector fields given as tables of polynomial-trigonometric terms
//! in `(X1, X2, t)`.

use crate::autodiff::Real;
use crate::ga3::Vec3;
use crate::surface::Chart;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Components along the fixed ambient axes.
    Ambient,
    /// Components along the reference frame `E1, E2, E3` of the chart.
    Frame,
}

/// `coeff * X1^p1 * X2^p2 * t^pt * cos(k1 X1 + k2 X2 + kt t + phase)`,
/// contributing to one vector component.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub component: usize,
    pub basis: Basis,
    pub coeff: f64,
    pub powers: [u32; 3],
    pub freq: [f64; 3],
    pub phase: f64,
}

impl Term {
    pub fn monomial(component: usize, basis: Basis, coeff: f64, powers: [u32; 3]) -> Self {
        Term { component, basis, coeff, powers, freq: [0.0; 3], phase: 0.0 }
    }

    pub fn wave(component: usize, basis: Basis, coeff: f64, freq: [f64; 3], phase: f64) -> Self {
        Term { component, basis, coeff, powers: [0; 3], freq, phase }
    }

    pub fn scalar<T: Real>(&self, u: [T; 2], t: T) -> T {
        let mut v = T::cst(self.coeff)
            * u[0].powi(self.powers[0])
            * u[1].powi(self.powers[1])
            * t.powi(self.powers[2]);
        if self.freq != [0.0; 3] || self.phase != 0.0 {
            let arg = u[0] * self.freq[0] + u[1] * self.freq[1] + t * self.freq[2] + self.phase;
            v *= arg.cos();
        }
        v
    }

    pub fn is_static(&self) -> bool {
        self.powers[2] == 0 && self.freq[2] == 0.0
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VectorField {
    pub terms: Vec<Term>,
}

impl VectorField {
    pub fn new(terms: Vec<Term>) -> Self {
        VectorField { terms }
    }

    pub fn is_static(&self) -> bool {
        self.terms.iter().all(Term::is_static)
    }

    pub fn uses_frame(&self) -> bool {
        self.terms.iter().any(|t| t.basis == Basis::Frame)
    }

    /// Frame components in a chart are multiplied by the chart's `E_a(u)`.
    pub fn eval<T: Real>(&self, chart: &Chart, u: [T; 2], t: T) -> Vec3<T> {
        let mut amb = [T::zero(); 3];
        let mut loc = [T::zero(); 3];
        for term in &self.terms {
            let s = term.scalar(u, t);
            match term.basis {
                Basis::Ambient => amb[term.component] += s,
                Basis::Frame => loc[term.component] += s,
            }
        }
        let mut out = Vec3(amb);
        if self.uses_frame() {
            let frame = chart.frame_vectors(u);
            for a in 0..3 {
                out = out + frame[a].scale(loc[a]);
            }
        }
        out
    }

    /// Scaled sum `self + s * other`.
    pub fn plus_scaled(&self, other: &VectorField, s: f64) -> VectorField {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| Term { coeff: t.coeff * s, ..t.clone() }));
        VectorField { terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_evaluates_product_form() {
        let t = Term {
            component: 0,
            basis: Basis::Ambient,
            coeff: 2.0,
            powers: [1, 2, 1],
            freq: [0.5, 0.0, 1.0],
            phase: 0.3,
        };
        let (x, y, tt) = (0.4_f64, -1.2_f64, 0.7_f64);
        let expected = 2.0 * x * y * y * tt * (0.5 * x + tt + 0.3).cos();
        assert!((t.scalar([x, y], tt) - expected).abs() < 1e-15);
    }

    #[test]
    fn frame_terms_follow_cylinder_frame() {
        let chart = Chart::cylinder(2.0).unwrap();
        let f = VectorField::new(vec![Term::monomial(2, Basis::Frame, 1.0, [0, 0, 0])]);
        let u = [0.3, 1.1];
        let v = f.eval(&chart, u, 0.0);
        let n = chart.frame_vectors(u)[2];
        assert!((v - n).max_abs() < 1e-15);
        // inward normal of the arc-length cylinder
        let p = chart.position(u);
        let radial = Vec3::new(0.0, p[1], p[2]).scale(0.5);
        assert!((n + radial).max_abs() < 1e-14);
    }
}
