//! Motions `φ_t` of a reference surface, evaluated in convected coordinates.

use crate::autodiff::Real;
use crate::error::{Result, ShellError};
use crate::field::VectorField;
use crate::ga3::Vec3;
use crate::linalg::{identity3, Mat3};
use crate::surface::Chart;

/// `x = Q(t)(X - offset) + offset + velocity t` with `Q(t)` the rotation
/// by `angle + rate t` about `axis`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rigid {
    axis: [f64; 3],
    pub rate: f64,
    pub angle: f64,
    pub velocity: [f64; 3],
    pub offset: [f64; 3],
}

impl Rigid {
    pub fn new(axis: [f64; 3], rate: f64, angle: f64, velocity: [f64; 3], offset: [f64; 3]) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(ShellError::InvalidInput("rotation axis must be nonzero".into()));
        }
        Ok(Rigid { axis: axis.map(|a| a / n), rate, angle, velocity, offset })
    }

    pub fn rotation(axis: [f64; 3], rate: f64) -> Result<Self> {
        Self::new(axis, rate, 0.0, [0.0; 3], [0.0; 3])
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    fn rotate<T: Real>(&self, v: Vec3<T>, t: T) -> Vec3<T> {
        let k = Vec3::<T>::from_f64(self.axis);
        let th = t * self.rate + self.angle;
        let (s, c) = (th.sin(), th.cos());
        v.scale(c) + k.cross(&v).scale(s) + k.scale(k.dot(&v) * (T::one() - c))
    }

    pub fn apply<T: Real>(&self, x: Vec3<T>, t: T) -> Vec3<T> {
        let o = Vec3::<T>::from_f64(self.offset);
        self.rotate(x - o, t) + o + Vec3::<T>::from_f64(self.velocity).scale(t)
    }

    pub fn rotation_matrix(&self, t: f64) -> Mat3 {
        let cols: [Vec3; 3] = std::array::from_fn(|c| {
            let mut e = [0.0; 3];
            e[c] = 1.0;
            self.rotate(Vec3(e), t)
        });
        std::array::from_fn(|r| std::array::from_fn(|c| cols[c].0[r]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Motion {
    Identity,
    Rigid(Rigid),
    /// Displacement `(strain + rate t) X1` along the ambient x axis.
    UniaxialStrain { strain: f64, rate: f64 },
    /// Scales the ambient y and z components by `1 + delta + rate t`.
    Inflation { delta: f64, rate: f64 },
    /// `x = X + U(X, t)`.
    Displacement(VectorField),
    /// A rigid motion applied on top of another motion.
    Superposed { rigid: Rigid, base: Box<Motion> },
}

impl Motion {
    pub fn name(&self) -> &'static str {
        match self {
            Motion::Identity => "identity",
            Motion::Rigid(_) => "rigid",
            Motion::UniaxialStrain { .. } => "uniaxial_strain",
            Motion::Inflation { .. } => "inflation",
            Motion::Displacement(_) => "displacement",
            Motion::Superposed { .. } => "superposed",
        }
    }

    pub fn place<T: Real>(&self, chart: &Chart, u: [T; 2], t: T) -> Vec3<T> {
        let x = chart.position(u);
        self.apply(chart, u, x, t)
    }

    fn apply<T: Real>(&self, chart: &Chart, u: [T; 2], x: Vec3<T>, t: T) -> Vec3<T> {
        match self {
            Motion::Identity => x,
            Motion::Rigid(r) => r.apply(x, t),
            Motion::UniaxialStrain { strain, rate } => {
                let s = t * *rate + *strain;
                Vec3([x.0[0] + u[0] * s, x.0[1], x.0[2]])
            }
            Motion::Inflation { delta, rate } => {
                let s = t * *rate + (1.0 + *delta);
                Vec3([x.0[0], x.0[1] * s, x.0[2] * s])
            }
            Motion::Displacement(field) => x + field.eval(chart, u, t),
            Motion::Superposed { rigid, base } => rigid.apply(base.apply(chart, u, x, t), t),
        }
    }

    /// Rigid rotation carried by the motion at time `t`; identity otherwise.
    pub fn rotation(&self, t: f64) -> Mat3 {
        match self {
            Motion::Rigid(r) | Motion::Superposed { rigid: r, .. } => r.rotation_matrix(t),
            _ => identity3(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{apply3, det3, max_abs3, mul3, sub3, transpose3};

    #[test]
    fn rotation_matrix_is_orthogonal() {
        let r = Rigid::new([1.0, 2.0, -0.5], 0.7, 0.3, [0.0; 3], [0.0; 3]).unwrap();
        let q = r.rotation_matrix(1.3);
        assert!(max_abs3(&sub3(&mul3(&q, &transpose3(&q)), &identity3())) < 1e-14);
        assert!((det3(&q) - 1.0).abs() < 1e-14);
        let axis = Vec3(r.axis());
        assert!((apply3(&q, axis) - axis).max_abs() < 1e-15);
    }

    #[test]
    fn uniaxial_stretches_first_coordinate() {
        let m = Motion::UniaxialStrain { strain: 0.1, rate: 0.0 };
        let x = m.place(&Chart::Plane, [2.0, 3.0], 0.0);
        assert_eq!(x, Vec3::new(2.2, 3.0, 0.0));
    }

    #[test]
    fn zero_axis_rejected() {
        assert!(Rigid::rotation([0.0; 3], 1.0).is_err());
    }
}
