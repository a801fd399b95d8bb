//! Geometric algebra of Euclidean 3-space.
//!
//! A [`Multivector`] stores eight coefficients over
//! `{1, e1, e2, e3, e12, e13, e23, e123}`. The inner product is the Hestenes
//! one: for homogeneous grades r, s > 0 it keeps grade |r - s| of the
//! geometric product, and it vanishes when either factor is a scalar.

use crate::autodiff::Real;
use std::ops::{Add, Index, Mul, Neg, Sub};

/// Plain 3-vector in the ambient orthonormal basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T = f64>(pub [T; 3]);

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([T::zero(); 3])
    }

    pub fn from_f64(v: [f64; 3]) -> Self {
        Vec3([T::cst(v[0]), T::cst(v[1]), T::cst(v[2])])
    }

    pub fn re(&self) -> Vec3<f64> {
        Vec3([self.0[0].re(), self.0[1].re(), self.0[2].re()])
    }

    pub fn dot(&self, o: &Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Vec3([b * z - c * y, c * x - a * z, a * y - b * x])
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> Vec3<U> {
        Vec3([f(self.0[0]), f(self.0[1]), f(self.0[2])])
    }
}

impl Vec3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl<T: Real> Mul<f64> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

// Storage slot -> blade bitmask (bit 0 = e1, bit 1 = e2, bit 2 = e3).
const MASK: [usize; 8] = [0, 1, 2, 4, 3, 5, 6, 7];
// Bitmask -> storage slot.
const SLOT: [usize; 8] = [0, 1, 2, 4, 3, 5, 6, 7];
const GRADE: [usize; 8] = [0, 1, 1, 1, 2, 2, 2, 3];

fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multivector<T = f64>(pub [T; 8]);

impl<T: Real> Multivector<T> {
    pub fn zero() -> Self {
        Multivector([T::zero(); 8])
    }

    pub fn scalar(s: T) -> Self {
        let mut m = Self::zero();
        m.0[0] = s;
        m
    }

    pub fn vector(v: Vec3<T>) -> Self {
        let mut m = Self::zero();
        m.0[1] = v.0[0];
        m.0[2] = v.0[1];
        m.0[3] = v.0[2];
        m
    }

    /// Bivector from coefficients on e1^e2, e1^e3, e2^e3.
    pub fn bivector(b12: T, b13: T, b23: T) -> Self {
        let mut m = Self::zero();
        m.0[4] = b12;
        m.0[5] = b13;
        m.0[6] = b23;
        m
    }

    pub fn pseudoscalar() -> Self {
        let mut m = Self::zero();
        m.0[7] = T::one();
        m
    }

    pub fn basis(slot: usize) -> Self {
        let mut m = Self::zero();
        m.0[slot] = T::one();
        m
    }

    pub fn re(&self) -> Multivector<f64> {
        Multivector(std::array::from_fn(|k| self.0[k].re()))
    }

    pub fn grade(&self, r: usize) -> Self {
        let mut m = Self::zero();
        for k in 0..8 {
            if GRADE[k] == r {
                m.0[k] = self.0[k];
            }
        }
        m
    }

    pub fn scalar_part(&self) -> T {
        self.0[0]
    }

    pub fn vector_part(&self) -> Vec3<T> {
        Vec3([self.0[1], self.0[2], self.0[3]])
    }

    pub fn scale(&self, s: T) -> Self {
        Multivector(std::array::from_fn(|k| self.0[k] * s))
    }

    pub fn gp(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..8 {
            for j in 0..8 {
                let (a, b) = (MASK[i], MASK[j]);
                let k = SLOT[a ^ b];
                out.0[k] += self.0[i] * o.0[j] * reorder_sign(a, b);
            }
        }
        out
    }

    fn graded_product(&self, o: &Self, keep: impl Fn(usize, usize) -> Option<usize>) -> Self {
        let mut out = Self::zero();
        for i in 0..8 {
            for j in 0..8 {
                let (a, b) = (MASK[i], MASK[j]);
                let k = SLOT[a ^ b];
                if keep(GRADE[i], GRADE[j]) == Some(GRADE[k]) {
                    out.0[k] += self.0[i] * o.0[j] * reorder_sign(a, b);
                }
            }
        }
        out
    }

    /// Hestenes inner product.
    pub fn inner(&self, o: &Self) -> Self {
        self.graded_product(o, |r, s| {
            if r == 0 || s == 0 {
                None
            } else {
                Some(r.abs_diff(s))
            }
        })
    }

    pub fn wedge(&self, o: &Self) -> Self {
        self.graded_product(o, |r, s| Some(r + s))
    }

    pub fn reverse(&self) -> Self {
        let mut m = *self;
        for k in 4..8 {
            m.0[k] = -m.0[k];
        }
        m
    }

    /// Multiplication by -I3. Maps e1^e2 to e3 and e3 to e2^e1.
    pub fn dual(&self) -> Self {
        -(Self::pseudoscalar().gp(self))
    }

    pub fn norm_sq(&self) -> T {
        let mut s = T::zero();
        for k in 0..8 {
            s += self.0[k] * self.0[k];
        }
        s
    }
}

impl Multivector<f64> {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        (*self - *o).max_abs() <= tol
    }
}

impl<T: Real> Add for Multivector<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Multivector(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl<T: Real> Sub for Multivector<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Multivector(std::array::from_fn(|k| self.0[k] - o.0[k]))
    }
}

impl<T: Real> Neg for Multivector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Multivector(std::array::from_fn(|k| -self.0[k]))
    }
}

impl<T: Real> Mul for Multivector<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.gp(&o)
    }
}

/// a x b = -I3 (a ^ b).
pub fn cross_product<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    Multivector::vector(a)
        .wedge(&Multivector::vector(b))
        .dual()
        .vector_part()
}

pub fn wedge_vectors<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Multivector<T> {
    Multivector::vector(a).wedge(&Multivector::vector(b))
}

/// Bivector basis `{e1^e3, e2^e3, e1^e2}` of a frame together with its
/// reciprocal `{e^3^e^1, e^3^e^2, e^2^e^1}`.
#[derive(Clone, Copy, Debug)]
pub struct BivectorBasis<T = f64> {
    pub lower: [Multivector<T>; 3],
    pub upper: [Multivector<T>; 3],
}

impl<T: Real> BivectorBasis<T> {
    /// `frame` holds e1, e2, e3 and `reciprocal` holds e^1, e^2, e^3.
    pub fn new(frame: &[Vec3<T>; 3], reciprocal: &[Vec3<T>; 3]) -> Self {
        let [e1, e2, e3] = *frame;
        let [r1, r2, r3] = *reciprocal;
        BivectorBasis {
            lower: [wedge_vectors(e1, e3), wedge_vectors(e2, e3), wedge_vectors(e1, e2)],
            upper: [wedge_vectors(r3, r1), wedge_vectors(r3, r2), wedge_vectors(r2, r1)],
        }
    }

    /// Lower components `w_A = w . e_A`, ordered (1,3), (2,3), (1,2).
    pub fn lower_components(&self, w: &Multivector<T>) -> [T; 3] {
        std::array::from_fn(|a| w.inner(&self.lower[a]).scalar_part())
    }

    /// Upper components `w^A = w . e^A`.
    pub fn upper_components(&self, w: &Multivector<T>) -> [T; 3] {
        std::array::from_fn(|a| w.inner(&self.upper[a]).scalar_part())
    }

    pub fn from_upper(&self, c: [T; 3]) -> Multivector<T> {
        self.lower[0].scale(c[0]) + self.lower[1].scale(c[1]) + self.lower[2].scale(c[2])
    }

    pub fn from_lower(&self, c: [T; 3]) -> Multivector<T> {
        self.upper[0].scale(c[0]) + self.upper[1].scale(c[1]) + self.upper[2].scale(c[2])
    }
}
