//! Fixed-size matrix helpers over any [`Real`].

use crate::autodiff::Real;
use crate::ga3::Vec3;

pub type Mat2<T = f64> = [[T; 2]; 2];
pub type Mat3<T = f64> = [[T; 3]; 3];

pub fn zero2<T: Real>() -> Mat2<T> {
    [[T::zero(); 2]; 2]
}

pub fn zero3<T: Real>() -> Mat3<T> {
    [[T::zero(); 3]; 3]
}

pub fn identity3<T: Real>() -> Mat3<T> {
    let mut m = zero3();
    for k in 0..3 {
        m[k][k] = T::one();
    }
    m
}

/// `a ⊗ b`, i.e. the matrix of `y -> a (b . y)`.
pub fn outer<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Mat3<T> {
    std::array::from_fn(|r| std::array::from_fn(|c| a.0[r] * b.0[c]))
}

pub fn add3<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][c] + b[r][c]))
}

pub fn sub3<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][c] - b[r][c]))
}

pub fn scale3<T: Real>(a: &Mat3<T>, s: T) -> Mat3<T> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][c] * s))
}

pub fn mul3<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|r| {
        std::array::from_fn(|c| a[r][0] * b[0][c] + a[r][1] * b[1][c] + a[r][2] * b[2][c])
    })
}

pub fn transpose3<T: Real>(a: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[c][r]))
}

pub fn apply3<T: Real>(a: &Mat3<T>, v: Vec3<T>) -> Vec3<T> {
    Vec3(std::array::from_fn(|r| a[r][0] * v.0[0] + a[r][1] * v.0[1] + a[r][2] * v.0[2]))
}

pub fn det3<T: Real>(a: &Mat3<T>) -> T {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn inv3<T: Real>(a: &Mat3<T>) -> Mat3<T> {
    let inv_det = det3(a).recip();
    let cof = |r: usize, c: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
        a[r1][c1] * a[r2][c2] - a[r1][c2] * a[r2][c1]
    };
    std::array::from_fn(|r| std::array::from_fn(|c| cof(c, r) * inv_det))
}

pub fn trace3<T: Real>(a: &Mat3<T>) -> T {
    a[0][0] + a[1][1] + a[2][2]
}

pub fn max_abs3(a: &Mat3<f64>) -> f64 {
    a.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn mul2<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][0] * b[0][c] + a[r][1] * b[1][c]))
}

pub fn add2<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][c] + b[r][c]))
}

pub fn scale2<T: Real>(a: &Mat2<T>, s: T) -> Mat2<T> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][c] * s))
}

pub fn transpose2<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

pub fn det2<T: Real>(a: &Mat2<T>) -> T {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn inv2<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    let d = det2(a).recip();
    [[a[1][1] * d, -a[0][1] * d], [-a[1][0] * d, a[0][0] * d]]
}

pub fn max_abs2(a: &Mat2<f64>) -> f64 {
    a.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn sub2(a: &Mat2<f64>, b: &Mat2<f64>) -> Mat2<f64> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][c] - b[r][c]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let a = [[2.0, 0.3, -1.0], [0.1, 1.5, 0.4], [0.0, -0.7, 3.0]];
        let p = mul3(&a, &inv3(&a));
        assert!(max_abs3(&sub3(&p, &identity3())) < 1e-15);
        let b = [[1.2, 0.4], [-0.3, 0.9]];
        let q = mul2(&b, &inv2(&b));
        assert!((q[0][0] - 1.0).abs() < 1e-15 && q[0][1].abs() < 1e-15);
    }

    #[test]
    fn outer_applies_as_projection() {
        let a = Vec3::new(1.0, 2.0, 3.0);
        let b = Vec3::new(0.0, 1.0, -1.0);
        let y = Vec3::new(0.5, 0.5, 2.0);
        assert_eq!(apply3(&outer(a, b), y), a.scale(b.dot(&y)));
    }
}
