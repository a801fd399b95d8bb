//! Forward-mode automatic differentiation used to obtain exact partial
//! derivatives of analytic charts and motions.
//!
//! Two jet types are provided. [`Jet`] carries value, gradient and Hessian
//! with respect to the two surface coordinates; [`TJet`] carries value, first
//! and second derivative with respect to time. Both are generic over any
//! [`Real`], so they nest: `Jet<Jet<f64>>` differentiates a quantity that
//! already depends on second coordinate derivatives, and `Jet<TJet<f64>>`
//! yields mixed space-time partials of a motion.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar field over which all geometry is evaluated.
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    /// Real (non-infinitesimal) part.
    fn re(self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn recip(self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }

    fn one() -> Self {
        Self::cst(1.0)
    }

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc *= self;
        }
        acc
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn powi(self, n: u32) -> Self {
        f64::powi(self, n as i32)
    }
}

/// Second-order jet in the two surface coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub g: [T; 2],
    pub h: [[T; 2]; 2],
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        let z = T::zero();
        Jet { v, g: [z; 2], h: [[z; 2]; 2] }
    }

    /// Independent variable number `k` (0 or 1) with value `v`.
    pub fn var(v: T, k: usize) -> Self {
        let mut j = Self::constant(v);
        j.g[k] = T::one();
        j
    }

    /// Partial derivative with respect to coordinate `k`, as a jet whose
    /// gradient is exact and whose Hessian is truncated to zero.
    pub fn partial(&self, k: usize) -> Self {
        Jet { v: self.g[k], g: self.h[k], h: [[T::zero(); 2]; 2] }
    }

    fn chain(self, f: T, df: T, ddf: T) -> Self {
        let g = [self.g[0] * df, self.g[1] * df];
        let mut h = [[T::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = ddf * self.g[i] * self.g[j] + df * self.h[i][j];
            }
        }
        Jet { v: f, g, h }
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut h = self.h;
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] += o.h[i][j];
            }
        }
        Jet { v: self.v + o.v, g: [self.g[0] + o.g[0], self.g[1] + o.g[1]], h }
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet {
            v: -self.v,
            g: [-self.g[0], -self.g[1]],
            h: [[-self.h[0][0], -self.h[0][1]], [-self.h[1][0], -self.h[1][1]]],
        }
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let g = [
            self.g[0] * o.v + self.v * o.g[0],
            self.g[1] * o.v + self.v * o.g[1],
        ];
        let mut h = [[T::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = self.h[i][j] * o.v
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i]
                    + self.v * o.h[i][j];
            }
        }
        Jet { v: self.v * o.v, g, h }
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Real> AddAssign for Jet<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Jet<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for Jet<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> Add<f64> for Jet<T> {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.v = self.v + o;
        self
    }
}

impl<T: Real> Sub<f64> for Jet<T> {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.v = self.v - o;
        self
    }
}

impl<T: Real> Mul<f64> for Jet<T> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        Jet {
            v: self.v * o,
            g: [self.g[0] * o, self.g[1] * o],
            h: [
                [self.h[0][0] * o, self.h[0][1] * o],
                [self.h[1][0] * o, self.h[1][1] * o],
            ],
        }
    }
}

impl<T: Real> Div<f64> for Jet<T> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<T: Real> Real for Jet<T> {
    fn cst(v: f64) -> Self {
        Jet::constant(T::cst(v))
    }
    fn re(self) -> f64 {
        self.v.re()
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let ds = (s * 2.0).recip();
        let dds = -(ds * ds * ds) * 2.0;
        self.chain(s, ds, dds)
    }
    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        let r2 = r * r;
        self.chain(r, -r2, r2 * r * 2.0)
    }
}

/// Second-order jet in time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TJet<T> {
    pub v: T,
    pub d: T,
    pub dd: T,
}

impl<T: Real> TJet<T> {
    pub fn constant(v: T) -> Self {
        TJet { v, d: T::zero(), dd: T::zero() }
    }

    pub fn var(v: T) -> Self {
        TJet { v, d: T::one(), dd: T::zero() }
    }

    fn chain(self, f: T, df: T, ddf: T) -> Self {
        TJet { v: f, d: df * self.d, dd: ddf * self.d * self.d + df * self.dd }
    }
}

impl<T: Real> Add for TJet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        TJet { v: self.v + o.v, d: self.d + o.d, dd: self.dd + o.dd }
    }
}

impl<T: Real> Sub for TJet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        TJet { v: self.v - o.v, d: self.d - o.d, dd: self.dd - o.dd }
    }
}

impl<T: Real> Neg for TJet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        TJet { v: -self.v, d: -self.d, dd: -self.dd }
    }
}

impl<T: Real> Mul for TJet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        TJet {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
            dd: self.dd * o.v + self.d * o.d * 2.0 + self.v * o.dd,
        }
    }
}

impl<T: Real> Div for TJet<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Real> AddAssign for TJet<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for TJet<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for TJet<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> Add<f64> for TJet<T> {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.v = self.v + o;
        self
    }
}

impl<T: Real> Sub<f64> for TJet<T> {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.v = self.v - o;
        self
    }
}

impl<T: Real> Mul<f64> for TJet<T> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        TJet { v: self.v * o, d: self.d * o, dd: self.dd * o }
    }
}

impl<T: Real> Div<f64> for TJet<T> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<T: Real> Real for TJet<T> {
    fn cst(v: f64) -> Self {
        TJet::constant(T::cst(v))
    }
    fn re(self) -> f64 {
        self.v.re()
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let ds = (s * 2.0).recip();
        let dds = -(ds * ds * ds) * 2.0;
        self.chain(s, ds, dds)
    }
    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        let r2 = r * r;
        self.chain(r, -r2, r2 * r * 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<T: Real>(x: T, y: T) -> T {
        (x * y).sin() + (x * x + 1.0).sqrt() / (y + 3.0) + y.cos() * x.powi(3)
    }

    fn central(g: impl Fn(f64, f64) -> f64, x: f64, y: f64, k: usize, h: f64) -> f64 {
        if k == 0 {
            (g(x + h, y) - g(x - h, y)) / (2.0 * h)
        } else {
            (g(x, y + h) - g(x, y - h)) / (2.0 * h)
        }
    }

    #[test]
    fn jet_matches_finite_differences() {
        let (x, y) = (0.7, -0.4);
        let j = f(Jet::var(x, 0), Jet::var(y, 1));
        assert!((j.v - f(x, y)).abs() < 1e-15);
        for k in 0..2 {
            let fd = central(f::<f64>, x, y, k, 1e-6);
            assert!((j.g[k] - fd).abs() < 1e-8, "grad {k}: {} vs {fd}", j.g[k]);
            for l in 0..2 {
                let gl = |a: f64, b: f64| central(f::<f64>, a, b, l, 1e-5);
                let fd2 = central(gl, x, y, k, 1e-4);
                assert!((j.h[k][l] - fd2).abs() < 1e-6, "hess {k}{l}");
            }
        }
        assert_eq!(j.h[0][1], j.h[1][0]);
    }

    #[test]
    fn tjet_second_derivative() {
        let t = 0.3;
        let j = (TJet::var(t) * 2.0).sin() * TJet::var(t);
        let exact_d = 2.0 * (2.0 * t).cos() * t + (2.0 * t).sin();
        let exact_dd = -4.0 * (2.0 * t).sin() * t + 4.0 * (2.0 * t).cos();
        assert!((j.d - exact_d).abs() < 1e-14);
        assert!((j.dd - exact_dd).abs() < 1e-14);
    }

    #[test]
    fn nested_jets_give_third_derivatives() {
        // d/dx of the Hessian of x^4 is 24x.
        let x = 1.3;
        let outer = Jet::var(x, 0);
        let inner = Jet::var(outer, 0);
        let r = inner.powi(4);
        assert!((r.h[0][0].g[0] - 24.0 * x).abs() < 1e-12);
    }

    #[test]
    fn partial_shifts_derivatives() {
        let j = Jet::var(2.0, 0) * Jet::var(2.0, 0) * Jet::var(3.0, 1);
        let p = j.partial(0); // 2xy
        assert!((p.v - 12.0).abs() < 1e-14);
        assert!((p.g[0] - 6.0).abs() < 1e-14);
        assert!((p.g[1] - 4.0).abs() < 1e-14);
    }
}
