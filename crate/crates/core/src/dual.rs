//! Forward-mode dual numbers.
//!
//! `Dual<T>` carries a value and a first derivative. Because `Dual<T>` is
//! itself a [`Real`], duals nest: `Dual<Dual<f64>>` carries the mixed second
//! derivative, and so on. Geometric quantities in this crate are written once
//! as functions generic over `T: Real` and differentiated by evaluating them at
//! a nested dual.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar type accepted by every generic geometric evaluator.
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    fn cst(x: f64) -> Self;
    /// Underlying `f64` value, stripping every derivative part.
    fn value(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;

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
    fn scale(self, k: f64) -> Self {
        self * Self::cst(k)
    }
}

impl Real for f64 {
    #[inline]
    fn cst(x: f64) -> Self {
        x
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn powi(self, n: u32) -> Self {
        f64::powi(self, n as i32)
    }
}

/// `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Real> Dual<T> {
    #[inline]
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    /// Independent variable: derivative seed 1.
    #[inline]
    pub fn var(x: T) -> Self {
        Dual { re: x, eps: T::one() }
    }

    /// Constant: derivative seed 0.
    #[inline]
    pub fn lift(x: T) -> Self {
        Dual { re: x, eps: T::zero() }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = T::one() / o.re;
        let q = self.re * inv;
        Dual::new(q, (self.eps - q * o.eps) * inv)
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<T: Real> AddAssign for Dual<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Dual<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for Dual<T> {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> Real for Dual<T> {
    #[inline]
    fn cst(x: f64) -> Self {
        Dual::lift(T::cst(x))
    }
    #[inline]
    fn value(self) -> f64 {
        self.re.value()
    }
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.eps * self.re.cos())
    }
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.eps * self.re.sin()))
    }
    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        Dual::new(r, self.eps / (r + r))
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.eps * e)
    }
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.eps / self.re)
    }
}

/// `cos(√y)` as an entire function of `y`; safe to differentiate at `y = 0`.
pub fn cos_sqrt<T: Real>(y: T) -> T {
    if y.value().abs() < 1e-2 {
        // Σ (-y)^k / (2k)!
        let mut term = T::one();
        let mut acc = T::one();
        for k in 1..12u32 {
            let d = ((2 * k - 1) * (2 * k)) as f64;
            term = -(term * y).scale(1.0 / d);
            acc += term;
        }
        acc
    } else {
        y.sqrt().cos()
    }
}

/// `sin(√y)/√y` as an entire function of `y`.
pub fn sinc_sqrt<T: Real>(y: T) -> T {
    if y.value().abs() < 1e-2 {
        // Σ (-y)^k / (2k+1)!
        let mut term = T::one();
        let mut acc = T::one();
        for k in 1..12u32 {
            let d = ((2 * k) * (2 * k + 1)) as f64;
            term = -(term * y).scale(1.0 / d);
            acc += term;
        }
        acc
    } else {
        let r = y.sqrt();
        r.sin() / r
    }
}

/// Derivative of a scalar function at `x`.
pub fn derivative(f: impl Fn(Dual<f64>) -> Dual<f64>, x: f64) -> f64 {
    f(Dual::var(x)).eps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly<T: Real>(x: T) -> T {
        x * x * x - x.scale(2.0) + T::cst(1.0)
    }

    #[test]
    fn first_derivative_of_polynomial() {
        assert_eq!(derivative(poly, 2.0), 10.0);
    }

    #[test]
    fn nested_dual_gives_second_derivative() {
        let x = 0.7;
        let d = poly(Dual::var(Dual::var(x)));
        // f'' = 6x
        assert!((d.eps.eps - 6.0 * x).abs() < 1e-14);
        assert!((d.eps.re - (3.0 * x * x - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn transcendental_rules_match_closed_forms() {
        let x = 0.4;
        assert!((derivative(|d| d.sin() * d.exp(), x) - (x.cos() * x.exp() + x.sin() * x.exp())).abs() < 1e-14);
        assert!((derivative(|d| d.sqrt(), x) - 0.5 / x.sqrt()).abs() < 1e-14);
        assert!((derivative(|d| d.ln(), x) - 1.0 / x).abs() < 1e-14);
        assert!((derivative(|d| Dual::cst(1.0) / d, x) + 1.0 / (x * x)).abs() < 1e-13);
    }

    #[test]
    fn sqrt_series_are_smooth_through_zero() {
        for &y in &[0.0, 1e-5, 5e-3, 2e-2, 1.0] {
            let c = cos_sqrt(y);
            let s = sinc_sqrt(y);
            let r: f64 = y.sqrt();
            let (ce, se) = if y == 0.0 { (1.0, 1.0) } else { (r.cos(), r.sin() / r) };
            assert!((c - ce).abs() < 1e-15, "{y}");
            assert!((s - se).abs() < 1e-15, "{y}");
        }
        // d/dy cos(√y) at 0 is -1/2
        assert!((derivative(cos_sqrt, 0.0) + 0.5).abs() < 1e-15);
        assert!((derivative(sinc_sqrt, 0.0) + 1.0 / 6.0).abs() < 1e-15);
    }
}
