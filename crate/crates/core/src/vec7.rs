//! Small helpers on `[T; 7]` shared by the generic geometry code.

use crate::dual::{Dual, Real};

pub type V7<T> = [T; 7];

#[inline]
pub fn zero<T: Real>() -> V7<T> {
    [T::zero(); 7]
}

#[inline]
pub fn basis<T: Real>(i: usize) -> V7<T> {
    let mut v = zero();
    v[i] = T::one();
    v
}

#[inline]
pub fn lift<T: Real>(v: &V7<f64>) -> V7<T> {
    v.map(T::cst)
}

#[inline]
pub fn values<T: Real>(v: &V7<T>) -> V7<f64> {
    v.map(|x| x.value())
}

#[inline]
pub fn add<T: Real>(a: &V7<T>, b: &V7<T>) -> V7<T> {
    std::array::from_fn(|i| a[i] + b[i])
}

#[inline]
pub fn sub<T: Real>(a: &V7<T>, b: &V7<T>) -> V7<T> {
    std::array::from_fn(|i| a[i] - b[i])
}

#[inline]
pub fn scale<T: Real>(k: T, a: &V7<T>) -> V7<T> {
    a.map(|x| k * x)
}

/// `a + k·b`
#[inline]
pub fn axpy<T: Real>(a: &V7<T>, k: T, b: &V7<T>) -> V7<T> {
    std::array::from_fn(|i| a[i] + k * b[i])
}

#[inline]
pub fn neg<T: Real>(a: &V7<T>) -> V7<T> {
    a.map(|x| -x)
}

#[inline]
pub fn dot<T: Real>(a: &V7<T>, b: &V7<T>) -> T {
    let mut s = a[0] * b[0];
    for i in 1..7 {
        s += a[i] * b[i];
    }
    s
}

#[inline]
pub fn norm2<T: Real>(a: &V7<T>) -> T {
    dot(a, a)
}

#[inline]
pub fn norm<T: Real>(a: &V7<T>) -> T {
    norm2(a).sqrt()
}

pub fn normalize<T: Real>(a: &V7<T>) -> V7<T> {
    let n = norm(a);
    a.map(|x| x / n)
}

/// Remove the component along the unit vector `u`.
#[inline]
pub fn reject_unit<T: Real>(v: &V7<T>, u: &V7<T>) -> V7<T> {
    axpy(v, -dot(v, u), u)
}

/// Max-abs difference, for tests and residuals.
pub fn dist_inf(a: &V7<f64>, b: &V7<f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Derivative part of a vector of duals.
#[inline]
pub fn eps<T: Real>(v: &V7<Dual<T>>) -> V7<T> {
    v.map(|d| d.eps)
}

/// Value part of a vector of duals.
#[inline]
pub fn re<T: Real>(v: &V7<Dual<T>>) -> V7<T> {
    v.map(|d| d.re)
}

/// Lift a vector one dual level with zero derivative.
#[inline]
pub fn up<T: Real>(v: &V7<T>) -> V7<Dual<T>> {
    v.map(Dual::lift)
}

/// Orthonormalize `vs` in order (classical Gram–Schmidt, two passes).
/// Returns `None` if some vector falls below `tol` after projection.
pub fn gram_schmidt(vs: &[V7<f64>], tol: f64) -> Option<Vec<V7<f64>>> {
    let mut out: Vec<V7<f64>> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = *v;
        for _ in 0..2 {
            for q in &out {
                w = reject_unit(&w, q);
            }
        }
        let n = norm(&w);
        if n < tol {
            return None;
        }
        out.push(w.map(|x| x / n));
    }
    Some(out)
}

/// Orthogonal projection of `v` onto span(`basis`), where `basis` is orthonormal.
pub fn project_onto(v: &V7<f64>, basis: &[V7<f64>]) -> V7<f64> {
    let mut out = [0.0; 7];
    for q in basis {
        out = axpy(&out, dot(v, q), q);
    }
    out
}
