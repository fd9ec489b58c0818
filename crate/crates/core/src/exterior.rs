//! Finite-difference exterior derivatives of form fields in a chart.
//!
//! A form field is given as a function of an ambient point and ambient
//! vectors. It is pulled back through a chart `ξ ↦ x(ξ)` whose coordinate
//! vectors are obtained exactly with dual numbers, and the coordinate formula
//! `dβ_{i₀…i_k} = Σ_j (−1)^j ∂_{i_j} β_{i₀…î_j…i_k}` is applied with central
//! differences of step `h`. The truncation error is `O(h²)`.

use crate::dual::{cos_sqrt, sinc_sqrt, Dual, Real};
use crate::forms::perm_sign;
use crate::vec7::{self, V7};

/// A differential form evaluated at a point on a list of vectors.
pub type FormField<'a> = dyn Fn(&V7<f64>, &[V7<f64>]) -> f64 + 'a;

/// A smooth parametrization of an open set of the manifold.
pub trait Chart {
    fn dim(&self) -> usize;
    fn eval<T: Real>(&self, xi: &[T]) -> V7<T>;

    fn point(&self, xi: &[f64]) -> V7<f64> {
        self.eval(xi)
    }

    /// Coordinate vector `∂x/∂ξ_i` at `xi`.
    fn coord_vector(&self, xi: &[f64], i: usize) -> V7<f64> {
        let args: Vec<Dual<f64>> = xi
            .iter()
            .enumerate()
            .map(|(j, &x)| if j == i { Dual::var(x) } else { Dual::lift(x) })
            .collect();
        vec7::eps(&self.eval(&args))
    }
}

/// Geodesic normal coordinates on S⁶ around `center`:
/// `ξ ↦ exp_center(Σ ξᵢ bᵢ)`.
pub struct SphereChart {
    pub center: V7<f64>,
    pub basis: Vec<V7<f64>>,
}

pub(crate) fn sphere_exp<T: Real>(p: &V7<T>, v: &V7<T>) -> V7<T> {
    let n2 = vec7::norm2(v);
    let c = cos_sqrt(n2);
    let s = sinc_sqrt(n2);
    std::array::from_fn(|i| c * p[i] + s * v[i])
}

impl Chart for SphereChart {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn eval<T: Real>(&self, xi: &[T]) -> V7<T> {
        let mut v = vec7::zero::<T>();
        for (k, b) in self.basis.iter().enumerate() {
            v = vec7::axpy(&v, xi[k], &vec7::lift(b));
        }
        sphere_exp(&vec7::lift(&self.center), &v)
    }
}

/// Log-polar chart on the cone ℝ⁷∖{0}:
/// `ξ ↦ r₀ e^{ξ₀} · exp_{m₀}(Σ_{i≥1} ξᵢ bᵢ)`.
pub struct ConeChart {
    pub r0: f64,
    pub m0: V7<f64>,
    pub basis: Vec<V7<f64>>,
}

impl Chart for ConeChart {
    fn dim(&self) -> usize {
        1 + self.basis.len()
    }

    fn eval<T: Real>(&self, xi: &[T]) -> V7<T> {
        let mut v = vec7::zero::<T>();
        for (k, b) in self.basis.iter().enumerate() {
            v = vec7::axpy(&v, xi[k + 1], &vec7::lift(b));
        }
        let m = sphere_exp(&vec7::lift(&self.m0), &v);
        let r = T::cst(self.r0) * xi[0].exp();
        vec7::scale(r, &m)
    }
}

/// Sorted `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Pull back a form field: coefficient on coordinate vectors `idx` at `xi`.
pub fn pullback_coeff<C: Chart>(
    chart: &C,
    form: &FormField<'_>,
    xi: &[f64],
    idx: &[usize],
) -> f64 {
    let x = chart.point(xi);
    let vs: Vec<V7<f64>> = idx.iter().map(|&i| chart.coord_vector(xi, i)).collect();
    form(&x, &vs)
}

/// Coordinate components of `dβ` at the chart origin, one per sorted
/// `(k+1)`-subset of chart indices.
pub fn fd_exterior_derivative<C: Chart>(
    chart: &C,
    form: &FormField<'_>,
    degree: usize,
    h: f64,
) -> Vec<(Vec<usize>, f64)> {
    let n = chart.dim();
    let origin = vec![0.0; n];
    subsets(n, degree + 1)
        .into_iter()
        .map(|idx| {
            let mut total = 0.0;
            for (j, &ij) in idx.iter().enumerate() {
                let rest: Vec<usize> = idx.iter().copied().filter(|&q| q != ij).collect();
                let mut plus = origin.clone();
                plus[ij] = h;
                let mut minus = origin.clone();
                minus[ij] = -h;
                let deriv = (pullback_coeff(chart, form, &plus, &rest)
                    - pullback_coeff(chart, form, &minus, &rest))
                    / (2.0 * h);
                total += if j % 2 == 0 { deriv } else { -deriv };
            }
            (idx, total)
        })
        .collect()
}

/// Max over coordinate components of `|dβ − target|` at the chart origin.
pub fn fd_d_residual<C: Chart>(
    chart: &C,
    beta: &FormField<'_>,
    degree: usize,
    target: &FormField<'_>,
    h: f64,
) -> f64 {
    let origin = vec![0.0; chart.dim()];
    fd_exterior_derivative(chart, beta, degree, h)
        .into_iter()
        .map(|(idx, d)| (d - pullback_coeff(chart, target, &origin, &idx)).abs())
        .fold(0.0, f64::max)
}

/// Evaluate coordinate components (with orthonormal coordinate vectors
/// `basis` at the origin) on arbitrary vectors.
pub fn eval_components(comps: &[(Vec<usize>, f64)], basis: &[V7<f64>], vs: &[V7<f64>]) -> f64 {
    let k = vs.len();
    let coords: Vec<Vec<f64>> = vs
        .iter()
        .map(|v| basis.iter().map(|b| vec7::dot(v, b)).collect())
        .collect();
    let perms = permutations(k);
    comps
        .iter()
        .map(|(idx, c)| {
            let det: f64 = perms
                .iter()
                .map(|p| {
                    let s = perm_sign(p);
                    s * (0..k).map(|a| coords[a][idx[p[a]]]).product::<f64>()
                })
                .sum();
            c * det
        })
        .sum()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Flat chart on ℝ⁷ for checking the coordinate formula.
    struct Flat;
    impl Chart for Flat {
        fn dim(&self) -> usize {
            7
        }
        fn eval<T: Real>(&self, xi: &[T]) -> V7<T> {
            std::array::from_fn(|i| xi[i] + T::cst(0.1 * i as f64))
        }
    }

    #[test]
    fn d_of_x_dy_is_dx_wedge_dy() {
        // β = x₀ dx₁ (ambient coordinates)
        let beta = |x: &V7<f64>, v: &[V7<f64>]| x[0] * v[0][1];
        let target = |_: &V7<f64>, v: &[V7<f64>]| v[0][0] * v[1][1] - v[0][1] * v[1][0];
        let r = fd_d_residual(&Flat, &beta, 1, &target, 1e-3);
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn d_squared_vanishes() {
        // β = d(x₀² x₂) evaluated analytically; dβ should vanish.
        let beta = |x: &V7<f64>, v: &[V7<f64>]| 2.0 * x[0] * x[2] * v[0][0] + x[0] * x[0] * v[0][2];
        let zero = |_: &V7<f64>, _: &[V7<f64>]| 0.0;
        assert!(fd_d_residual(&Flat, &beta, 1, &zero, 1e-3) < 1e-9);
    }

    #[test]
    fn sphere_chart_coordinate_vectors_are_basis_at_origin() {
        let chart = SphereChart {
            center: vec7::basis(0),
            basis: (1..7).map(vec7::basis).collect(),
        };
        for i in 0..6 {
            let v = chart.coord_vector(&[0.0; 6], i);
            assert!(vec7::dist_inf(&v, &vec7::basis(i + 1)) < 1e-15);
        }
        let x = chart.point(&[0.3, 0.0, 0.2, 0.0, 0.0, -0.1]);
        assert!((vec7::norm(&x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn component_evaluation_is_multilinear_alternating() {
        let comps = vec![(vec![0, 1], 2.0)];
        let basis: Vec<V7<f64>> = (0..7).map(vec7::basis).collect();
        let a = vec7::basis(0);
        let b = vec7::basis(1);
        assert_eq!(eval_components(&comps, &basis, &[a, b]), 2.0);
        assert_eq!(eval_components(&comps, &basis, &[b, a]), -2.0);
    }
}
