//! Totally geodesic Lagrangian 3-spheres `L = S⁶ ∩ V` for 4-planes `V`.
//!
//! `L` is Lagrangian exactly when `V` is coassociative (`φ₀|_V = 0`), since
//! `ω_x(X, Y) = φ₀(x, X, Y)` with `x, X, Y ∈ V`.

use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::{Error, Result};
use crate::octonion::{cross, phi0_generic};
use crate::sphere;
use crate::vec7::{self, V7};

/// `L = S⁶ ∩ span(plane)`, `plane` orthonormal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagrangianPatch {
    pub plane: [V7<f64>; 4],
}

impl LagrangianPatch {
    pub fn new(plane: [V7<f64>; 4]) -> Result<Self> {
        let q = vec7::gram_schmidt(&plane, 1e-8)
            .ok_or_else(|| Error::DegenerateInput("4-plane basis is rank deficient".into()))?;
        Ok(LagrangianPatch { plane: [q[0], q[1], q[2], q[3]] })
    }

    /// Embedding of L through the first three plane vectors as a chart
    /// `(a, b, c) ↦ exp_{v₀}(a v₁ + b v₂ + c v₃)`.
    pub fn embed<T: Real>(&self, a: T, b: T, c: T) -> V7<T> {
        let v = vec7::add(
            &vec7::add(&vec7::scale(a, &vec7::lift(&self.plane[1])), &vec7::scale(b, &vec7::lift(&self.plane[2]))),
            &vec7::scale(c, &vec7::lift(&self.plane[3])),
        );
        crate::exterior::sphere_exp(&vec7::lift(&self.plane[0]), &v)
    }

    /// Projection onto `V`.
    pub fn project_plane<T: Real>(&self, x: &V7<T>) -> V7<T> {
        let mut out = vec7::zero::<T>();
        for q in &self.plane {
            let q = vec7::lift::<T>(q);
            out = vec7::axpy(&out, vec7::dot(x, &q), &q);
        }
        out
    }

    /// Nearest point of L (`normalize(π_V x)`).
    pub fn closest_point<T: Real>(&self, x: &V7<T>) -> V7<T> {
        vec7::normalize(&self.project_plane(x))
    }

    /// Euclidean distance from `x` to `V`.
    pub fn plane_distance(&self, x: &V7<f64>) -> f64 {
        vec7::norm(&vec7::sub(x, &self.project_plane(x)))
    }

    /// Orthonormal basis of `T_xL = V ∩ x^⊥`.
    pub fn tangent_basis(&self, x: &V7<f64>) -> Result<[V7<f64>; 3]> {
        if self.plane_distance(x) > 1e-8 {
            return Err(Error::Domain("point is not on the Lagrangian".into()));
        }
        let xs: Vec<V7<f64>> = std::iter::once(*x).chain(self.plane.iter().copied()).collect();
        let mut out: Vec<V7<f64>> = vec![vec7::normalize(x)];
        for v in &xs[1..] {
            let mut w = *v;
            for _ in 0..2 {
                for q in &out {
                    w = vec7::reject_unit(&w, q);
                }
            }
            let n = vec7::norm(&w);
            if n > 1e-6 {
                out.push(w.map(|k| k / n));
            }
        }
        if out.len() != 4 {
            return Err(Error::Frame("could not span T_xL".into()));
        }
        Ok([out[1], out[2], out[3]])
    }

    /// Distance of `v` from `T_xL`.
    pub fn tangent_distance(&self, x: &V7<f64>, v: &V7<f64>) -> Result<f64> {
        let b = self.tangent_basis(x)?;
        Ok(vec7::norm(&vec7::sub(v, &vec7::project_onto(v, &b))))
    }

    /// `max |ω(Tᵢ, Tⱼ)|` on an orthonormal basis of `T_xL`.
    pub fn lagrangian_defect(&self, x: &V7<f64>) -> Result<f64> {
        let b = self.tangent_basis(x)?;
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                d = d.max(sphere::omega_generic(x, &b[i], &b[j]).abs());
            }
        }
        Ok(d)
    }

    /// `max |φ₀|` over triples of plane basis vectors.
    pub fn coassociative_defect(&self) -> f64 {
        coassociative_defect(&self.plane)
    }
}

pub fn coassociative_defect(plane: &[V7<f64>; 4]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            for k in (j + 1)..4 {
                d = d.max(phi0_generic(&plane[i], &plane[j], &plane[k]).abs());
            }
        }
    }
    d
}

/// Search for a coassociative 4-plane containing `b₁, b₂`.
///
/// The complementary associative 3-plane must contain `c = b₁ × b₂`, so it is
/// `span(c, a, c × a)` for a unit `a ⟂ b₁, b₂, c`. Candidates for `a` run
/// over the ambient basis and then over rotations `cos θ aᵢ + sin θ aⱼ`
/// on a fixed grid; the first plane with `|φ₀|_V| < tol` is returned.
pub fn search_coassociative(b1: &V7<f64>, b2: &V7<f64>, tol: f64) -> Result<LagrangianPatch> {
    let q = vec7::gram_schmidt(&[*b1, *b2], 1e-8)
        .ok_or_else(|| Error::DegenerateInput("boundary plane is degenerate".into()))?;
    let c = vec7::normalize(&cross(&q[0], &q[1]));
    let mut comp: Vec<V7<f64>> = Vec::new();
    let mut taken = vec![q[0], q[1], c];
    for i in 0..7 {
        let mut w = vec7::basis(i);
        for _ in 0..2 {
            for v in &taken {
                w = vec7::reject_unit(&w, v);
            }
        }
        let n = vec7::norm(&w);
        if n > 0.3 {
            let w = w.map(|k| k / n);
            taken.push(w);
            comp.push(w);
        }
    }
    let mut candidates: Vec<V7<f64>> = comp.clone();
    for i in 0..comp.len() {
        for j in (i + 1)..comp.len() {
            for k in 1..12 {
                let th = k as f64 * std::f64::consts::PI / 12.0;
                candidates.push(vec7::add(&vec7::scale(th.cos(), &comp[i]), &vec7::scale(th.sin(), &comp[j])));
            }
        }
    }
    for a in candidates {
        let ca = cross(&c, &a);
        let assoc = [c, a, ca];
        let mut rest: Vec<V7<f64>> = vec![q[0], q[1]];
        let mut all = assoc.to_vec();
        all.extend(rest.iter().copied());
        for i in 0..7 {
            let mut w = vec7::basis(i);
            for _ in 0..2 {
                for v in &all {
                    w = vec7::reject_unit(&w, v);
                }
            }
            let n = vec7::norm(&w);
            if n > 0.3 {
                let w = w.map(|k| k / n);
                all.push(w);
                rest.push(w);
            }
            if rest.len() == 4 {
                break;
            }
        }
        if rest.len() != 4 {
            continue;
        }
        let plane = [rest[0], rest[1], rest[2], rest[3]];
        if coassociative_defect(&plane) < tol {
            return LagrangianPatch::new(plane);
        }
    }
    Err(Error::ModelViolation("no coassociative 4-plane found on the search grid".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> V7<f64> {
        vec7::basis(i)
    }

    #[test]
    fn search_finds_coassociative_plane_through_boundary_circle() {
        let l = search_coassociative(&e(0), &e(1), 1e-10).unwrap();
        assert!(l.coassociative_defect() < 1e-10);
        assert!(l.plane_distance(&e(0)) < 1e-12 && l.plane_distance(&e(1)) < 1e-12);
        assert!(l.plane_distance(&e(2)) > 0.99);
        // first candidate a = e₄ gives V = span(e₁, e₂, e₅, e₆)
        for k in [4, 5] {
            assert!(l.plane_distance(&e(k)) < 1e-12);
        }
    }

    #[test]
    fn lagrangian_condition_holds_on_coassociative_link() {
        let l = LagrangianPatch::new([e(0), e(1), e(4), e(5)]).unwrap();
        for (a, b, c) in [(0.1, 0.2, 0.3), (1.0, -0.4, 0.7), (0.0, 0.0, 2.0)] {
            let x = l.embed(a, b, c);
            assert!((vec7::norm(&x) - 1.0).abs() < 1e-14);
            assert!(l.lagrangian_defect(&x).unwrap() < 1e-12);
        }
    }

    #[test]
    fn non_coassociative_plane_is_not_lagrangian() {
        let l = LagrangianPatch::new([e(0), e(1), e(3), e(4)]).unwrap();
        assert!(l.coassociative_defect() > 0.5);
        let x = l.embed(0.3, 0.2, 0.1);
        assert!(l.lagrangian_defect(&x).unwrap() > 0.1);
    }

    #[test]
    fn closest_point_is_idempotent() {
        let l = LagrangianPatch::new([e(0), e(1), e(4), e(5)]).unwrap();
        let x = vec7::normalize(&[0.3, 0.1, 0.2, -0.5, 0.4, 0.6, 0.1]);
        let y = l.closest_point(&x);
        assert!(l.plane_distance(&y) < 1e-14);
        assert!(vec7::dist_inf(&l.closest_point(&y), &y) < 1e-15);
    }
}
