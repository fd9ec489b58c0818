//! Second variation of area for minimal surfaces in S⁶.
//!
//! Two evaluations of `δ²A(η)` are provided: the general formula with its
//! boundary term, and the nearly-Kähler form
//! `∫ ½‖𝒟η‖² + ⅓dω(e, Jη, 𝒟_eη) − 2λ²‖η‖²` valid for holomorphic disks with
//! Lagrangian boundary. Both are checked against a finite-difference second
//! derivative of the area of an explicit variation family.

use serde::{Deserialize, Serialize};

use crate::dual::{cos_sqrt, sinc_sqrt, Dual, Real};
use crate::error::{Error, Result};
use crate::lagrangian::LagrangianPatch;
use crate::octonion::cross;
use crate::quadrature::{boundary_rule, domain_rule, integrate, try_integrate_boundary, Domain};
use crate::sphere::{self, LAMBDA};
use crate::surface::{
    self, check_tangent, first_jet, jet, midpoint_grid, normal_field_value, normal_proj, AmbientField, Monomial,
    PatchMap, SurfacePatch,
};
use crate::vec7::{self, V7};

/// Node counts for interior and boundary quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub interior: usize,
    pub boundary: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { interior: 64, boundary: 256 }
    }
}

impl QuadratureSpec {
    pub fn doubled(&self) -> Self {
        QuadratureSpec { interior: 2 * self.interior, boundary: 2 * self.boundary }
    }
}

/// A normal field `η = π_N(recipe(u))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalField {
    pub name: String,
    pub recipe: AmbientField,
}

impl NormalField {
    pub fn new(name: impl Into<String>, recipe: AmbientField) -> Self {
        NormalField { name: name.into(), recipe }
    }

    pub fn zero() -> Self {
        NormalField::new("0", AmbientField::default())
    }

    pub fn value(&self, patch: &SurfacePatch, s: f64, t: f64) -> V7<f64> {
        normal_field_value(patch, &self.recipe, s, t)
    }

    pub fn scaled(&self, k: f64) -> Self {
        NormalField::new(format!("{k}*({})", self.name), self.recipe.scaled(k))
    }

    pub fn plus(&self, other: &NormalField) -> Self {
        NormalField::new(format!("{}+{}", self.name, other.name), self.recipe.plus(&other.recipe))
    }

    pub fn minus(&self, other: &NormalField) -> Self {
        NormalField::new(format!("{}-{}", self.name, other.name), self.recipe.plus(&other.recipe.scaled(-1.0)))
    }

    /// Largest distance of `η` from `T_xL` over boundary nodes. Points off
    /// `L` give a precondition error.
    pub fn boundary_tangency(&self, patch: &SurfacePatch, l: &LagrangianPatch, n: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for b in boundary_rule(&patch.domain, n) {
            let x = patch.point(b.s, b.t);
            let eta = self.value(patch, b.s, b.t);
            let d = l
                .tangent_distance(&x, &eta)
                .map_err(|_| Error::Precondition(format!("boundary point ({}, {}) is not on L", b.s, b.t)))?;
            worst = worst.max(d);
        }
        Ok(worst)
    }

    pub fn is_admissible(&self, patch: &SurfacePatch, l: &LagrangianPatch, n: usize) -> Result<bool> {
        Ok(self.boundary_tangency(patch, l, n)? < ADMISSIBLE_TOL)
    }
}

const ADMISSIBLE_TOL: f64 = 1e-6;
const MINIMAL_TOL: f64 = 1e-5;
const HOLO_TOL: f64 = 1e-6;

/// Unit tangent `T` and outward conormal `ν` at a boundary point of a disk
/// patch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryFrameData {
    pub tangent: V7<f64>,
    pub conormal: V7<f64>,
}

impl BoundaryFrameData {
    pub fn at(patch: &SurfacePatch, s: f64, t: f64) -> Result<Self> {
        if !matches!(patch.domain, Domain::Disk { .. }) {
            return Err(Error::Domain("boundary frames need a disk domain".into()));
        }
        let j = jet(patch, s, t);
        let tangent = vec7::normalize(&j.from_coords([-t, s]));
        let out = j.from_coords([s, t]);
        let mut conormal = vec7::normalize(&vec7::reject_unit(&out, &tangent));
        if vec7::dot(&conormal, &out) < 0.0 {
            conormal = vec7::neg(&conormal);
        }
        Ok(BoundaryFrameData { tangent, conormal })
    }

    /// `|JT + ν|`, zero on holomorphic patches.
    pub fn holomorphic_defect(&self, u: &V7<f64>) -> f64 {
        vec7::norm(&vec7::add(&cross(u, &self.tangent), &self.conormal))
    }
}

/// `(u, u_s, u_t, η, ∂_sη, ∂_tη)` at a generic scalar.
struct FieldJet<T> {
    u: V7<T>,
    us: V7<T>,
    ut: V7<T>,
    eta: V7<T>,
    deta: [V7<T>; 2],
}

fn field_jet<T: Real>(patch: &SurfacePatch, field: &AmbientField, s: T, t: T) -> FieldJet<T> {
    let a = normal_field_value(patch, field, Dual::var(s), Dual::lift(t));
    let b = normal_field_value(patch, field, Dual::lift(s), Dual::var(t));
    let [u, us, ut] = first_jet(patch, s, t);
    FieldJet { u, us, ut, eta: vec7::re(&a), deta: [vec7::eps(&a), vec7::eps(&b)] }
}

impl<T: Real> FieldJet<T> {
    /// `∇⊥_{∂_a} η`.
    fn nperp(&self) -> [V7<T>; 2] {
        self.deta.map(|d| normal_proj(&self.u, &self.us, &self.ut, &d))
    }
}

fn along(c: [f64; 2], v: &[V7<f64>; 2]) -> V7<f64> {
    vec7::add(&vec7::scale(c[0], &v[0]), &vec7::scale(c[1], &v[1]))
}

fn nperp_at(patch: &SurfacePatch, field: &AmbientField, s: f64, t: f64) -> (V7<f64>, [V7<f64>; 2]) {
    let fj = field_jet(patch, field, s, t);
    (fj.eta, fj.nperp())
}

/// `𝒟_X η = ∇⊥_X η + J∇⊥_{JX} η`.
pub fn dbar_d(patch: &SurfacePatch, s: f64, t: f64, x: &V7<f64>, field: &NormalField) -> Result<V7<f64>> {
    let j = jet(patch, s, t);
    let cx = check_tangent(&j, x)?;
    let cjx = check_tangent(&j, &cross(&j.u, x))?;
    let (_, np) = nperp_at(patch, &field.recipe, s, t);
    Ok(vec7::add(&along(cx, &np), &cross(&j.u, &along(cjx, &np))))
}

/// `α_η(∂_a) = ⟨∇⊥_{∂_a} η, Jη⟩` in coordinates.
fn alpha_coords<T: Real>(patch: &SurfacePatch, field: &AmbientField, s: T, t: T) -> [T; 2] {
    let fj = field_jet(patch, field, s, t);
    let jeta = cross(&fj.u, &fj.eta);
    fj.nperp().map(|n| vec7::dot(&n, &jeta))
}

/// `α_η(X) = ⟨∇⊥_X η, Jη⟩`.
pub fn alpha_form(patch: &SurfacePatch, s: f64, t: f64, x: &V7<f64>, field: &NormalField) -> Result<f64> {
    let cx = check_tangent(&jet(patch, s, t), x)?;
    let a = alpha_coords(patch, &field.recipe, s, t);
    Ok(cx[0] * a[0] + cx[1] * a[1])
}

/// `dα_η(∂_s, ∂_t)`, exact through nested duals.
pub fn d_alpha_coords(patch: &SurfacePatch, s: f64, t: f64, field: &NormalField) -> f64 {
    let a = alpha_coords(patch, &field.recipe, Dual::var(s), Dual::lift(t));
    let b = alpha_coords(patch, &field.recipe, Dual::lift(s), Dual::var(t));
    a[1].eps - b[0].eps
}

/// `dα_η(X, Y)` for tangent `X, Y`.
pub fn d_alpha(patch: &SurfacePatch, s: f64, t: f64, x: &V7<f64>, y: &V7<f64>, field: &NormalField) -> Result<f64> {
    let j = jet(patch, s, t);
    let (cx, cy) = (check_tangent(&j, x)?, check_tangent(&j, y)?);
    Ok((cx[0] * cy[1] - cx[1] * cy[0]) * d_alpha_coords(patch, s, t, field))
}

/// Geodesic variation `F(ε) = cos(ε|η|) u + sin(ε|η|)/|η| · η`, scaled by
/// `scale`. Its ε-curves are great circles, so `∇̄_η η = 0`, and boundary
/// points stay on any totally geodesic `L` to which `η` is tangent.
#[derive(Clone, Debug)]
pub struct GeodesicFamily<'a> {
    pub patch: &'a SurfacePatch,
    pub field: &'a NormalField,
    pub scale: f64,
}

impl<'a> GeodesicFamily<'a> {
    pub fn new(patch: &'a SurfacePatch, field: &'a NormalField) -> Self {
        GeodesicFamily { patch, field, scale: 1.0 }
    }

    pub fn eval<T: Real>(&self, s: T, t: T, eps: T) -> V7<T> {
        let u = self.patch.map.eval(s, t);
        let eta = vec7::scale(T::cst(self.scale), &normal_field_value(self.patch, &self.field.recipe, s, t));
        let y = eps * eps * vec7::norm2(&eta);
        vec7::add(&vec7::scale(cos_sqrt(y), &u), &vec7::scale(eps * sinc_sqrt(y), &eta))
    }

    fn area_element(&self, s: f64, t: f64, eps: f64) -> f64 {
        let a = self.eval(Dual::var(s), Dual::lift(t), Dual::lift(eps));
        let b = self.eval(Dual::lift(s), Dual::var(t), Dual::lift(eps));
        let (fs, ft) = (vec7::eps(&a), vec7::eps(&b));
        let (e, f, g) = (vec7::dot(&fs, &fs), vec7::dot(&fs, &ft), vec7::dot(&ft, &ft));
        (e * g - f * f).max(0.0).sqrt()
    }

    /// Area of `F(·, ·, ε)`.
    pub fn area(&self, eps: f64, n: usize) -> f64 {
        integrate(&domain_rule(&self.patch.domain, n), |s, t| [self.area_element(s, t, eps)])[0]
    }

    /// Covariant acceleration `∇̄_{∂ε}∂_ε F` at `ε = 0`.
    pub fn acceleration(&self, s: f64, t: f64) -> V7<f64> {
        let e = Dual::new(Dual::var(0.0), Dual::lift(1.0));
        let f = self.eval(Dual::lift(Dual::lift(s)), Dual::lift(Dual::lift(t)), e);
        let u = self.patch.point(s, t);
        sphere::proj(&u, &f.map(|d| d.eps.eps))
    }

    /// Largest distance of boundary points of `F(·, ·, ε)` from `L`.
    pub fn boundary_drift(&self, l: &LagrangianPatch, eps: f64, n: usize) -> f64 {
        boundary_rule(&self.patch.domain, n)
            .iter()
            .map(|b| l.plane_distance(&self.eval(b.s, b.t, eps)))
            .fold(0.0, f64::max)
    }
}

/// Area of the patch; fails if doubling the nodes changes it by more than
/// 1e−9 relative.
pub fn area(patch: &SurfacePatch, n: usize) -> Result<f64> {
    crate::quadrature::integrate_checked(&patch.domain, n, 1e-9, |s, t| {
        let [_, us, ut] = first_jet(patch, s, t);
        let (e, f, g) = (vec7::dot(&us, &us), vec7::dot(&us, &ut), vec7::dot(&ut, &ut));
        (e * g - f * f).max(0.0).sqrt()
    })
}

/// `(A(h) − 2A(0) + A(−h)) / h²`.
pub fn area_second_difference(family: &GeodesicFamily, h: f64, n: usize) -> f64 {
    (family.area(h, n) - 2.0 * family.area(0.0, n) + family.area(-h, n)) / (h * h)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecondDifference {
    pub value: f64,
    pub half_step: f64,
    pub step_change: f64,
}

/// Second difference at `h` and `h/2`; errors if they differ by more than
/// 1e−4 relative.
pub fn area_second_difference_checked(family: &GeodesicFamily, h: f64, n: usize) -> Result<SecondDifference> {
    let value = area_second_difference(family, h, n);
    let half_step = area_second_difference(family, 0.5 * h, n);
    let step_change = (value - half_step).abs() / value.abs().max(1.0);
    if step_change > 1e-4 {
        return Err(Error::Accuracy(format!("ε-step halving changed the second difference by {step_change:e}")));
    }
    Ok(SecondDifference { value, half_step, step_change })
}

fn check_minimal(patch: &SurfacePatch) -> Result<()> {
    for (s, t) in midpoint_grid(&patch.domain, 8) {
        let h = vec7::norm(&surface::mean_curvature(patch, s, t));
        if h > MINIMAL_TOL {
            return Err(Error::Precondition(format!("patch is not minimal: |H| = {h:e} at ({s}, {t})")));
        }
    }
    Ok(())
}

fn check_holomorphic(patch: &SurfacePatch) -> Result<()> {
    for (s, t) in midpoint_grid(&patch.domain, 8) {
        let (d, _) = surface::holomorphic_defects(patch, s, t)?;
        if d > HOLO_TOL {
            return Err(Error::Precondition(format!("patch is not holomorphic: defect {d:e} at ({s}, {t})")));
        }
    }
    Ok(())
}

/// Boundary lies on `L` and `L` is Lagrangian there.
pub fn check_lagrangian_boundary(patch: &SurfacePatch, l: &LagrangianPatch, n: usize) -> Result<()> {
    for b in boundary_rule(&patch.domain, n) {
        let x = patch.point(b.s, b.t);
        let d = l.plane_distance(&x);
        if d > 1e-8 {
            return Err(Error::Precondition(format!("boundary leaves L by {d:e}")));
        }
        let w = l.lagrangian_defect(&x)?;
        if w > 1e-8 {
            return Err(Error::Precondition(format!("boundary 3-fold is not Lagrangian (|ω|_L| = {w:e})")));
        }
    }
    Ok(())
}

/// Terms of the general second-variation formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeneralBreakdown {
    /// `∫ ‖∇⊥η‖²`
    pub gradient: f64,
    /// `−∫ ‖Wη‖²`
    pub shape: f64,
    /// `−∫ Σ R̄(η, eᵢ, eᵢ, η)`
    pub curvature: f64,
    /// `∫_{∂Σ} ⟨∇̄_η η, ν⟩`
    pub boundary: f64,
    pub total: f64,
}

/// General second variation with the boundary term read off the family.
pub fn second_variation_general(family: &GeodesicFamily, q: &QuadratureSpec) -> Result<GeneralBreakdown> {
    let patch = family.patch;
    check_minimal(patch)?;
    let field = family.field.recipe.scaled(family.scale);
    let [gradient, shape, curvature] = integrate(&domain_rule(&patch.domain, q.interior), |s, t| {
        let j = jet(patch, s, t);
        let (eta, np) = nperp_at(patch, &field, s, t);
        let ii = surface::second_fundamental_coords(&j);
        let frame = j.tangent_frame();
        let c = frame.map(|e| j.coords(&e));
        let mut g = 0.0;
        let mut w = 0.0;
        let mut r = 0.0;
        for a in 0..2 {
            g += vec7::norm2(&along(c[a], &np));
            r += sphere::riemann_raw(&eta, &frame[a], &frame[a], &eta);
            for b in 0..2 {
                let mut iiab = [0.0; 7];
                for p in 0..2 {
                    for q in 0..2 {
                        iiab = vec7::axpy(&iiab, c[a][p] * c[b][q], &ii[p][q]);
                    }
                }
                w += vec7::dot(&iiab, &eta).powi(2);
            }
        }
        let da = j.area_element();
        [g * da, -w * da, -r * da]
    });
    let [boundary] = try_integrate_boundary(&boundary_rule(&patch.domain, q.boundary), |b| {
        let frame = BoundaryFrameData::at(patch, b.s, b.t)?;
        let j = jet(patch, b.s, b.t);
        let speed = vec7::norm(&j.from_coords([b.ds, b.dt]));
        Ok([vec7::dot(&family.acceleration(b.s, b.t), &frame.conormal) * speed])
    })?;
    Ok(GeneralBreakdown { gradient, shape, curvature, boundary, total: gradient + shape + curvature + boundary })
}

/// Terms of the nearly-Kähler second-variation formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NkBreakdown {
    /// `∫ ½‖𝒟η‖²`
    pub dbar: f64,
    /// `∫ ⅓ dω(e, Jη, 𝒟_eη)`
    pub d_omega: f64,
    /// `−2λ² ∫ ‖η‖²`
    pub mass: f64,
    pub total: f64,
}

/// Linear pointwise data `(u, e, η, 𝒟_eη)` with `e = u_s/|u_s|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NkPointData {
    pub u: V7<f64>,
    pub e: V7<f64>,
    pub eta: V7<f64>,
    pub d_eta: V7<f64>,
    pub area_element: f64,
}

pub fn nk_point_data(patch: &SurfacePatch, field: &AmbientField, s: f64, t: f64, e: Option<V7<f64>>) -> NkPointData {
    let j = jet(patch, s, t);
    let e = e.unwrap_or_else(|| vec7::normalize(&j.us));
    let je = cross(&j.u, &e);
    let (eta, np) = nperp_at(patch, field, s, t);
    let d = vec7::add(&along(j.coords(&e), &np), &cross(&j.u, &along(j.coords(&je), &np)));
    NkPointData { u: j.u, e, eta, d_eta: d, area_element: j.area_element() }
}

/// `[‖𝒟_eη‖², φ₀(e, Jη, 𝒟_eη), −2λ²‖η‖²]` from linear data.
pub fn nk_integrand_terms(u: &V7<f64>, e: &V7<f64>, eta: &V7<f64>, d: &V7<f64>) -> [f64; 3] {
    [
        vec7::norm2(d),
        surface::third_d_omega(e, &cross(u, eta), d),
        -2.0 * LAMBDA * LAMBDA * vec7::norm2(eta),
    ]
}

/// Integrand of the nearly-Kähler formula at a point for unit tangent `e`.
pub fn nk_integrand(patch: &SurfacePatch, s: f64, t: f64, field: &NormalField, e: &V7<f64>) -> Result<f64> {
    let j = jet(patch, s, t);
    check_tangent(&j, e)?;
    check_tangent(&j, &cross(&j.u, e))?;
    let p = nk_point_data(patch, &field.recipe, s, t, Some(vec7::normalize(e)));
    Ok(nk_integrand_terms(&p.u, &p.e, &p.eta, &p.d_eta).iter().sum())
}

/// Validates the configuration for the nearly-Kähler formula.
pub fn check_nk_preconditions(patch: &SurfacePatch, l: &LagrangianPatch, field: &NormalField, q: &QuadratureSpec) -> Result<()> {
    check_minimal(patch)?;
    check_holomorphic(patch)?;
    check_lagrangian_boundary(patch, l, q.boundary)?;
    let r = field.boundary_tangency(patch, l, q.boundary)?;
    if r > ADMISSIBLE_TOL {
        return Err(Error::Precondition(format!("field `{}` is not tangent to L along the boundary ({r:e})", field.name)));
    }
    Ok(())
}

/// Nearly-Kähler second variation; no boundary integral.
pub fn second_variation_nk(patch: &SurfacePatch, l: &LagrangianPatch, field: &NormalField, q: &QuadratureSpec) -> Result<NkBreakdown> {
    check_nk_preconditions(patch, l, field, q)?;
    Ok(nk_unchecked(patch, &field.recipe, q.interior))
}

pub(crate) fn nk_unchecked(patch: &SurfacePatch, field: &AmbientField, n: usize) -> NkBreakdown {
    let [dbar, d_omega, mass] = integrate(&domain_rule(&patch.domain, n), |s, t| {
        let p = nk_point_data(patch, field, s, t, None);
        nk_integrand_terms(&p.u, &p.e, &p.eta, &p.d_eta).map(|v| v * p.area_element)
    });
    NkBreakdown { dbar, d_omega, mass, total: dbar + d_omega + mass }
}

/// `δ²A(η, ξ) = ¼[δ²A(η + ξ) − δ²A(η − ξ)]`.
pub fn polarization(patch: &SurfacePatch, l: &LagrangianPatch, eta: &NormalField, xi: &NormalField, q: &QuadratureSpec) -> Result<f64> {
    let p = second_variation_nk(patch, l, &eta.plus(xi), q)?.total;
    let m = second_variation_nk(patch, l, &eta.minus(xi), q)?.total;
    Ok(0.25 * (p - m))
}

fn holomorphic_frame(patch: &SurfacePatch, s: f64, t: f64) -> Result<[V7<f64>; 2]> {
    let (d, _) = surface::holomorphic_defects(patch, s, t)?;
    if d > HOLO_TOL {
        return Err(Error::Precondition(format!("not holomorphic at ({s}, {t}): defect {d:e}")));
    }
    let j = jet(patch, s, t);
    let e1 = vec7::normalize(&j.us);
    Ok([e1, cross(&j.u, &e1)])
}

/// `|‖Wη‖² + Σ R̄(η,eᵢ,eᵢ,η) − (−R⊥(e₁,e₂,η,Jη) + 2λ²‖η‖²)|` with `e₂ = Je₁`.
pub fn lemma41_residual(patch: &SurfacePatch, s: f64, t: f64, eta: &V7<f64>) -> Result<f64> {
    let [e1, e2] = holomorphic_frame(patch, s, t)?;
    let u = patch.point(s, t);
    let mut lhs = 0.0;
    for e in [e1, e2] {
        lhs += vec7::norm2(&surface::shape_operator(patch, s, t, &e, eta)?);
        lhs += sphere::riemann_raw(eta, &e, &e, eta);
    }
    let rperp = surface::normal_curvature(patch, s, t, &e1, &e2, eta, &cross(&u, eta))?;
    let rhs = -rperp + 2.0 * LAMBDA * LAMBDA * vec7::norm2(eta);
    Ok((lhs - rhs).abs())
}

/// `⟨P(e, Jη), 𝒟_e η⟩`.
pub fn torsion_pairing(patch: &SurfacePatch, s: f64, t: f64, field: &NormalField, e: &V7<f64>) -> Result<f64> {
    let d = dbar_d(patch, s, t, e, field)?;
    let u = patch.point(s, t);
    let eta = field.value(patch, s, t);
    Ok(vec7::dot(&sphere::torsion_generic(&u, e, &cross(&u, &eta)), &d))
}

/// Residual of
/// `‖∇⊥η‖² + R⊥(e₁,e₂,η,Jη) = ½‖𝒟η‖² + ⟨P(e₁,Jη), 𝒟_{e₁}η⟩ + dα_η(e₁,e₂)`.
pub fn lemma42_residual(patch: &SurfacePatch, s: f64, t: f64, field: &NormalField) -> Result<f64> {
    let [e1, e2] = holomorphic_frame(patch, s, t)?;
    let j = jet(patch, s, t);
    let (eta, np) = nperp_at(patch, &field.recipe, s, t);
    let (n1, n2) = (along(j.coords(&e1), &np), along(j.coords(&e2), &np));
    let jeta = cross(&j.u, &eta);
    let rperp = surface::normal_curvature(patch, s, t, &e1, &e2, &eta, &jeta)?;
    let lhs = vec7::norm2(&n1) + vec7::norm2(&n2) + rperp;
    let d1 = vec7::add(&n1, &cross(&j.u, &n2));
    let g = vec7::dot(&sphere::torsion_generic(&j.u, &e1, &jeta), &d1);
    let rhs = vec7::norm2(&d1) + g + d_alpha(patch, s, t, &e1, &e2, field)?;
    Ok((lhs - rhs).abs())
}

/// `|⟨∇̄_η η, ν⟩ + ⟨∇⊥_T η, Jη⟩|` at a boundary point, with `∇̄_η η` taken
/// from the family.
pub fn lemma43_boundary_residual(patch: &SurfacePatch, l: &LagrangianPatch, s: f64, t: f64, family: &GeodesicFamily) -> Result<f64> {
    let u = patch.point(s, t);
    if l.plane_distance(&u) > 1e-8 {
        return Err(Error::Precondition(format!("({s}, {t}) does not map into L")));
    }
    let field = family.field.scaled(family.scale);
    let eta = field.value(patch, s, t);
    let d = l.tangent_distance(&u, &eta)?;
    if d > ADMISSIBLE_TOL {
        return Err(Error::Precondition(format!("field is not tangent to L at ({s}, {t}) ({d:e})")));
    }
    holomorphic_frame(patch, s, t)?;
    let frame = BoundaryFrameData::at(patch, s, t)?;
    let acc = vec7::dot(&family.acceleration(s, t), &frame.conormal);
    let nt = surface::normal_connection(patch, s, t, &frame.tangent, &field.recipe)?;
    Ok((acc + vec7::dot(&nt, &cross(&u, &eta))).abs())
}

fn axis_index(v: &V7<f64>) -> Option<usize> {
    let i = (0..7).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))?;
    ((v[i] - 1.0).abs() < 1e-12).then_some(i)
}

fn axis_name(v: &V7<f64>) -> String {
    match axis_index(v) {
        Some(i) => format!("e{}", i + 1),
        None => format!("{v:?}"),
    }
}

/// Admissible polynomial fields on a hemisphere with boundary on `L`.
///
/// The normal bundle of a great hemisphere `S⁶ ∩ span(b₀,b₁,b₂)` is the
/// constant space `span(b₀,b₁,b₂)^⊥`. Normal directions lying in `L`'s
/// 4-plane are tangent to `L` along the boundary, so they are multiplied by
/// every monomial `x^a y^b z^c` (`c ≤ 1`, `a + b + c ≤ degree`). Directions
/// orthogonal to the plane must vanish on the boundary circle `z = 0`, so
/// they only take monomials with `c = 1`. Here `(x, y, z)` are the ambient
/// coordinates along `b₀, b₁, b₂`, and `z² = 1 − x² − y²` on the surface
/// removes higher powers of `z`. Fields are ordered by degree, so bases of
/// increasing degree are nested.
pub fn admissible_basis(patch: &SurfacePatch, l: &LagrangianPatch, degree: usize) -> Result<Vec<NormalField>> {
    let PatchMap::Hemisphere { basis } = &patch.map else {
        return Err(Error::Precondition("basis recipe is defined for hemisphere patches".into()));
    };
    let idx: Vec<usize> = basis
        .iter()
        .map(|b| axis_index(b).ok_or_else(|| Error::Precondition("hemisphere basis must be coordinate axes".into())))
        .collect::<Result<_>>()?;
    let normals = jet(patch, 0.0, 0.0).normal_basis();
    let mut free = Vec::new();
    for n in &normals {
        let inside = vec7::norm(&l.project_plane(n));
        if (inside - 1.0).abs() < 1e-10 {
            free.push(*n);
        } else if inside > 1e-10 {
            return Err(Error::Precondition("normal frame is not adapted to L".into()));
        }
    }
    let mut out = Vec::new();
    for d in 0..=degree {
        for c in 0..=1usize.min(d) {
            for a in (0..=(d - c)).rev() {
                let b = d - c - a;
                let mut powers = [0u8; 7];
                powers[idx[0]] = a as u8;
                powers[idx[1]] = b as u8;
                powers[idx[2]] = c as u8;
                let mono = monomial_name(&idx, [a, b, c]);
                let dirs: &[V7<f64>] = if c == 1 { &normals } else { &free };
                for n in dirs {
                    let recipe = AmbientField { terms: vec![(vec![Monomial { coeff: 1.0, powers }], *n)] };
                    out.push(NormalField::new(format!("{mono}{}", axis_name(n)), recipe));
                }
            }
        }
    }
    Ok(out)
}

fn monomial_name(idx: &[usize], p: [usize; 3]) -> String {
    let mut s = String::new();
    for k in 0..3 {
        match p[k] {
            0 => {}
            1 => s.push_str(&format!("x{}*", idx[k] + 1)),
            m => s.push_str(&format!("x{}^{m}*", idx[k] + 1)),
        }
    }
    s
}
