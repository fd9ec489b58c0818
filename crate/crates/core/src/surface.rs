//! Parametrized surfaces in S⁶.
//!
//! Patches are closed-form maps `(s, t) ↦ u(s, t) ∈ S⁶` written generically
//! over [`Real`], so every jet is exact. Normal fields are given by ambient
//! recipes `η = π_N(Σ p_k(u) c_k)` with polynomials `p_k`, and the constant
//! recipe `π_N(v)` is the canonical extension of a normal vector.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Real};
use crate::error::{Error, Result};
use crate::octonion::{cross, phi0_generic};
use crate::quadrature::Domain;
use crate::sphere::{self, FrameSU3, SpherePoint};
use crate::vec7::{self, V7};

/// Closed-form surface maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PatchMap {
    /// Great 2-sphere `S⁶ ∩ span(b₀,b₁,b₂)` in spherical coordinates
    /// `s = polar angle`, `t = azimuth`.
    GreatSphere { basis: [V7<f64>; 3] },
    /// Upper hemisphere `⟨x, b₂⟩ ≥ 0` of the great sphere over the unit disk
    /// via `(2s, 2t, 1 − r²)/(1 + r²)`.
    Hemisphere { basis: [V7<f64>; 3] },
    /// Small sphere `h·axis + √(1 − h²)·S²(b₀,b₁,b₂)`, spherical coordinates.
    SmallSphere { basis: [V7<f64>; 3], axis: V7<f64>, height: f64 },
    /// Flat holomorphic torus
    /// `(0, cos s, sin s, cos t, sin t, cos(s+t), −sin(s+t))/√3`.
    HolomorphicTorus,
}

impl PatchMap {
    pub fn eval<T: Real>(&self, s: T, t: T) -> V7<T> {
        match self {
            PatchMap::GreatSphere { basis } => {
                let (ss, cs, st, ct) = (s.sin(), s.cos(), t.sin(), t.cos());
                combine(basis, [ss * ct, ss * st, cs])
            }
            PatchMap::Hemisphere { basis } => {
                let r2 = s * s + t * t;
                let k = T::one() / (T::one() + r2);
                combine(basis, [(s + s) * k, (t + t) * k, (T::one() - r2) * k])
            }
            PatchMap::SmallSphere { basis, axis, height } => {
                let rad = T::cst((1.0 - height * height).sqrt());
                let (ss, cs, st, ct) = (s.sin(), s.cos(), t.sin(), t.cos());
                let x = combine(basis, [rad * ss * ct, rad * ss * st, rad * cs]);
                vec7::axpy(&x, T::cst(*height), &vec7::lift(axis))
            }
            PatchMap::HolomorphicTorus => {
                let k = T::cst(1.0 / 3f64.sqrt());
                let st = s + t;
                [T::zero(), s.cos() * k, s.sin() * k, t.cos() * k, t.sin() * k, st.cos() * k, -st.sin() * k]
            }
        }
    }
}

fn combine<T: Real>(basis: &[V7<f64>; 3], c: [T; 3]) -> V7<T> {
    let mut out = vec7::zero::<T>();
    for k in 0..3 {
        out = vec7::axpy(&out, c[k], &vec7::lift(&basis[k]));
    }
    out
}

/// A surface patch: map plus parameter domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePatch {
    pub map: PatchMap,
    pub domain: Domain,
}

impl SurfacePatch {
    pub fn new(map: PatchMap, domain: Domain) -> Self {
        SurfacePatch { map, domain }
    }

    pub fn point(&self, s: f64, t: f64) -> V7<f64> {
        self.map.eval(s, t)
    }

    /// Midpoint-grid check of sphericity (1e−10) and immersion (smallest
    /// singular value of the differential > 1e−6). Midpoints stay away from
    /// coordinate singularities on the domain boundary.
    pub fn validate(&self, n: usize) -> Result<()> {
        for (s, t) in midpoint_grid(&self.domain, n) {
            let u = self.point(s, t);
            let dn = (vec7::norm(&u) - 1.0).abs();
            if dn > 1e-10 {
                return Err(Error::DegenerateInput(format!("patch leaves the sphere by {dn:e} at ({s}, {t})")));
            }
            let sv = min_singular_value(&jet(self, s, t));
            if sv < 1e-6 {
                return Err(Error::DegenerateInput(format!("not an immersion at ({s}, {t}): σ_min = {sv:e}")));
            }
        }
        Ok(())
    }
}

/// Cell-midpoint sample grid with `n × n` points.
pub fn midpoint_grid(domain: &Domain, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
            out.push(match *domain {
                Domain::Rect { s0, s1, t0, t1 } => (s0 + a * (s1 - s0), t0 + b * (t1 - t0)),
                Domain::Disk { radius } => {
                    let (r, th) = (radius * a, 2.0 * std::f64::consts::PI * b);
                    (r * th.cos(), r * th.sin())
                }
            });
        }
    }
    out
}

/// `(u, u_s, u_t)` at a generic scalar.
pub fn first_jet<T: Real>(patch: &SurfacePatch, s: T, t: T) -> [V7<T>; 3] {
    let a = patch.map.eval(Dual::var(s), Dual::lift(t));
    let b = patch.map.eval(Dual::lift(s), Dual::var(t));
    [vec7::re(&a), vec7::eps(&a), vec7::eps(&b)]
}

/// Position and derivatives up to order two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub u: V7<f64>,
    pub us: V7<f64>,
    pub ut: V7<f64>,
    pub uss: V7<f64>,
    pub ust: V7<f64>,
    pub utt: V7<f64>,
}

impl Jet {
    pub fn metric(&self) -> [[f64; 2]; 2] {
        let e = vec7::dot(&self.us, &self.us);
        let f = vec7::dot(&self.us, &self.ut);
        let g = vec7::dot(&self.ut, &self.ut);
        [[e, f], [f, g]]
    }

    pub fn inverse_metric(&self) -> [[f64; 2]; 2] {
        let [[e, f], [_, g]] = self.metric();
        let d = e * g - f * f;
        [[g / d, -f / d], [-f / d, e / d]]
    }

    pub fn area_element(&self) -> f64 {
        let [[e, f], [_, g]] = self.metric();
        (e * g - f * f).max(0.0).sqrt()
    }

    pub fn point(&self) -> SpherePoint {
        SpherePoint::from_array(self.u).expect("patch points are nonzero")
    }

    /// Orthonormal `(e₁, e₂)` with `e₁ = u_s/|u_s|` and `e₂` completing the
    /// parameter orientation.
    pub fn tangent_frame(&self) -> [V7<f64>; 2] {
        let e1 = vec7::normalize(&self.us);
        let e2 = vec7::normalize(&vec7::reject_unit(&self.ut, &e1));
        [e1, e2]
    }

    /// Coordinates `(a, b)` with `π_T v = a u_s + b u_t`.
    pub fn coords(&self, v: &V7<f64>) -> [f64; 2] {
        tangent_coeffs(&self.us, &self.ut, v)
    }

    pub fn from_coords(&self, c: [f64; 2]) -> V7<f64> {
        vec7::add(&vec7::scale(c[0], &self.us), &vec7::scale(c[1], &self.ut))
    }

    pub fn normal_proj(&self, v: &V7<f64>) -> V7<f64> {
        normal_proj(&self.u, &self.us, &self.ut, v)
    }

    pub fn tangent_proj(&self, v: &V7<f64>) -> V7<f64> {
        self.from_coords(self.coords(v))
    }

    /// Orthonormal basis of the normal space `NΣ` (4 vectors).
    pub fn normal_basis(&self) -> Vec<V7<f64>> {
        let mut seeds = vec![self.u];
        seeds.extend(self.tangent_frame());
        let taken = vec7::gram_schmidt(&seeds, 1e-12).expect("frame");
        let mut out = taken.clone();
        for i in 0..7 {
            let mut w = vec7::basis(i);
            for _ in 0..2 {
                for q in &out {
                    w = vec7::reject_unit(&w, q);
                }
            }
            let n = vec7::norm(&w);
            if n > 0.3 {
                out.push(w.map(|c| c / n));
            }
            if out.len() == 7 {
                break;
            }
        }
        out.split_off(3)
    }
}

pub fn jet(patch: &SurfacePatch, s: f64, t: f64) -> Jet {
    let a = first_jet(patch, Dual::var(s), Dual::lift(t));
    let b = first_jet(patch, Dual::lift(s), Dual::var(t));
    Jet {
        u: vec7::re(&a[0]),
        us: vec7::re(&a[1]),
        ut: vec7::re(&a[2]),
        uss: vec7::eps(&a[1]),
        ust: vec7::eps(&a[2]),
        utt: vec7::eps(&b[2]),
    }
}

pub(crate) fn min_singular_value(j: &Jet) -> f64 {
    let [[e, f], [_, g]] = j.metric();
    let tr = e + g;
    let det = e * g - f * f;
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    (0.5 * tr - disc).max(0.0).sqrt()
}

/// `(a, b)` solving the normal equations for `v ≈ a u_s + b u_t`.
pub fn tangent_coeffs<T: Real>(us: &V7<T>, ut: &V7<T>, v: &V7<T>) -> [T; 2] {
    let e = vec7::dot(us, us);
    let f = vec7::dot(us, ut);
    let g = vec7::dot(ut, ut);
    let x = vec7::dot(us, v);
    let y = vec7::dot(ut, v);
    let d = e * g - f * f;
    [(g * x - f * y) / d, (e * y - f * x) / d]
}

/// Projection onto the normal space of the surface inside `T_uS⁶`.
pub fn normal_proj<T: Real>(u: &V7<T>, us: &V7<T>, ut: &V7<T>, v: &V7<T>) -> V7<T> {
    let w = sphere::proj(u, v);
    let [a, b] = tangent_coeffs(us, ut, &w);
    vec7::sub(&w, &vec7::add(&vec7::scale(a, us), &vec7::scale(b, ut)))
}

/// Monomial `coeff · Π xᵢ^{powers[i]}` in ambient coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: [u8; 7],
}

impl Monomial {
    pub fn eval<T: Real>(&self, x: &V7<T>) -> T {
        let mut acc = T::cst(self.coeff);
        for (i, &p) in self.powers.iter().enumerate() {
            if p > 0 {
                acc *= x[i].powi(p as u32);
            }
        }
        acc
    }
}

/// Ambient vector field `Σ p_k(x) c_k` with polynomial coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AmbientField {
    pub terms: Vec<(Vec<Monomial>, V7<f64>)>,
}

impl AmbientField {
    pub fn constant(v: V7<f64>) -> Self {
        AmbientField { terms: vec![(vec![Monomial { coeff: 1.0, powers: [0; 7] }], v)] }
    }

    pub fn eval<T: Real>(&self, x: &V7<T>) -> V7<T> {
        let mut out = vec7::zero::<T>();
        for (poly, c) in &self.terms {
            let mut p = T::zero();
            for m in poly {
                p += m.eval(x);
            }
            out = vec7::axpy(&out, p, &vec7::lift(c));
        }
        out
    }

    pub fn scaled(&self, k: f64) -> Self {
        AmbientField { terms: self.terms.iter().map(|(p, c)| (p.clone(), c.map(|x| k * x))).collect() }
    }

    pub fn plus(&self, other: &AmbientField) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        AmbientField { terms }
    }
}

/// `π_N(field(u(s,t)))` at a generic scalar.
pub fn normal_field_value<T: Real>(patch: &SurfacePatch, field: &AmbientField, s: T, t: T) -> V7<T> {
    let [u, us, ut] = first_jet(patch, s, t);
    normal_proj(&u, &us, &ut, &field.eval(&u))
}

/// Ambient partial derivatives `(∂_s η, ∂_t η)` of a normal field.
pub fn field_derivatives(patch: &SurfacePatch, field: &AmbientField, s: f64, t: f64) -> [V7<f64>; 2] {
    let a = normal_field_value(patch, field, Dual::var(s), Dual::lift(t));
    let b = normal_field_value(patch, field, Dual::lift(s), Dual::var(t));
    [vec7::eps(&a), vec7::eps(&b)]
}

/// Coordinate second fundamental form `II_ab = π_N(u_ab)`.
pub fn second_fundamental_coords(j: &Jet) -> [[V7<f64>; 2]; 2] {
    let (a, b, c) = (j.normal_proj(&j.uss), j.normal_proj(&j.ust), j.normal_proj(&j.utt));
    [[a, b], [b, c]]
}

pub(crate) fn check_tangent(j: &Jet, x: &V7<f64>) -> Result<[f64; 2]> {
    let c = j.coords(x);
    let r = vec7::dist_inf(&j.from_coords(c), x);
    if r > 1e-8 * vec7::norm(x).max(1.0) {
        return Err(Error::Domain(format!("vector not tangent to the surface (defect {r:e})")));
    }
    Ok(c)
}

pub(crate) fn check_normal(j: &Jet, eta: &V7<f64>) -> Result<()> {
    let r = vec7::dist_inf(&j.normal_proj(eta), eta);
    if r > 1e-8 * vec7::norm(eta).max(1.0) {
        return Err(Error::Domain(format!("vector not normal to the surface (defect {r:e})")));
    }
    Ok(())
}

/// `II(X, Y)` for tangent `X, Y`.
pub fn second_fundamental_form(patch: &SurfacePatch, s: f64, t: f64, x: &V7<f64>, y: &V7<f64>) -> Result<V7<f64>> {
    let j = jet(patch, s, t);
    let (cx, cy) = (check_tangent(&j, x)?, check_tangent(&j, y)?);
    Ok(ii_apply(&second_fundamental_coords(&j), cx, cy))
}

fn ii_apply(ii: &[[V7<f64>; 2]; 2], cx: [f64; 2], cy: [f64; 2]) -> V7<f64> {
    let mut out = [0.0; 7];
    for a in 0..2 {
        for b in 0..2 {
            out = vec7::axpy(&out, cx[a] * cy[b], &ii[a][b]);
        }
    }
    out
}

/// `W_X η = (∇̄_X η̃)ᵀ` with the canonical extension `η̃ = π_N(η)`.
pub fn shape_operator(patch: &SurfacePatch, s: f64, t: f64, x: &V7<f64>, eta: &V7<f64>) -> Result<V7<f64>> {
    let j = jet(patch, s, t);
    let cx = check_tangent(&j, x)?;
    check_normal(&j, eta)?;
    let d = field_derivatives(patch, &AmbientField::constant(*eta), s, t);
    let dx = vec7::add(&vec7::scale(cx[0], &d[0]), &vec7::scale(cx[1], &d[1]));
    Ok(j.tangent_proj(&dx))
}

/// `∇⊥_X η` for a normal field given by an ambient recipe.
pub fn normal_connection(patch: &SurfacePatch, s: f64, t: f64, x: &V7<f64>, field: &AmbientField) -> Result<V7<f64>> {
    let j = jet(patch, s, t);
    let cx = check_tangent(&j, x)?;
    let d = field_derivatives(patch, field, s, t);
    let dx = vec7::add(&vec7::scale(cx[0], &d[0]), &vec7::scale(cx[1], &d[1]));
    Ok(j.normal_proj(&dx))
}

/// Trace of II over the tangent plane.
pub fn mean_curvature(patch: &SurfacePatch, s: f64, t: f64) -> V7<f64> {
    let j = jet(patch, s, t);
    let ii = second_fundamental_coords(&j);
    let gi = j.inverse_metric();
    let mut h = [0.0; 7];
    for a in 0..2 {
        for b in 0..2 {
            h = vec7::axpy(&h, gi[a][b], &ii[a][b]);
        }
    }
    h
}

/// `∇⊥_{∂dir} π_N(v)` as a function of a generic parameter point.
fn nperp_dir<T: Real>(patch: &SurfacePatch, v: &V7<f64>, s: T, t: T, dir: usize) -> V7<T> {
    let field = AmbientField::constant(*v);
    let (sd, td) = if dir == 0 { (Dual::var(s), Dual::lift(t)) } else { (Dual::lift(s), Dual::var(t)) };
    let eta = normal_field_value(patch, &field, sd, td);
    let [u, us, ut] = first_jet(patch, s, t);
    normal_proj(&u, &us, &ut, &vec7::eps(&eta))
}

/// `R⊥(∂_s, ∂_t)η` via the commutator of `∇⊥` on the canonical extension.
pub fn normal_curvature_coords(patch: &SurfacePatch, s: f64, t: f64, eta: &V7<f64>) -> V7<f64> {
    let j = jet(patch, s, t);
    let st = vec7::eps(&nperp_dir(patch, eta, Dual::var(s), Dual::lift(t), 1));
    let ts = vec7::eps(&nperp_dir(patch, eta, Dual::lift(s), Dual::var(t), 0));
    j.normal_proj(&vec7::sub(&st, &ts))
}

/// `R⊥(X, Y, η, ξ) = ⟨R⊥(X, Y)η, ξ⟩`.
pub fn normal_curvature(
    patch: &SurfacePatch,
    s: f64,
    t: f64,
    x: &V7<f64>,
    y: &V7<f64>,
    eta: &V7<f64>,
    xi: &V7<f64>,
) -> Result<f64> {
    let j = jet(patch, s, t);
    let (cx, cy) = (check_tangent(&j, x)?, check_tangent(&j, y)?);
    check_normal(&j, eta)?;
    let area = cx[0] * cy[1] - cx[1] * cy[0];
    Ok(area * vec7::dot(&normal_curvature_coords(patch, s, t, eta), xi))
}

/// Residual of the Ricci equation
/// `R̄(X,Y,η,ξ) − R⊥(X,Y,η,ξ) − ⟨W_Xη, W_Yξ⟩ + ⟨W_Xξ, W_Yη⟩`.
pub fn ricci_residual(
    patch: &SurfacePatch,
    s: f64,
    t: f64,
    x: &V7<f64>,
    y: &V7<f64>,
    eta: &V7<f64>,
    xi: &V7<f64>,
) -> Result<f64> {
    let rbar = sphere::riemann_raw(x, y, eta, xi);
    let rperp = normal_curvature(patch, s, t, x, y, eta, xi)?;
    let w = |a: &V7<f64>, n: &V7<f64>| shape_operator(patch, s, t, a, n);
    let r = rbar - rperp - vec7::dot(&w(x, eta)?, &w(y, xi)?) + vec7::dot(&w(x, xi)?, &w(y, eta)?);
    Ok(r.abs())
}

/// The two equivalent holomorphicity defects at a point: the distance of
/// `Je₁` from the tangent plane, and `√(1 − (ω(e₁,e₂))²)`, which vanishes
/// exactly when `|ω|_Σ| = vol_Σ`.
pub fn holomorphic_defects(patch: &SurfacePatch, s: f64, t: f64) -> Result<(f64, f64)> {
    let j = jet(patch, s, t);
    if min_singular_value(&j) < 1e-6 {
        return Err(Error::DegenerateInput(format!("not an immersion at ({s}, {t})")));
    }
    let [e1, e2] = j.tangent_frame();
    let je1 = sphere::j_generic(&j.u, &e1);
    let d1 = vec7::norm(&vec7::sub(&je1, &j.tangent_proj(&je1)));
    let w = sphere::omega_generic(&j.u, &e1, &e2);
    let d2 = (1.0 - w * w).max(0.0).sqrt();
    Ok((d1, d2))
}

/// J-invariance of the tangent plane within `tol`.
pub fn is_holomorphic(patch: &SurfacePatch, s: f64, t: f64, tol: f64) -> Result<bool> {
    Ok(holomorphic_defects(patch, s, t)?.0 < tol)
}

/// An SU(3)-frame with `TΣ = span(e₁, e₂)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptedU2Frame {
    pub s: f64,
    pub t: f64,
    pub frame: FrameSU3,
}

impl AdaptedU2Frame {
    pub fn vectors(&self) -> [V7<f64>; 6] {
        self.frame.vectors()
    }
}

/// Adapted frame with `e₁ = u_s/|u_s|` and normal legs seeded from the
/// ambient basis.
pub fn adapt_u2_frame(patch: &SurfacePatch, s: f64, t: f64) -> Result<AdaptedU2Frame> {
    adapt_u2_frame_with(patch, s, t, 0.0, None)
}

/// Adapted frame with first leg rotated by `angle` in the tangent plane
/// (towards `Je₁`) and an optional seed for `e₃`.
pub fn adapt_u2_frame_with(
    patch: &SurfacePatch,
    s: f64,
    t: f64,
    angle: f64,
    normal_seed: Option<V7<f64>>,
) -> Result<AdaptedU2Frame> {
    let (d, _) = holomorphic_defects(patch, s, t)?;
    if d > 1e-6 {
        return Err(Error::Precondition(format!("tangent plane is not J-invariant (defect {d:e})")));
    }
    let j = jet(patch, s, t);
    let p = j.point();
    let e = vec7::normalize(&j.us);
    let je = sphere::j_generic(&j.u, &e);
    let e1 = vec7::add(&vec7::scale(angle.cos(), &e), &vec7::scale(angle.sin(), &je));
    let mut seeds = vec![e1];
    if let Some(n) = normal_seed {
        seeds.push(j.normal_proj(&n));
    }
    let frame = FrameSU3::from_seeds(&p, &seeds)?;
    Ok(AdaptedU2Frame { s, t, frame })
}

/// Hopf coefficients `κ = κ₁ + iκ₂`, `μ = μ₁ + iμ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfCoefficients {
    pub kappa: Complex64,
    pub mu: Complex64,
}

impl HopfCoefficients {
    /// `|κ|² + |μ|²`, the frame-independent magnitude of Φ.
    pub fn magnitude2(&self) -> f64 {
        self.kappa.norm_sqr() + self.mu.norm_sqr()
    }
}

/// Reads `(κ, μ)` from `II(e₁,e₁) = κ₁e₃ + κ₂e₄ + μ₁e₅ − μ₂e₆` and
/// `II(e₁,e₂) = −κ₂e₃ + κ₁e₄ + μ₂e₅ + μ₁e₆`; the readings must agree.
pub fn hopf_coefficients(patch: &SurfacePatch, frame: &AdaptedU2Frame) -> Result<HopfCoefficients> {
    let j = jet(patch, frame.s, frame.t);
    let ii = second_fundamental_coords(&j);
    let e = frame.vectors();
    let (c1, c2) = (j.coords(&e[0]), j.coords(&e[1]));
    let ii11 = ii_apply(&ii, c1, c1);
    let ii12 = ii_apply(&ii, c1, c2);
    let d = |v: &V7<f64>, k: usize| vec7::dot(v, &e[k]);
    let a = [d(&ii11, 2), d(&ii11, 3), d(&ii11, 4), -d(&ii11, 5)];
    let b = [d(&ii12, 3), -d(&ii12, 2), d(&ii12, 5), d(&ii12, 4)];
    let gap = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if gap > 1e-6 {
        return Err(Error::ModelViolation(format!(
            "Hopf readings from II(e₁,e₁) and II(e₁,e₂) disagree by {gap:e}"
        )));
    }
    Ok(HopfCoefficients { kappa: Complex64::new(a[0], a[1]), mu: Complex64::new(a[2], a[3]) })
}

/// A geodesic ball of S⁶.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: SpherePoint,
    pub radius: f64,
}

impl Ball {
    /// Outward unit normal of the boundary sphere at `x`.
    pub fn normal(&self, x: &V7<f64>) -> V7<f64> {
        let c = self.center.x();
        let (cr, sr) = (self.radius.cos(), self.radius.sin());
        vec7::scale(1.0 / sr, &vec7::sub(&vec7::scale(cr, x), &c))
    }

    pub fn distance_defect(&self, x: &V7<f64>) -> f64 {
        let d = vec7::dot(x, &self.center.x()).clamp(-1.0, 1.0).acos();
        (d - self.radius).abs()
    }

    /// `max ‖A(b) − cot(ρ) b‖` over an orthonormal basis of `T_xS`, where
    /// `A(X) = ∇̄_X ν` is computed along curves inside the boundary sphere.
    pub fn umbilicity_residual(&self, x: &V7<f64>) -> f64 {
        let c = self.center.x();
        let (cr, sr) = (self.radius.cos(), self.radius.sin());
        let y = vec7::normalize(&vec7::reject_unit(x, &c));
        let mut seeds = vec![c, y];
        seeds.extend((0..7).map(vec7::basis::<f64>));
        let mut basis: Vec<V7<f64>> = Vec::new();
        let mut taken: Vec<V7<f64>> = vec![c, y];
        for v in seeds.iter().skip(2) {
            let mut w = *v;
            for _ in 0..2 {
                for q in &taken {
                    w = vec7::reject_unit(&w, q);
                }
            }
            let n = vec7::norm(&w);
            if n > 0.3 {
                let w = w.map(|k| k / n);
                taken.push(w);
                basis.push(w);
            }
        }
        let cot = cr / sr;
        basis
            .iter()
            .map(|b| {
                // γ(τ) = cos ρ c + sin ρ (cos τ y + sin τ b), |γ'(0)| = sin ρ
                let tau = Dual::var(0.0);
                let yy = vec7::axpy(&vec7::scale(tau.cos(), &vec7::lift(&y)), tau.sin(), &vec7::lift(b));
                let g = vec7::axpy(&vec7::scale(Dual::cst(cr), &vec7::lift(&c)), Dual::cst(sr), &yy);
                let nu = vec7::scale(Dual::cst(1.0 / sr), &vec7::sub(&vec7::scale(Dual::cst(cr), &g), &vec7::lift(&c)));
                let a = vec7::scale(1.0 / sr, &sphere::proj(x, &vec7::eps(&nu)));
                vec7::norm(&vec7::sub(&a, &vec7::scale(cot, b)))
            })
            .fold(0.0, f64::max)
    }
}

/// Orthogonality of a boundary point of the patch against the ball boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    /// `|ν − π_TΣ ν|`
    pub angle_defect: f64,
    /// `max ‖A − cot(ρ) Id‖` on `T_xS`
    pub umbilicity: f64,
}

pub fn boundary_orthogonality(patch: &SurfacePatch, ball: &Ball, s: f64, t: f64) -> Result<OrthogonalityReport> {
    let j = jet(patch, s, t);
    let d = ball.distance_defect(&j.u);
    if d > 1e-8 {
        return Err(Error::Precondition(format!("boundary point is {d:e} away from the ball boundary")));
    }
    let nu = ball.normal(&j.u);
    let angle_defect = vec7::norm(&vec7::sub(&nu, &j.tangent_proj(&nu)));
    Ok(OrthogonalityReport { angle_defect, umbilicity: ball.umbilicity_residual(&j.u) })
}

/// Results of the rigidity mechanism along a free boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub max_orthogonality_defect: f64,
    pub max_ii12_boundary: f64,
    pub max_phi_boundary: f64,
    pub max_phi_interior: f64,
    pub passed: bool,
}

/// Evaluates `II(e₁, e₂)` with `e₁` the tangential part of the ball normal
/// and `|Φ| = √(|κ|² + |μ|²)` at the boundary samples, plus `|Φ|` at
/// interior samples.
pub fn rigidity_probe(
    patch: &SurfacePatch,
    ball: &Ball,
    boundary: &[(f64, f64)],
    interior: &[(f64, f64)],
    tol: f64,
) -> Result<RigidityReport> {
    let mut rep = RigidityReport::default();
    for &(s, t) in boundary {
        let o = boundary_orthogonality(patch, ball, s, t)?;
        rep.max_orthogonality_defect = rep.max_orthogonality_defect.max(o.angle_defect);
        let j = jet(patch, s, t);
        let e1 = vec7::normalize(&j.tangent_proj(&ball.normal(&j.u)));
        let e2 = sphere::j_generic(&j.u, &e1);
        let ii = second_fundamental_form(patch, s, t, &e1, &j.tangent_proj(&e2))?;
        rep.max_ii12_boundary = rep.max_ii12_boundary.max(vec7::norm(&ii));
        let frame = adapt_u2_frame(patch, s, t)?;
        let h = hopf_coefficients(patch, &frame)?;
        rep.max_phi_boundary = rep.max_phi_boundary.max(h.magnitude2().sqrt());
    }
    for &(s, t) in interior {
        let frame = adapt_u2_frame(patch, s, t)?;
        let h = hopf_coefficients(patch, &frame)?;
        rep.max_phi_interior = rep.max_phi_interior.max(h.magnitude2().sqrt());
    }
    rep.passed = rep.max_orthogonality_defect < tol
        && rep.max_ii12_boundary < tol
        && rep.max_phi_boundary < tol
        && rep.max_phi_interior < tol;
    Ok(rep)
}

/// Tangential component of `P(X, η)` for tangent `X` and normal `η`.
pub fn torsion_tangential_part(patch: &SurfacePatch, s: f64, t: f64, x: &V7<f64>, eta: &V7<f64>) -> Result<f64> {
    let j = jet(patch, s, t);
    check_tangent(&j, x)?;
    check_normal(&j, eta)?;
    let p = sphere::torsion_generic(&j.u, x, eta);
    Ok(vec7::norm(&j.tangent_proj(&p)))
}

/// `φ₀(X, Y, Z)`, which equals `⅓ dω(X, Y, Z)` on tangent vectors.
pub fn third_d_omega(x: &V7<f64>, y: &V7<f64>, z: &V7<f64>) -> f64 {
    phi0_generic(x, y, z)
}

/// Unit vector `J X` for ambient tangent `X` at `u`.
pub fn j_at(u: &V7<f64>, x: &V7<f64>) -> V7<f64> {
    cross(u, x)
}
