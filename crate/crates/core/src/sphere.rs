//! The round unit 6-sphere with its nearly-Kähler structure.
//!
//! At `p ∈ S⁶ ⊂ ℝ⁷` the almost complex structure is `J_p v = p × v`, the
//! Kähler form is `ω(x, y) = ⟨Jx, y⟩ = φ₀(p, x, y)` and the complex volume
//! form is `Υ = ψ₀(p, ·, ·, ·) + i φ₀`. The Levi-Civita connection is the
//! ambient derivative followed by tangential projection, and the torsion
//! tensor is `P(X, Y) = (∇_X J)Y = proj_p(X × Y)`.
//!
//! Tangent vectors are extended to fields by ambient constancy followed by
//! pointwise projection. Derivatives of analytically given fields use dual
//! numbers; finite-difference fallbacks are provided for comparison.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Real};
use crate::error::{Error, Result};
use crate::exterior::{self, SphereChart};
use crate::octonion::{cross, phi0_generic, psi0_generic, ImOct};
use crate::vec7::{self, V7};

const BASE_TOL: f64 = 1e-12;
const TANGENT_TOL: f64 = 1e-10;

/// Type constant of the nearly-Kähler structure on the unit sphere.
pub const LAMBDA: f64 = 1.0;

/// A point of the unit sphere, renormalized on construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    position: ImOct,
}

impl SpherePoint {
    pub fn new(v: ImOct) -> Result<Self> {
        let n = v.norm();
        if n.is_nan() || n <= 1e-300 || !n.is_finite() {
            return Err(Error::DegenerateInput("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(SpherePoint { position: (1.0 / n) * v })
    }

    pub fn from_array(v: V7<f64>) -> Result<Self> {
        Self::new(ImOct(v))
    }

    pub fn basis(i: usize) -> Self {
        SpherePoint { position: ImOct::basis(i) }
    }

    pub fn position(&self) -> ImOct {
        self.position
    }

    pub fn x(&self) -> V7<f64> {
        self.position.0
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_array(random_direction(rng)).expect("nonzero sample")
    }

    fn check_same(&self, other: &SpherePoint) -> Result<()> {
        if vec7::dist_inf(&self.x(), &other.x()) > BASE_TOL {
            return Err(Error::Domain("tangent vector based at a different point".into()));
        }
        Ok(())
    }
}

/// Uniformly distributed unit vector in ℝ⁷ (rejection from the cube).
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> V7<f64> {
    loop {
        let v: V7<f64> = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = vec7::norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

/// A vector tangent to S⁶ at `base`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVec {
    pub base: SpherePoint,
    pub vec: ImOct,
}

impl TangentVec {
    pub fn new(base: SpherePoint, v: ImOct) -> Result<Self> {
        let d = base.position.dot(&v);
        if d.abs() > TANGENT_TOL * v.norm().max(1.0) {
            return Err(Error::Domain(format!("vector not tangent: ⟨p, v⟩ = {d:e}")));
        }
        Ok(TangentVec { base, vec: v })
    }

    pub fn v(&self) -> V7<f64> {
        self.vec.0
    }

    pub fn norm(&self) -> f64 {
        self.vec.norm()
    }

    pub fn dot(&self, o: &TangentVec) -> f64 {
        self.vec.dot(&o.vec)
    }

    /// Uniformly distributed unit tangent vector at `p`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, p: &SpherePoint) -> Self {
        loop {
            let w = proj(&p.x(), &random_direction(rng));
            let n = vec7::norm(&w);
            if n > 1e-3 {
                return TangentVec { base: *p, vec: ImOct(w.map(|x| x / n)) };
            }
        }
    }
}

/// `v − ⟨v, p⟩p` for a unit `p`.
#[inline]
pub fn proj<T: Real>(p: &V7<T>, v: &V7<T>) -> V7<T> {
    vec7::reject_unit(v, p)
}

/// `J_p v = p × v`.
#[inline]
pub fn j_generic<T: Real>(p: &V7<T>, v: &V7<T>) -> V7<T> {
    cross(p, v)
}

#[inline]
pub fn omega_generic<T: Real>(p: &V7<T>, x: &V7<T>, y: &V7<T>) -> T {
    phi0_generic(p, x, y)
}

#[inline]
pub fn re_upsilon_generic<T: Real>(p: &V7<T>, x: &V7<T>, y: &V7<T>, z: &V7<T>) -> T {
    psi0_generic(p, x, y, z)
}

/// Closed form `P(X, Y) = proj_p(X × Y)`.
#[inline]
pub fn torsion_generic<T: Real>(p: &V7<T>, x: &V7<T>, y: &V7<T>) -> V7<T> {
    proj(p, &cross(x, y))
}

pub fn project_tangent(p: &SpherePoint, v: &ImOct) -> TangentVec {
    TangentVec { base: *p, vec: ImOct(proj(&p.x(), &v.0)) }
}

pub fn almost_complex_j(p: &SpherePoint, v: &TangentVec) -> Result<TangentVec> {
    p.check_same(&v.base)?;
    Ok(TangentVec { base: *p, vec: ImOct(j_generic(&p.x(), &v.v())) })
}

pub fn omega(p: &SpherePoint, x: &TangentVec, y: &TangentVec) -> Result<f64> {
    p.check_same(&x.base)?;
    p.check_same(&y.base)?;
    Ok(omega_generic(&p.x(), &x.v(), &y.v()))
}

/// `Υ = ψ₀(p, ·, ·, ·) + i φ₀` on tangent vectors.
pub fn upsilon(p: &SpherePoint, x: &TangentVec, y: &TangentVec, z: &TangentVec) -> Result<Complex64> {
    for v in [x, y, z] {
        p.check_same(&v.base)?;
    }
    Ok(upsilon_raw(&p.x(), &x.v(), &y.v(), &z.v()))
}

pub fn upsilon_raw(p: &V7<f64>, x: &V7<f64>, y: &V7<f64>, z: &V7<f64>) -> Complex64 {
    Complex64::new(re_upsilon_generic(p, x, y, z), phi0_generic(x, y, z))
}

/// The rotated complex volume forms `Υ_θ = e^{iθ} Υ₀` with
/// `Υ₀(X, Y, Z) = ⅓(dω(X, Y, Z) − i dω(X, Y, JZ))`, so that `Υ = Υ_{π/2}`.
pub fn upsilon_theta_raw(p: &V7<f64>, theta: f64, x: &V7<f64>, y: &V7<f64>, z: &V7<f64>) -> Complex64 {
    let u0 = Complex64::new(phi0_generic(x, y, z), -phi0_generic(x, y, &j_generic(p, z)));
    Complex64::from_polar(1.0, theta) * u0
}

/// `ω ∧ ω` on four vectors.
pub fn omega_wedge_omega(p: &V7<f64>, v: &[V7<f64>]) -> f64 {
    let w = |a: usize, b: usize| omega_generic(p, &v[a], &v[b]);
    2.0 * (w(0, 1) * w(2, 3) - w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2))
}

/// An SU(3)-frame `e₁..e₆` of `T_pS⁶` with `Je₁ = e₂, Je₃ = e₄, Je₅ = e₆`
/// and `Υ(e₁, e₃, e₅) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSU3 {
    pub base: SpherePoint,
    pub legs: [TangentVec; 6],
}

impl FrameSU3 {
    /// Deterministic frame seeded from the ambient basis in order.
    pub fn at(p: &SpherePoint) -> Self {
        Self::from_seeds(p, &[]).expect("ambient basis always completes a frame")
    }

    /// Frame whose odd legs are taken from `seeds` in order (after
    /// projection), completed from the ambient basis. The last complex leg is
    /// rotated so that `Υ(e₁, e₃, e₅) = 1`.
    pub fn from_seeds(p: &SpherePoint, seeds: &[V7<f64>]) -> Result<Self> {
        let x = p.x();
        let mut legs: Vec<V7<f64>> = Vec::with_capacity(6);
        let ambient: Vec<V7<f64>> = (0..7).map(vec7::basis).collect();
        let mut it = seeds.iter().chain(ambient.iter());
        for slot in 0..3 {
            let mut chosen = None;
            for cand in it.by_ref() {
                let mut w = proj(&x, cand);
                for _ in 0..2 {
                    for q in &legs {
                        w = vec7::reject_unit(&w, q);
                    }
                }
                let n = vec7::norm(&w);
                // seeds are accepted down to a small tolerance, ambient
                // candidates only if well-conditioned
                let min = if slot < seeds.len() { 1e-8 } else { 0.3 };
                if n > min {
                    chosen = Some(w.map(|c| c / n));
                    break;
                }
            }
            let e = chosen.ok_or_else(|| Error::Frame("no admissible candidate for frame leg".into()))?;
            let je = vec7::normalize(&j_generic(&x, &e));
            legs.push(e);
            legs.push(je);
        }
        let u = upsilon_raw(&x, &legs[0], &legs[2], &legs[4]);
        if (u.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::Frame(format!("|Υ(e₁,e₃,e₅)| = {} ≠ 1", u.norm())));
        }
        let beta = -u.arg();
        let (c, s) = (beta.cos(), beta.sin());
        let e5 = vec7::add(&vec7::scale(c, &legs[4]), &vec7::scale(s, &legs[5]));
        legs[4] = e5;
        legs[5] = j_generic(&x, &e5);
        let legs: [TangentVec; 6] =
            std::array::from_fn(|i| TangentVec { base: *p, vec: ImOct(legs[i]) });
        Ok(FrameSU3 { base: *p, legs })
    }

    pub fn vectors(&self) -> [V7<f64>; 6] {
        self.legs.map(|l| l.v())
    }

    /// Largest violation of orthonormality, the J-relations and `Υ(e₁,e₃,e₅) = 1`.
    pub fn defect(&self) -> f64 {
        let x = self.base.x();
        let v = self.vectors();
        let mut d: f64 = 0.0;
        for i in 0..6 {
            d = d.max(vec7::dot(&v[i], &x).abs());
            for j in 0..6 {
                let target = if i == j { 1.0 } else { 0.0 };
                d = d.max((vec7::dot(&v[i], &v[j]) - target).abs());
            }
        }
        for k in 0..3 {
            d = d.max(vec7::dist_inf(&j_generic(&x, &v[2 * k]), &v[2 * k + 1]));
        }
        let u = upsilon_raw(&x, &v[0], &v[2], &v[4]);
        d.max((u - Complex64::new(1.0, 0.0)).norm())
    }

    /// Complex frame `f_k = ½(e_{2k−1} − i e_{2k})` as (real, imaginary) parts.
    pub fn complex_legs(&self) -> [(V7<f64>, V7<f64>); 3] {
        let v = self.vectors();
        std::array::from_fn(|k| (vec7::scale(0.5, &v[2 * k]), vec7::scale(-0.5, &v[2 * k + 1])))
    }
}

/// A differentiable path `t ↦ (γ(t), Y(t))` of tangent vectors.
pub trait TangentPath {
    fn eval<T: Real>(&self, t: T) -> (V7<T>, V7<T>);
}

fn finite_or_err(v: &V7<f64>) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("non-finite jet while differentiating a path".into()))
    }
}

/// Position, velocity, field and field derivative along a path.
type PathJet = (V7<f64>, V7<f64>, V7<f64>, V7<f64>);

fn jet<P: TangentPath>(path: &P, t: f64) -> Result<PathJet> {
    let (g, y) = path.eval(Dual::var(t));
    let (g0, g1, y0, y1) = (vec7::re(&g), vec7::eps(&g), vec7::re(&y), vec7::eps(&y));
    for v in [&g0, &g1, &y0, &y1] {
        finite_or_err(v)?;
    }
    Ok((g0, g1, y0, y1))
}

fn tangent_at(base: &V7<f64>, v: V7<f64>) -> Result<TangentVec> {
    let p = SpherePoint::from_array(*base)?;
    Ok(TangentVec { base: p, vec: ImOct(v) })
}

/// `∇̄_{γ'} Y` at parameter `t`.
pub fn levi_civita<P: TangentPath>(path: &P, t: f64) -> Result<TangentVec> {
    let (g, _, _, dy) = jet(path, t)?;
    tangent_at(&g, proj(&g, &dy))
}

/// Central-difference version of [`levi_civita`]; `h` defaults to
/// `cbrt(ε)·max(1, |t|)`.
pub fn levi_civita_fd<P: TangentPath>(path: &P, t: f64, h: Option<f64>) -> Result<TangentVec> {
    let h = h.unwrap_or_else(|| f64::EPSILON.cbrt() * t.abs().max(1.0));
    let (g, _) = path.eval(t);
    let (_, yp) = path.eval(t + h);
    let (_, ym) = path.eval(t - h);
    let dy = vec7::scale(0.5 / h, &vec7::sub(&yp, &ym));
    finite_or_err(&dy)?;
    tangent_at(&g, proj(&g, &dy))
}

/// `D̄_{γ'} Y = ∇̄_{γ'} Y + ½ P(γ', JY)`.
pub fn nk_connection<P: TangentPath>(path: &P, t: f64) -> Result<TangentVec> {
    let (g, dg, y, dy) = jet(path, t)?;
    let lc = proj(&g, &dy);
    let corr = torsion_generic(&g, &dg, &j_generic(&g, &y));
    tangent_at(&g, vec7::axpy(&lc, 0.5, &corr))
}

/// Torsion `P(X, Y) = ∇̄_X(JỸ) − J∇̄_X Ỹ`, differentiated along the curve
/// `normalize(p + τX)` with the extension `Ỹ = proj(Y)`.
pub fn torsion_p(p: &SpherePoint, x: &TangentVec, y: &TangentVec) -> Result<TangentVec> {
    p.check_same(&x.base)?;
    p.check_same(&y.base)?;
    let (p0, xv, yv) = (p.x(), x.v(), y.v());
    let q = curve_through(&p0, &xv, Dual::var(0.0));
    let ye = proj(&q, &vec7::lift(&yv));
    let jy = j_generic(&q, &ye);
    let a = proj(&p0, &vec7::eps(&jy));
    let b = j_generic(&p0, &proj(&p0, &vec7::eps(&ye)));
    Ok(TangentVec { base: *p, vec: ImOct(vec7::sub(&a, &b)) })
}

pub fn torsion_p_closed(p: &SpherePoint, x: &TangentVec, y: &TangentVec) -> Result<TangentVec> {
    p.check_same(&x.base)?;
    p.check_same(&y.base)?;
    Ok(TangentVec { base: *p, vec: ImOct(torsion_generic(&p.x(), &x.v(), &y.v())) })
}

fn curve_through<T: Real>(p: &V7<f64>, x: &V7<f64>, tau: T) -> V7<T> {
    vec7::normalize(&vec7::axpy(&vec7::lift(p), tau, &vec7::lift(x)))
}

/// Closed-form curvature `⟨X,W⟩⟨Y,Z⟩ − ⟨X,Z⟩⟨Y,W⟩` of the unit sphere.
pub fn riemann(p: &SpherePoint, x: &TangentVec, y: &TangentVec, z: &TangentVec, w: &TangentVec) -> Result<f64> {
    for v in [x, y, z, w] {
        p.check_same(&v.base)?;
    }
    Ok(riemann_raw(&x.v(), &y.v(), &z.v(), &w.v()))
}

pub fn riemann_raw(x: &V7<f64>, y: &V7<f64>, z: &V7<f64>, w: &V7<f64>) -> f64 {
    vec7::dot(x, w) * vec7::dot(y, z) - vec7::dot(x, z) * vec7::dot(y, w)
}

/// `⟨∇_a∇_b Z̃ − ∇_b∇_a Z̃, W⟩` in the chart `(a, b) ↦ normalize(p + aX + bY)`,
/// with exact second derivatives from nested duals.
pub fn riemann_derivative(
    p: &SpherePoint,
    x: &TangentVec,
    y: &TangentVec,
    z: &TangentVec,
    w: &TangentVec,
) -> Result<f64> {
    for v in [x, y, z, w] {
        p.check_same(&v.base)?;
    }
    let (p0, xv, yv, zv) = (p.x(), x.v(), y.v(), z.v());
    let chart = |a: Dual<Dual<f64>>, b: Dual<Dual<f64>>| -> V7<Dual<Dual<f64>>> {
        let base = vec7::lift::<Dual<Dual<f64>>>(&p0);
        let v = vec7::axpy(&vec7::axpy(&base, a, &vec7::lift(&xv)), b, &vec7::lift(&yv));
        vec7::normalize(&v)
    };
    // inner derivative along `inner`, outer along the other coordinate
    let second = |inner_is_b: bool| -> V7<f64> {
        let (a, b) = if inner_is_b {
            (Dual::lift(Dual::var(0.0)), Dual::var(Dual::lift(0.0)))
        } else {
            (Dual::var(Dual::lift(0.0)), Dual::lift(Dual::var(0.0)))
        };
        let q = chart(a, b);
        let ze = proj(&q, &vec7::lift(&zv));
        // ∇_inner Z̃ = proj_q(∂_inner Z̃), still a function of the outer variable
        let inner = proj(&vec7::re(&q), &vec7::eps(&ze));
        proj(&p0, &vec7::eps(&inner))
    };
    // R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z with ∂_a = X, ∂_b = Y at the origin
    let rz = vec7::sub(&second(true), &second(false));
    Ok(vec7::dot(&rz, &w.v()))
}

/// `|R(X,Y,Y,X) + R(X,JY,JY,X) + R(X,JX,Y,JY) − 2‖P(X,Y)‖²|`.
pub fn check_curvature_identity(p: &SpherePoint, x: &TangentVec, y: &TangentVec) -> Result<f64> {
    p.check_same(&x.base)?;
    p.check_same(&y.base)?;
    let (p0, xv, yv) = (p.x(), x.v(), y.v());
    let (jx, jy) = (j_generic(&p0, &xv), j_generic(&p0, &yv));
    let lhs = riemann_raw(&xv, &yv, &yv, &xv) + riemann_raw(&xv, &jy, &jy, &xv) + riemann_raw(&xv, &jx, &yv, &jy);
    let rhs = 2.0 * vec7::norm2(&torsion_generic(&p0, &xv, &yv));
    Ok((lhs - rhs).abs())
}

/// Residuals of the structure equations at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StructureResiduals {
    /// `max |dω − 3 Im Υ|`
    pub d_omega: f64,
    /// `max |d Re Υ − 2 ω∧ω|`
    pub d_re_upsilon: f64,
    /// `max |∇ω − ⅓ dω|`
    pub nabla_omega: f64,
}

fn normal_chart(p: &SpherePoint) -> SphereChart {
    SphereChart { center: p.x(), basis: FrameSU3::at(p).vectors().to_vec() }
}

type FormFn<'a> = Box<dyn Fn(&V7<f64>, &[V7<f64>]) -> f64 + 'a>;

fn omega_field() -> FormFn<'static> {
    Box::new(|x, v| omega_generic(x, &v[0], &v[1]))
}

fn re_upsilon_field() -> FormFn<'static> {
    Box::new(|x, v| re_upsilon_generic(x, &v[0], &v[1], &v[2]))
}

/// Finite-difference check of `dω = 3 Im Υ`, `d Re Υ = 2 ω∧ω` and
/// `∇ω = ⅓ dω` at `p`, on all chart-basis index sets and on `samples` random
/// tangent tuples.
pub fn check_structure_equations<R: Rng + ?Sized>(
    p: &SpherePoint,
    rng: &mut R,
    samples: usize,
    h: f64,
) -> StructureResiduals {
    let chart = normal_chart(p);
    let x = p.x();
    let d_omega = exterior::fd_exterior_derivative(&chart, &omega_field(), 2, h);
    let d_re = exterior::fd_exterior_derivative(&chart, &re_upsilon_field(), 3, h);

    let mut res = StructureResiduals::default();
    let im_u3 = |v: &[V7<f64>]| 3.0 * phi0_generic(&v[0], &v[1], &v[2]);
    res.d_omega = exterior::fd_d_residual(&chart, &omega_field(), 2, &|_, v| im_u3(v), h);
    res.d_re_upsilon =
        exterior::fd_d_residual(&chart, &re_upsilon_field(), 3, &|m, v| 2.0 * omega_wedge_omega(m, v), h);

    for _ in 0..samples {
        let t: Vec<V7<f64>> = (0..4).map(|_| TangentVec::random(rng, p).v()).collect();
        let a = exterior::eval_components(&d_omega, &chart.basis, &t[..3]);
        res.d_omega = res.d_omega.max((a - im_u3(&t[..3])).abs());
        let b = exterior::eval_components(&d_re, &chart.basis, &t);
        res.d_re_upsilon = res.d_re_upsilon.max((b - 2.0 * omega_wedge_omega(&x, &t)).abs());
        let c = nabla_omega(&x, &t[0], &t[1], &t[2]);
        res.nabla_omega = res.nabla_omega.max((c - a / 3.0).abs());
    }
    res
}

/// `(∇_X ω)(Y, Z)` along `normalize(p + τX)` with projected-constant extensions.
pub fn nabla_omega(p: &V7<f64>, x: &V7<f64>, y: &V7<f64>, z: &V7<f64>) -> f64 {
    let q = curve_through(p, x, Dual::var(0.0));
    let ye = proj(&q, &vec7::lift(y));
    let ze = proj(&q, &vec7::lift(z));
    let d_total = omega_generic(&q, &ye, &ze).eps;
    let dy = proj(p, &vec7::eps(&ye));
    let dz = proj(p, &vec7::eps(&ze));
    d_total - omega_generic(p, &dy, z) - omega_generic(p, y, &dz)
}

/// Residuals of `dω = 3(cos θ Re Υ_θ + sin θ Im Υ_θ)`, `d Re Υ_θ = 2 sin θ ω∧ω`
/// and `d Im Υ_θ = −2 cos θ ω∧ω` at `p`, as coefficient maxima.
pub fn check_structure_equations_theta(p: &SpherePoint, theta: f64, h: f64) -> [f64; 3] {
    let chart = normal_chart(p);
    let (c, s) = (theta.cos(), theta.sin());
    let re_t = move |m: &V7<f64>, v: &[V7<f64>]| upsilon_theta_raw(m, theta, &v[0], &v[1], &v[2]).re;
    let im_t = move |m: &V7<f64>, v: &[V7<f64>]| upsilon_theta_raw(m, theta, &v[0], &v[1], &v[2]).im;
    let r0 = exterior::fd_d_residual(
        &chart,
        &omega_field(),
        2,
        &|m, v| 3.0 * (c * re_t(m, v) + s * im_t(m, v)),
        h,
    );
    let r1 = exterior::fd_d_residual(&chart, &re_t, 3, &|m, v| 2.0 * s * omega_wedge_omega(m, v), h);
    let r2 = exterior::fd_d_residual(&chart, &im_t, 3, &|m, v| -2.0 * c * omega_wedge_omega(m, v), h);
    [r0, r1, r2]
}

/// Right-hand side of the `D̄`-parallel transport equation
/// `ξ' = −⟨ξ, γ'⟩γ − ½ P(γ', Jξ)`.
fn transport_rhs(g: &V7<f64>, dg: &V7<f64>, xi: &V7<f64>) -> V7<f64> {
    let p_term = torsion_generic(g, dg, &j_generic(g, xi));
    vec7::axpy(&vec7::scale(-vec7::dot(xi, dg), g), -0.5, &p_term)
}

/// `D̄`-parallel transport of `init` along `curve: τ ↦ (γ, γ')` from `t0` to
/// `t1` with `steps` classical Runge–Kutta steps.
pub fn nk_transport(
    curve: &dyn Fn(f64) -> (V7<f64>, V7<f64>),
    t0: f64,
    t1: f64,
    steps: usize,
    init: &[V7<f64>],
) -> Vec<V7<f64>> {
    let h = (t1 - t0) / steps as f64;
    let mut xs = init.to_vec();
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let (ga, da) = curve(t);
        let (gm, dm) = curve(t + 0.5 * h);
        let (gb, db) = curve(t + h);
        for xi in xs.iter_mut() {
            let k1 = transport_rhs(&ga, &da, xi);
            let k2 = transport_rhs(&gm, &dm, &vec7::axpy(xi, 0.5 * h, &k1));
            let k3 = transport_rhs(&gm, &dm, &vec7::axpy(xi, 0.5 * h, &k2));
            let k4 = transport_rhs(&gb, &db, &vec7::axpy(xi, h, &k3));
            for i in 0..7 {
                xi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    xs
}

/// Great circle `γ(t) = cos t·p + sin t·x` carrying either its velocity or
/// the projection of a quadratic ambient field `c₀ + t c₁ + t² c₂`,
/// optionally followed by `J`.
#[derive(Clone, Debug)]
pub struct GreatCirclePath {
    pub p: V7<f64>,
    pub x: V7<f64>,
    pub field: PathField,
    pub apply_j: bool,
}

#[derive(Clone, Debug)]
pub enum PathField {
    Velocity,
    Projected([V7<f64>; 3]),
}

impl TangentPath for GreatCirclePath {
    fn eval<T: Real>(&self, t: T) -> (V7<T>, V7<T>) {
        let (c, s) = (t.cos(), t.sin());
        let (p, x) = (vec7::lift::<T>(&self.p), vec7::lift::<T>(&self.x));
        let g = vec7::add(&vec7::scale(c, &p), &vec7::scale(s, &x));
        let y = match &self.field {
            PathField::Velocity => vec7::add(&vec7::scale(-s, &p), &vec7::scale(c, &x)),
            PathField::Projected(cs) => {
                let amb = vec7::axpy(
                    &vec7::axpy(&vec7::lift(&cs[0]), t, &vec7::lift(&cs[1])),
                    t * t,
                    &vec7::lift(&cs[2]),
                );
                proj(&g, &amb)
            }
        };
        let y = if self.apply_j { j_generic(&g, &y) } else { y };
        (g, y)
    }
}
