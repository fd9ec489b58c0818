//! The metric cone `C(S⁶) = ℝ⁷ ∖ {0}` and its G₂ structure
//! `φ = r² dr ∧ ω + r³ Re Υ₀`, `ψ = −r³ dr ∧ Im Υ₀ + ½ r⁴ ω ∧ ω`.
//!
//! A cone tangent vector is an ambient vector `v = a ∂_r + r X` at the point
//! `r m`, with `a = ⟨v, m⟩` and `X ∈ T_mS⁶`.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{fd_d_residual, ConeChart};
use crate::octonion::{phi0_generic, psi0_generic};
use crate::sphere::{self, FrameSU3, SpherePoint};
use crate::surface::{self, jet, SurfacePatch};
use crate::vec7::{self, V7};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConePoint {
    pub r: f64,
    pub m: SpherePoint,
}

impl ConePoint {
    pub fn new(r: f64, m: SpherePoint) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("cone radius must be positive, got {r}")));
        }
        Ok(ConePoint { r, m })
    }

    pub fn from_ambient(x: &V7<f64>) -> Result<Self> {
        let r = vec7::norm(x);
        if r <= 0.0 {
            return Err(Error::Domain("the cone vertex is excluded".into()));
        }
        ConePoint::new(r, SpherePoint::from_array(*x)?)
    }

    pub fn position(&self) -> V7<f64> {
        vec7::scale(self.r, &self.m.x())
    }

    /// `(a, X)` with `v = a ∂_r + r X`.
    pub fn split(&self, v: &V7<f64>) -> (f64, V7<f64>) {
        let m = self.m.x();
        let a = vec7::dot(v, &m);
        (a, vec7::scale(1.0 / self.r, &vec7::sub(v, &vec7::scale(a, &m))))
    }
}

fn omega(m: &V7<f64>, x: &V7<f64>, y: &V7<f64>) -> f64 {
    sphere::omega_generic(m, x, y)
}

fn upsilon0(m: &V7<f64>, x: &V7<f64>, y: &V7<f64>, z: &V7<f64>) -> Complex64 {
    sphere::upsilon_theta_raw(m, 0.0, x, y, z)
}

fn cone_phi_raw(cp: &ConePoint, u: &V7<f64>, v: &V7<f64>, w: &V7<f64>) -> f64 {
    let m = cp.m.x();
    let (r, (a, x), (b, y), (c, z)) = (cp.r, cp.split(u), cp.split(v), cp.split(w));
    let dr_omega = a * omega(&m, &y, &z) - b * omega(&m, &x, &z) + c * omega(&m, &x, &y);
    r * r * dr_omega + r.powi(3) * upsilon0(&m, &x, &y, &z).re
}

fn cone_psi_raw(cp: &ConePoint, v: &[V7<f64>; 4]) -> f64 {
    let m = cp.m.x();
    let r = cp.r;
    let parts: Vec<(f64, V7<f64>)> = v.iter().map(|w| cp.split(w)).collect();
    let xs: Vec<V7<f64>> = parts.iter().map(|p| p.1).collect();
    let im = |i: usize, j: usize, k: usize| upsilon0(&m, &xs[i], &xs[j], &xs[k]).im;
    let dr_im = parts[0].0 * im(1, 2, 3) - parts[1].0 * im(0, 2, 3) + parts[2].0 * im(0, 1, 3) - parts[3].0 * im(0, 1, 2);
    -r.powi(3) * dr_im + 0.5 * r.powi(4) * sphere::omega_wedge_omega(&m, &xs)
}

/// Sign relating the cone forms to the flat `φ₀`, fixed once by comparing
/// values on `(∂_r, e₂, e₃)` at `m = e₁`.
pub fn orientation_sign() -> f64 {
    static SIGN: OnceLock<f64> = OnceLock::new();
    *SIGN.get_or_init(|| {
        let cp = ConePoint { r: 1.0, m: SpherePoint::basis(0) };
        let (a, b, c) = (vec7::basis(0), vec7::basis(1), vec7::basis(2));
        let ratio = cone_phi_raw(&cp, &a, &b, &c) / phi0_generic(&a, &b, &c);
        if ratio < 0.0 {
            -1.0
        } else {
            1.0
        }
    })
}

/// `φ(u, v, w)` at a cone point.
pub fn cone_phi(cp: &ConePoint, u: &V7<f64>, v: &V7<f64>, w: &V7<f64>) -> f64 {
    orientation_sign() * cone_phi_raw(cp, u, v, w)
}

/// `ψ(u, v, w, z)` at a cone point.
pub fn cone_psi(cp: &ConePoint, v: &[V7<f64>; 4]) -> f64 {
    orientation_sign() * cone_psi_raw(cp, v)
}

fn at(x: &V7<f64>) -> ConePoint {
    ConePoint::from_ambient(x).expect("chart points avoid the vertex")
}

fn phi_field(x: &V7<f64>, v: &[V7<f64>]) -> f64 {
    cone_phi(&at(x), &v[0], &v[1], &v[2])
}

fn psi_field(x: &V7<f64>, v: &[V7<f64>]) -> f64 {
    cone_psi(&at(x), &[v[0], v[1], v[2], v[3]])
}

/// `r³ ω / 3`, a primitive of `φ`.
fn phi_primitive(x: &V7<f64>, v: &[V7<f64>]) -> f64 {
    let cp = at(x);
    let m = cp.m.x();
    let (_, a) = cp.split(&v[0]);
    let (_, b) = cp.split(&v[1]);
    orientation_sign() * cp.r.powi(3) / 3.0 * omega(&m, &a, &b)
}

/// `−r⁴ Im Υ₀ / 4`, a primitive of `ψ`.
fn psi_primitive(x: &V7<f64>, v: &[V7<f64>]) -> f64 {
    let cp = at(x);
    let m = cp.m.x();
    let xs: Vec<V7<f64>> = v.iter().map(|w| cp.split(w).1).collect();
    -orientation_sign() * cp.r.powi(4) / 4.0 * upsilon0(&m, &xs[0], &xs[1], &xs[2]).im
}

fn zero_form(_: &V7<f64>, _: &[V7<f64>]) -> f64 {
    0.0
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct TorsionResiduals {
    pub d_phi: f64,
    pub d_psi: f64,
    pub phi_primitive: f64,
    pub psi_primitive: f64,
}

impl TorsionResiduals {
    pub fn max(&self) -> f64 {
        self.d_phi.max(self.d_psi).max(self.phi_primitive).max(self.psi_primitive)
    }

    fn merge(&mut self, o: &TorsionResiduals) {
        self.d_phi = self.d_phi.max(o.d_phi);
        self.d_psi = self.d_psi.max(o.d_psi);
        self.phi_primitive = self.phi_primitive.max(o.phi_primitive);
        self.psi_primitive = self.psi_primitive.max(o.psi_primitive);
    }
}

fn chart_at(cp: &ConePoint) -> ConeChart {
    let frame = FrameSU3::at(&cp.m);
    ConeChart { r0: cp.r, m0: cp.m.x(), basis: frame.vectors().to_vec() }
}

/// Finite-difference `‖dφ‖`, `‖dψ‖` and the primitive residuals
/// `φ − d(r³ω/3)`, `ψ − d(−r⁴ Im Υ₀/4)` at each sample, maximized.
pub fn torsion_free_check(samples: &[ConePoint], h: f64) -> TorsionResiduals {
    let mut out = TorsionResiduals::default();
    for cp in samples {
        let chart = chart_at(cp);
        out.merge(&TorsionResiduals {
            d_phi: fd_d_residual(&chart, &phi_field, 3, &zero_form, h),
            d_psi: fd_d_residual(&chart, &psi_field, 4, &zero_form, h),
            phi_primitive: fd_d_residual(&chart, &phi_primitive, 2, &phi_field, h),
            psi_primitive: fd_d_residual(&chart, &psi_primitive, 3, &psi_field, h),
        });
    }
    out
}

/// Residuals at `h` and `h/2` with the per-component ratios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepStudy {
    pub coarse: TorsionResiduals,
    pub fine: TorsionResiduals,
    pub d_phi_ratio: f64,
    pub d_psi_ratio: f64,
}

impl StepStudy {
    /// Both ratios within `[3, 5]`, i.e. second-order convergence.
    pub fn is_second_order(&self) -> bool {
        (3.0..=5.0).contains(&self.d_phi_ratio) && (3.0..=5.0).contains(&self.d_psi_ratio)
    }
}

pub fn torsion_step_study(samples: &[ConePoint], h: f64) -> StepStudy {
    let coarse = torsion_free_check(samples, h);
    let fine = torsion_free_check(samples, 0.5 * h);
    StepStudy { coarse, fine, d_phi_ratio: coarse.d_phi / fine.d_phi, d_psi_ratio: coarse.d_psi / fine.d_psi }
}

pub fn random_cone_points<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<ConePoint> {
    (0..n)
        .map(|_| ConePoint { r: rng.gen_range(0.5..2.0), m: SpherePoint::random(rng) })
        .collect()
}

/// Largest disagreement between `cone_phi` and the flat `φ₀`, and between
/// `cone_psi` and `∗φ₀`, on random ambient vectors.
pub fn flat_agreement<R: Rng + ?Sized>(rng: &mut R, samples: &[ConePoint], trials: usize) -> (f64, f64) {
    let mut dp: f64 = 0.0;
    let mut ds: f64 = 0.0;
    for cp in samples {
        for _ in 0..trials {
            let v: [V7<f64>; 4] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
            dp = dp.max((cone_phi(cp, &v[0], &v[1], &v[2]) - phi0_generic(&v[0], &v[1], &v[2])).abs());
            ds = ds.max((cone_psi(cp, &v) - psi0_generic(&v[0], &v[1], &v[2], &v[3])).abs());
        }
    }
    (dp, ds)
}

/// At `r = 1`: `|(∂_r ⌟ φ)|_M − ω|`, `|φ|_M − Re Υ₀|` and
/// `|−(∂_r ⌟ ψ)|_M − Im Υ₀|` on the given tangent vectors.
pub fn contraction_residuals(m: &SpherePoint, x: &V7<f64>, y: &V7<f64>, z: &V7<f64>) -> [f64; 3] {
    let cp = ConePoint { r: 1.0, m: *m };
    let p = m.x();
    let u0 = upsilon0(&p, x, y, z);
    [
        (cone_phi(&cp, &p, x, y) - omega(&p, x, y)).abs(),
        (cone_phi(&cp, x, y, z) - u0.re).abs(),
        (-cone_psi(&cp, &[p, *x, *y, *z]) - u0.im).abs(),
    ]
}

/// `(i/8) Υ ∧ Ῡ (e₁, …, e₆)` on an SU(3)-frame, which the normalization
/// `(−1)^{n(n−1)/2} (i/2)ⁿ Υ ∧ Ῡ = vol` with `n = 3` predicts to be 1.
pub fn volume_normalization(frame: &FrameSU3) -> Complex64 {
    let p = frame.base.x();
    let e = frame.vectors();
    let mut acc = Complex64::new(0.0, 0.0);
    for idx in crate::exterior::subsets(6, 3) {
        let rest: Vec<usize> = (0..6).filter(|k| !idx.contains(k)).collect();
        let perm: Vec<usize> = idx.iter().chain(&rest).copied().collect();
        let sign = crate::forms::perm_sign(&perm);
        let a = sphere::upsilon_raw(&p, &e[idx[0]], &e[idx[1]], &e[idx[2]]);
        let b = sphere::upsilon_raw(&p, &e[rest[0]], &e[rest[1]], &e[rest[2]]).conj();
        acc += sign * a * b;
    }
    Complex64::new(0.0, 1.0 / 8.0) * acc
}

/// One associativity sample of `C(Σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AssociativitySample {
    pub s: f64,
    pub t: f64,
    /// `1 − |φ(∂_r, ê₁, ê₂)|`
    pub residual: f64,
    /// `√(1 − ω(e₁, e₂)²)`
    pub holomorphic_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssociativityReport {
    pub samples: Vec<AssociativitySample>,
    pub max_residual: f64,
    pub max_holomorphic_defect: f64,
}

impl AssociativityReport {
    /// Every sample satisfies `residual < tol ⇔ defect < defect_tol(tol)`.
    pub fn equivalence_holds(&self, tol: f64) -> bool {
        let t2 = defect_tol(tol);
        self.samples.iter().all(|a| (a.residual < tol) == (a.holomorphic_defect < t2))
    }
}

/// Tolerance on the holomorphicity defect matching `tol` on the
/// associativity residual: `1 − √(1 − d²) < tol ⇔ d < √(2 tol − tol²)`.
pub fn defect_tol(tol: f64) -> f64 {
    (2.0 * tol - tol * tol).max(0.0).sqrt()
}

/// Calibration residual of the cone over the patch at the given parameters,
/// evaluated at radius `r`.
pub fn associativity_check(patch: &SurfacePatch, samples: &[(f64, f64)], r: f64) -> Result<AssociativityReport> {
    let mut out = Vec::with_capacity(samples.len());
    for &(s, t) in samples {
        let j = jet(patch, s, t);
        if surface::min_singular_value(&j) < 1e-6 {
            return Err(Error::DegenerateInput(format!("not an immersion at ({s}, {t})")));
        }
        let cp = ConePoint::new(r, j.point())?;
        let [e1, e2] = j.tangent_frame();
        let phi = cone_phi(&cp, &j.u, &e1, &e2);
        let (_, d2) = surface::holomorphic_defects(patch, s, t)?;
        out.push(AssociativitySample { s, t, residual: 1.0 - phi.abs(), holomorphic_defect: d2 });
    }
    let max_residual = out.iter().map(|a| a.residual).fold(0.0, f64::max);
    let max_holomorphic_defect = out.iter().map(|a| a.holomorphic_defect).fold(0.0, f64::max);
    Ok(AssociativityReport { samples: out, max_residual, max_holomorphic_defect })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::surface::midpoint_grid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orientation_needs_no_flip() {
        assert_eq!(orientation_sign(), 1.0);
    }

    #[test]
    fn cone_forms_match_flat_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = random_cone_points(&mut rng, 10);
        let (dp, ds) = flat_agreement(&mut rng, &pts, 10);
        assert!(dp < 1e-7 && ds < 1e-7, "{dp} {ds}");
    }

    #[test]
    fn cone_forms_alternate() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cp = random_cone_points(&mut rng, 1)[0];
        let v: [V7<f64>; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        assert!(cone_phi(&cp, &v[0], &v[0], &v[1]).abs() < 1e-14);
        assert!(cone_psi(&cp, &[v[0], v[1], v[2], v[1]]).abs() < 1e-14);
        assert!((cone_phi(&cp, &v[0], &v[1], &v[2]) + cone_phi(&cp, &v[1], &v[0], &v[2])).abs() < 1e-14);
    }

    #[test]
    fn bad_radius_is_a_domain_error() {
        assert!(matches!(ConePoint::new(0.0, SpherePoint::basis(0)), Err(Error::Domain(_))));
        assert!(matches!(ConePoint::new(-1.0, SpherePoint::basis(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn contractions_recover_sphere_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = SpherePoint::random(&mut rng);
            let [x, y, z] = std::array::from_fn(|_| sphere::TangentVec::random(&mut rng, &m).v());
            for r in contraction_residuals(&m, &x, &y, &z) {
                assert!(r < 1e-8);
            }
        }
    }

    #[test]
    fn torsion_free_with_second_order_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pts = random_cone_points(&mut rng, 3);
        let study = torsion_step_study(&pts, 1e-3);
        assert!(study.is_second_order(), "{study:?}");
        assert!(torsion_free_check(&pts, 1e-4).max() < 1e-5);
    }

    #[test]
    fn volume_normalization_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c0 = volume_normalization(&FrameSU3::at(&SpherePoint::basis(0)));
        for _ in 0..5 {
            let f = FrameSU3::at(&SpherePoint::random(&mut rng));
            assert!(f.defect() < 1e-10);
            assert!((volume_normalization(&f) - c0).norm() < 1e-10);
        }
        assert!((c0 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn holomorphic_sphere_cone_is_associative() {
        let p = lookup("geodesic-s2-assoc").unwrap().patch;
        let grid = midpoint_grid(&p.domain, 6);
        for r in [1.0, 2.5] {
            let a = associativity_check(&p, &grid, r).unwrap();
            assert!(a.max_residual < 1e-7);
            assert!(a.equivalence_holds(1e-7));
        }
    }

    #[test]
    fn nonholomorphic_control_is_not_associative() {
        let p = lookup("geodesic-s2-nonholo").unwrap().patch;
        let a = associativity_check(&p, &[(0.7, 0.3), (1.3, 2.1), (2.2, 4.0)], 1.0).unwrap();
        assert!(a.samples.iter().all(|x| x.residual > 0.1));
        assert!(a.equivalence_holds(1e-7));
    }

    #[test]
    fn equivalence_on_the_catalog() {
        for e in crate::catalog::catalog() {
            let a = associativity_check(&e.patch, &midpoint_grid(&e.patch.domain, 5), 1.0).unwrap();
            assert!(a.equivalence_holds(1e-7), "{}", e.id);
            assert_eq!(a.max_residual < 1e-7, e.holomorphic, "{}", e.id);
        }
    }

    #[test]
    fn defect_tolerance_mapping() {
        let t = 1e-7;
        let d = defect_tol(t);
        assert!((1.0 - (1.0 - d * d).sqrt() - t).abs() < 1e-15);
    }
}
