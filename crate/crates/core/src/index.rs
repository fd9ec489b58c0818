//! Morse-index lower bounds and boundary Maslov indices.
//!
//! The second variation is discretized on a finite admissible basis and its
//! negative generalized eigenvalues against the L² Gram matrix are counted.
//! Maslov indices of bundle pairs `(E, F)` over a disk are determinant
//! windings of `F` expressed in a unitary trivialization of `E`, where the
//! trivialization comes from radial `D̄`-transport out of the disk centre,
//! projected onto `E` after every step.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lagrangian::LagrangianPatch;
use crate::octonion::cross;
use crate::quadrature::{domain_rule, Domain};
use crate::sphere::{self, nk_transport};
use crate::surface::{first_jet, jet, SurfacePatch};
use crate::variation::{self, nk_integrand_terms, nk_point_data, NormalField, QuadratureSpec};
use crate::vec7::{self, V7};

/// Base point, bundle frame and Lagrangian frame at one loop sample.
type LoopSample = (V7<f64>, Vec<V7<f64>>, Vec<V7<f64>>);

/// Finite set of admissible generators.
#[derive(Clone, Debug, Serialize)]
pub struct BasisSpec {
    pub fields: Vec<NormalField>,
    pub gram_tolerance: f64,
}

impl BasisSpec {
    pub fn new(fields: Vec<NormalField>) -> Self {
        BasisSpec { fields, gram_tolerance: 1e-10 }
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.fields.iter().map(|f| f.name.clone()).collect()
    }
}

/// Discretized second variation with its Gram and `𝒟`-energy matrices.
#[derive(Clone, Debug, Serialize)]
pub struct QuadFormMatrix {
    pub names: Vec<String>,
    /// `Q_ij = δ²A(ηᵢ, ηⱼ)`
    pub q: DMatrix<f64>,
    /// `G_ij = ∫ ⟨ηᵢ, ηⱼ⟩`
    pub gram: DMatrix<f64>,
    /// `K_ij = ∫ ⟨𝒟ηᵢ, 𝒟ηⱼ⟩`
    pub dbar: DMatrix<f64>,
    pub nodes: usize,
    pub gram_tolerance: f64,
}

impl QuadFormMatrix {
    pub fn from_parts(q: DMatrix<f64>, gram: DMatrix<f64>) -> Self {
        let n = q.nrows();
        QuadFormMatrix {
            names: (0..n).map(|i| format!("f{i}")).collect(),
            dbar: DMatrix::zeros(n, n),
            q,
            gram,
            nodes: 0,
            gram_tolerance: 1e-10,
        }
    }

    pub fn symmetry_residual(&self) -> f64 {
        (&self.q - self.q.transpose()).amax()
    }

    /// `max_i Σ_j |Q_ij|`.
    pub fn inf_norm(&self) -> f64 {
        self.q.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Generalized eigenvalues of `(M, G)`, ascending.
    fn generalized(&self, m: &DMatrix<f64>) -> Result<Vec<f64>> {
        let gmin = SymmetricEigen::new(self.gram.clone()).eigenvalues.min();
        if gmin <= self.gram_tolerance {
            return Err(Error::Precondition(format!("Gram matrix is not positive definite (λ_min = {gmin:e})")));
        }
        let l = self
            .gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Precondition("Cholesky factorization of the Gram matrix failed".into()))?
            .l();
        let li = l
            .try_inverse()
            .ok_or_else(|| Error::Precondition("Gram factor is singular".into()))?;
        let c = &li * m * li.transpose();
        let c = 0.5 * (&c + c.transpose());
        let mut ev: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.generalized(&self.q)
    }

    /// Singular values of the discretized `𝒟` in the L² metric, ascending.
    pub fn dbar_singular_values(&self) -> Result<Vec<f64>> {
        Ok(self.generalized(&self.dbar)?.into_iter().map(|x| x.max(0.0).sqrt()).collect())
    }

    /// Coefficient vectors of approximate `𝒟`-kernel elements
    /// (singular value below `tol`).
    pub fn dbar_kernel(&self, tol: f64) -> Result<Vec<Vec<f64>>> {
        let l = self
            .gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Precondition("Cholesky factorization of the Gram matrix failed".into()))?
            .l();
        let li = l.try_inverse().ok_or_else(|| Error::Precondition("Gram factor is singular".into()))?;
        let c = &li * &self.dbar * li.transpose();
        let eig = SymmetricEigen::new(0.5 * (&c + c.transpose()));
        let mut out = Vec::new();
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam.max(0.0).sqrt() < tol {
                let y = eig.eigenvectors.column(k).into_owned();
                let x = li.transpose() * y;
                out.push(x.iter().copied().collect());
            }
        }
        Ok(out)
    }

    /// `cᵀ M c`.
    pub fn form(m: &DMatrix<f64>, c: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(c);
        (v.transpose() * m * &v)[(0, 0)]
    }
}

/// Assemble `Q`, `G` and `K` on the basis. Entries of `Q` are polarizations
/// `¼[δ²A(ηᵢ + ηⱼ) − δ²A(ηᵢ − ηⱼ)]` of the nearly-Kähler integrand.
pub fn assemble_quadratic_form(
    patch: &SurfacePatch,
    l: &LagrangianPatch,
    basis: &BasisSpec,
    quad: &QuadratureSpec,
) -> Result<QuadFormMatrix> {
    for f in &basis.fields {
        variation::check_nk_preconditions(patch, l, f, quad)?;
    }
    let n = basis.len();
    let nodes = domain_rule(&patch.domain, quad.interior);
    let data: Vec<Vec<variation::NkPointData>> = nodes
        .par_iter()
        .map(|nd| basis.fields.iter().map(|f| nk_point_data(patch, &f.recipe, nd.s, nd.t, None)).collect())
        .collect();
    let mut q = DMatrix::zeros(n, n);
    let mut g = DMatrix::zeros(n, n);
    let mut k = DMatrix::zeros(n, n);
    let quad_form = |p: &variation::NkPointData, eta: &V7<f64>, d: &V7<f64>| -> f64 {
        nk_integrand_terms(&p.u, &p.e, eta, d).iter().sum()
    };
    for (nd, row) in nodes.iter().zip(&data) {
        let w = nd.w * row.first().map_or(0.0, |p| p.area_element);
        for i in 0..n {
            for j in i..n {
                let (a, b) = (&row[i], &row[j]);
                let plus = quad_form(a, &vec7::add(&a.eta, &b.eta), &vec7::add(&a.d_eta, &b.d_eta));
                let minus = quad_form(a, &vec7::sub(&a.eta, &b.eta), &vec7::sub(&a.d_eta, &b.d_eta));
                q[(i, j)] += w * 0.25 * (plus - minus);
                g[(i, j)] += w * vec7::dot(&a.eta, &b.eta);
                k[(i, j)] += w * 2.0 * vec7::dot(&a.d_eta, &b.d_eta);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            q[(i, j)] = q[(j, i)];
            g[(i, j)] = g[(j, i)];
            k[(i, j)] = k[(j, i)];
        }
    }
    Ok(QuadFormMatrix { names: basis.names(), q, gram: g, dbar: k, nodes: quad.interior, gram_tolerance: basis.gram_tolerance })
}

/// Default cutoff `1e−6 ‖Q‖∞`.
pub fn default_eig_tol(q: &QuadFormMatrix) -> f64 {
    1e-6 * q.inf_norm()
}

/// Number of generalized eigenvalues of `(Q, G)` below `−eig_tol`.
pub fn morse_index_lower_bound(q: &QuadFormMatrix, eig_tol: f64) -> Result<usize> {
    if q.symmetry_residual() > 1e-8 {
        return Err(Error::Precondition("quadratic form is not symmetric".into()));
    }
    Ok(q.eigenvalues()?.iter().filter(|&&x| x < -eig_tol).count())
}

/// Samples of a bundle pair along a closed loop.
///
/// At sample `k` the complex structure is `J v = base[k] × v`;
/// `bundle_frames[k]` is a unitary basis `b₁..b_r` (so `{bⱼ, Jbⱼ}` is
/// orthonormal) and `lagrangian_frames[k]` an orthonormal basis of `F`.
#[derive(Clone, Debug, Serialize)]
pub struct MaslovLoopData {
    pub loop_params: Vec<f64>,
    pub base: Vec<V7<f64>>,
    pub bundle_frames: Vec<Vec<V7<f64>>>,
    pub lagrangian_frames: Vec<Vec<V7<f64>>>,
}

const CONTINUITY_TOL: f64 = 0.1;
const TOTALLY_REAL_TOL: f64 = 1e-6;

fn frame_distance(a: &[V7<f64>], b: &[V7<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| vec7::norm(&vec7::sub(x, y))).fold(0.0, f64::max)
}

/// Operator-norm-like distance between the orthogonal projectors of two
/// orthonormal frames (max over the frame vectors of each side).
fn subspace_distance(a: &[V7<f64>], b: &[V7<f64>]) -> f64 {
    let d = |x: &[V7<f64>], y: &[V7<f64>]| {
        x.iter().map(|v| vec7::norm(&vec7::sub(v, &vec7::project_onto(v, y)))).fold(0.0, f64::max)
    };
    d(a, b).max(d(b, a))
}

impl MaslovLoopData {
    /// Check sizes, continuity and total reality.
    pub fn validate(&self) -> Result<()> {
        let n = self.loop_params.len();
        if n < 3 || self.base.len() != n || self.bundle_frames.len() != n || self.lagrangian_frames.len() != n {
            return Err(Error::Sampling("loop data arrays have inconsistent lengths".into()));
        }
        let r = self.bundle_frames[0].len();
        for k in 0..n {
            if self.bundle_frames[k].len() != r || self.lagrangian_frames[k].len() != r {
                return Err(Error::Sampling(format!("rank changes at sample {k}")));
            }
            let next = (k + 1) % n;
            let db = frame_distance(&self.bundle_frames[k], &self.bundle_frames[next]);
            let dl = subspace_distance(&self.lagrangian_frames[k], &self.lagrangian_frames[next]);
            if db > CONTINUITY_TOL || dl > CONTINUITY_TOL {
                return Err(Error::Sampling(format!(
                    "frames jump between samples {k} and {next} (bundle {db:.3}, real subbundle {dl:.3}); refine the loop"
                )));
            }
            let tr = self.totally_real_defect(k);
            if tr > TOTALLY_REAL_TOL {
                return Err(Error::Precondition(format!("real subbundle is not totally real at sample {k} ({tr:e})")));
            }
        }
        Ok(())
    }

    /// `max ‖π_F(J f)‖` over the real frame at sample `k`.
    pub fn totally_real_defect(&self, k: usize) -> f64 {
        let f = &self.lagrangian_frames[k];
        f.iter()
            .map(|v| vec7::norm(&vec7::project_onto(&cross(&self.base[k], v), f)))
            .fold(0.0, f64::max)
    }

    /// `A_{jl} = ⟨f_l, b_j⟩ + i⟨f_l, J b_j⟩` at sample `k`.
    pub fn coordinate_matrix(&self, k: usize) -> nalgebra::DMatrix<Complex64> {
        let (b, f) = (&self.bundle_frames[k], &self.lagrangian_frames[k]);
        let r = b.len();
        DMatrix::from_fn(r, r, |j, l| {
            let jb = cross(&self.base[k], &b[j]);
            Complex64::new(vec7::dot(&f[l], &b[j]), vec7::dot(&f[l], &jb))
        })
    }

    /// `det(A)² / |det A|²` along the loop.
    pub fn squared_phase(&self) -> Vec<Complex64> {
        (0..self.loop_params.len())
            .map(|k| {
                let d = self.coordinate_matrix(k).determinant();
                let d2 = d * d;
                d2 / d2.norm()
            })
            .collect()
    }
}

/// Winding number of `det(A)²` around the loop.
pub fn maslov_index(data: &MaslovLoopData) -> Result<i64> {
    data.validate()?;
    let rho = data.squared_phase();
    let n = rho.len();
    let mut total = 0.0;
    for k in 0..n {
        let step = (rho[(k + 1) % n] / rho[k]).arg();
        if step.abs() > 0.5 * PI {
            return Err(Error::Sampling(format!("phase jumps by {step:.3} rad at sample {k}; refine the loop")));
        }
        total += step;
    }
    let w = total / (2.0 * PI);
    let rounded = w.round();
    if (w - rounded).abs() > 1e-6 {
        return Err(Error::Sampling(format!("winding {w} is not an integer")));
    }
    Ok(rounded as i64)
}

/// Complex sub-bundles of `u*TS⁶` over a disk patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Subbundle {
    Ambient,
    Tangent,
    Normal,
}

fn project(sub: Subbundle, u: &V7<f64>, us: &V7<f64>, ut: &V7<f64>, v: &V7<f64>) -> V7<f64> {
    match sub {
        Subbundle::Ambient => sphere::proj(u, v),
        Subbundle::Tangent => {
            let [a, b] = crate::surface::tangent_coeffs(us, ut, v);
            vec7::add(&vec7::scale(a, us), &vec7::scale(b, ut))
        }
        Subbundle::Normal => crate::surface::normal_proj(u, us, ut, v),
    }
}

/// Unitary Gram–Schmidt for `J = u × ·`; drops seeds that are complex
/// dependent on earlier ones and stops at `rank`.
fn complex_gram_schmidt(u: &V7<f64>, seeds: &[V7<f64>], rank: usize) -> Vec<V7<f64>> {
    let mut out: Vec<V7<f64>> = Vec::new();
    for v in seeds {
        let mut w = *v;
        for _ in 0..2 {
            for b in &out {
                w = vec7::reject_unit(&w, b);
                w = vec7::reject_unit(&w, &cross(u, b));
            }
        }
        let n = vec7::norm(&w);
        if n > 1e-6 {
            out.push(vec7::scale(1.0 / n, &w));
        }
        if out.len() == rank {
            break;
        }
    }
    out
}

fn rank(sub: Subbundle) -> usize {
    match sub {
        Subbundle::Ambient => 3,
        Subbundle::Tangent => 1,
        Subbundle::Normal => 2,
    }
}

/// Unitary frame of `sub` at the disk point `(ρ cos θ, ρ sin θ)` obtained by
/// radial `D̄`-transport from the centre, projecting back to `sub` and
/// re-orthonormalizing after each of `steps` RK4 steps. `rotation` mixes
/// the centre frame before transport.
pub fn radial_frame(patch: &SurfacePatch, sub: Subbundle, theta: f64, radius: f64, steps: usize, rotation: f64) -> Result<Vec<V7<f64>>> {
    let (c, s) = (theta.cos(), theta.sin());
    let curve = |tau: f64| {
        let [u, us, ut] = first_jet(patch, tau * radius * c, tau * radius * s);
        (u, vec7::add(&vec7::scale(radius * c, &us), &vec7::scale(radius * s, &ut)))
    };
    let j0 = jet(patch, 0.0, 0.0);
    let mut seeds = vec![j0.us, j0.ut];
    seeds.extend(j0.normal_basis());
    seeds.extend((0..7).map(vec7::basis::<f64>));
    let seeds: Vec<V7<f64>> = seeds.iter().map(|v| project(sub, &j0.u, &j0.us, &j0.ut, v)).collect();
    let mut frame = complex_gram_schmidt(&j0.u, &seeds, rank(sub));
    if frame.len() != rank(sub) {
        return Err(Error::Frame(format!("could not build a unitary frame of {sub:?} at the centre")));
    }
    if rotation != 0.0 {
        frame = rotate_frame(&j0.u, &frame, rotation);
    }
    let h = 1.0 / steps as f64;
    for k in 0..steps {
        let t0 = k as f64 * h;
        let moved = nk_transport(&curve, t0, t0 + h, 1, &frame);
        let [u, us, ut] = first_jet(patch, (t0 + h) * radius * c, (t0 + h) * radius * s);
        let projected: Vec<V7<f64>> = moved.iter().map(|v| project(sub, &u, &us, &ut, v)).collect();
        frame = complex_gram_schmidt(&u, &projected, rank(sub));
        if frame.len() != rank(sub) {
            return Err(Error::Frame(format!("transported {sub:?} frame degenerated at τ = {}", t0 + h)));
        }
    }
    Ok(frame)
}

/// Unitary rotation of a frame: phase `e^{Jφ}` on the first vector and a real
/// rotation mixing the first two by `φ/2` (rank ≥ 2).
fn rotate_frame(u: &V7<f64>, frame: &[V7<f64>], phi: f64) -> Vec<V7<f64>> {
    let mut out = frame.to_vec();
    let j0 = cross(u, &out[0]);
    out[0] = vec7::add(&vec7::scale(phi.cos(), &out[0]), &vec7::scale(phi.sin(), &j0));
    if out.len() > 1 {
        let (a, b) = (out[0], out[1]);
        let h = 0.5 * phi;
        out[0] = vec7::add(&vec7::scale(h.cos(), &a), &vec7::scale(h.sin(), &b));
        out[1] = vec7::sub(&vec7::scale(h.cos(), &b), &vec7::scale(h.sin(), &a));
    }
    out
}

/// Real subbundles along the boundary paired with the complex ones.
fn real_frame(patch: &SurfacePatch, l: &LagrangianPatch, sub: Subbundle, s: f64, t: f64) -> Result<Vec<V7<f64>>> {
    let x = patch.point(s, t);
    let frame = variation::BoundaryFrameData::at(patch, s, t)?;
    match sub {
        Subbundle::Ambient => Ok(l.tangent_basis(&x)?.to_vec()),
        Subbundle::Tangent => Ok(vec![frame.tangent]),
        Subbundle::Normal => {
            let tl = l.tangent_basis(&x)?;
            let rest: Vec<V7<f64>> = tl.iter().map(|v| vec7::reject_unit(v, &frame.tangent)).collect();
            let mut out = Vec::new();
            for v in rest {
                let mut w = v;
                for q in &out {
                    w = vec7::reject_unit(&w, q);
                }
                let n = vec7::norm(&w);
                if n > 1e-6 {
                    out.push(vec7::scale(1.0 / n, &w));
                }
            }
            if out.len() != 2 {
                return Err(Error::Frame("T L does not split off the boundary tangent".into()));
            }
            Ok(out)
        }
    }
}

/// Sampling of a Maslov loop: boundary samples, radial transport steps and
/// the centre-frame rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LoopSampling {
    pub samples: usize,
    pub radial_steps: usize,
    pub rotation: f64,
}

impl Default for LoopSampling {
    fn default() -> Self {
        LoopSampling { samples: 128, radial_steps: 32, rotation: 0.0 }
    }
}

impl LoopSampling {
    pub fn refined(&self) -> Self {
        LoopSampling { samples: 2 * self.samples, radial_steps: 2 * self.radial_steps, ..*self }
    }
}

/// Loop data for `(sub, F)` over the boundary circle of a disk patch.
pub fn boundary_loop(patch: &SurfacePatch, l: &LagrangianPatch, sub: Subbundle, sampling: &LoopSampling) -> Result<MaslovLoopData> {
    let Domain::Disk { radius } = patch.domain else {
        return Err(Error::Precondition("Maslov loops need a disk patch".into()));
    };
    let n = sampling.samples;
    let params: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let rows: Vec<Result<LoopSample>> = params
        .par_iter()
        .map(|&th| {
            let (s, t) = (radius * th.cos(), radius * th.sin());
            let b = radial_frame(patch, sub, th, radius, sampling.radial_steps, sampling.rotation)?;
            let f = real_frame(patch, l, sub, s, t)?;
            Ok((patch.point(s, t), b, f))
        })
        .collect();
    let mut data = MaslovLoopData { loop_params: params, base: Vec::new(), bundle_frames: Vec::new(), lagrangian_frames: Vec::new() };
    for r in rows {
        let (x, b, f) = r?;
        data.base.push(x);
        data.bundle_frames.push(b);
        data.lagrangian_frames.push(f);
    }
    Ok(data)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MaslovDecomposition {
    pub total: i64,
    pub tangent: i64,
    pub normal: i64,
    pub additive: bool,
}

/// `μ(u*TM, TL)`, `μ(TΣ, T∂Σ)` and `μ(NΣ, F)`, each computed on its own loop.
pub fn maslov_decomposition_check(patch: &SurfacePatch, l: &LagrangianPatch, sampling: &LoopSampling) -> Result<MaslovDecomposition> {
    variation::check_lagrangian_boundary(patch, l, sampling.samples)?;
    let mu = |sub| boundary_loop(patch, l, sub, sampling).and_then(|d| maslov_index(&d));
    let (total, tangent, normal) = (mu(Subbundle::Ambient)?, mu(Subbundle::Tangent)?, mu(Subbundle::Normal)?);
    Ok(MaslovDecomposition { total, tangent, normal, additive: total == tangent + normal })
}

/// `rχ(Σ) + μ(NΣ, F)` with `r = 2`; `None` for closed surfaces, where the
/// boundary Maslov index degenerates to `2c₁` and is not computed here.
pub fn riemann_roch_expected(euler_characteristic: i64, has_boundary: bool, mu_normal: i64) -> Option<i64> {
    has_boundary.then_some(2 * euler_characteristic + mu_normal)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `negative_count ≥ μ > 0`
    Satisfied,
    /// `μ ≤ 0`: the bound carries no information.
    Vacuous,
    /// `negative_count < μ`: the basis is too small to exhibit the bound;
    /// a lower bound cannot refute it.
    BasisInsufficient,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    pub basis: Vec<String>,
    pub negative_count: usize,
    pub eigenvalues: Vec<f64>,
    pub eig_tol: f64,
    pub maslov_total: i64,
    pub maslov_tangent: i64,
    pub maslov_normal: i64,
    pub bound_satisfied: bool,
    pub verdict: Verdict,
    pub expected_fredholm_index: i64,
    pub dbar_singular_values: Vec<f64>,
    pub dbar_kernel_dimension: usize,
    pub symmetry_residual: f64,
}

pub const KERNEL_TOL: f64 = 1e-5;

/// `(negative_count ≥ μ, verdict)`.
pub fn decide(negative_count: usize, mu: i64) -> (bool, Verdict) {
    let satisfied = negative_count as i64 >= mu;
    let verdict = if mu <= 0 {
        Verdict::Vacuous
    } else if satisfied {
        Verdict::Satisfied
    } else {
        Verdict::BasisInsufficient
    };
    (satisfied, verdict)
}

/// Assemble, count, compute Maslov indices and decide.
pub fn verify_index_bound(
    patch: &SurfacePatch,
    l: &LagrangianPatch,
    basis: &BasisSpec,
    quad: &QuadratureSpec,
    sampling: &LoopSampling,
) -> Result<IndexReport> {
    let q = assemble_quadratic_form(patch, l, basis, quad)?;
    let m = maslov_decomposition_check(patch, l, sampling)?;
    index_report(&q, &m)
}

/// Report for an assembled form and a disk's Maslov decomposition.
pub fn index_report(q: &QuadFormMatrix, m: &MaslovDecomposition) -> Result<IndexReport> {
    let eig_tol = default_eig_tol(q);
    let negative_count = morse_index_lower_bound(q, eig_tol)?;
    if !m.additive {
        return Err(Error::ModelViolation(format!("Maslov additivity fails: {m:?}")));
    }
    let sv = q.dbar_singular_values()?;
    let (bound_satisfied, verdict) = decide(negative_count, m.total);
    Ok(IndexReport {
        basis: q.names.clone(),
        negative_count,
        eigenvalues: q.eigenvalues()?,
        eig_tol,
        maslov_total: m.total,
        maslov_tangent: m.tangent,
        maslov_normal: m.normal,
        bound_satisfied,
        verdict,
        expected_fredholm_index: riemann_roch_expected(1, true, m.normal).expect("disk"),
        dbar_kernel_dimension: sv.iter().filter(|&&x| x < KERNEL_TOL).count(),
        dbar_singular_values: sv,
        symmetry_residual: q.symmetry_residual(),
    })
}

/// Eigenvalue table as CSV (`index,eigenvalue`).
pub fn eigenvalues_csv(report: &IndexReport) -> String {
    let mut s = String::from("index,eigenvalue\n");
    for (i, e) in report.eigenvalues.iter().enumerate() {
        s.push_str(&format!("{i},{e:.17e}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::variation::admissible_basis;

    fn setup() -> (SurfacePatch, LagrangianPatch) {
        let e = lookup("halfsphere-lag").unwrap();
        (e.patch, e.lagrangian.unwrap())
    }

    fn planar_loop(n: usize, f: impl Fn(f64) -> V7<f64>) -> MaslovLoopData {
        let params: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
        MaslovLoopData {
            base: vec![vec7::basis(2); n],
            bundle_frames: vec![vec![vec7::basis(0)]; n],
            lagrangian_frames: params.iter().map(|&t| vec![f(t)]).collect(),
            loop_params: params,
        }
    }

    #[test]
    fn constant_pair_has_zero_index() {
        let d = planar_loop(32, |_| vec7::basis(0));
        assert_eq!(maslov_index(&d).unwrap(), 0);
    }

    #[test]
    fn flat_disk_boundary_has_index_two() {
        // ℂ ≅ span(e₁, e₂) with J = e₃ × ·, F = tangent line of the unit circle
        let tangent = |t: f64| [-t.sin(), t.cos(), 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(maslov_index(&planar_loop(128, tangent)).unwrap(), 2);
        assert_eq!(maslov_index(&planar_loop(256, tangent)).unwrap(), 2);
        assert!(matches!(maslov_index(&planar_loop(8, |t| tangent(3.0 * t))), Err(Error::Sampling(_))));
    }

    #[test]
    fn non_totally_real_pair_is_rejected() {
        let mut d = planar_loop(16, |_| vec7::basis(0));
        for f in &mut d.lagrangian_frames {
            f.push(vec7::basis(1));
        }
        for b in &mut d.bundle_frames {
            b.push(vec7::basis(3));
        }
        assert!(matches!(maslov_index(&d), Err(Error::Precondition(_))));
    }

    #[test]
    fn morse_count_on_model_matrices() {
        let id = DMatrix::<f64>::identity(4, 4);
        let q = QuadFormMatrix::from_parts(-id.clone(), id.clone());
        assert_eq!(morse_index_lower_bound(&q, default_eig_tol(&q)).unwrap(), 4);
        let p = QuadFormMatrix::from_parts(DMatrix::from_diagonal(&nalgebra::dvector![1.0, 2.0, 0.5, 3.0]), id);
        assert_eq!(morse_index_lower_bound(&p, default_eig_tol(&p)).unwrap(), 0);
        let bad = QuadFormMatrix::from_parts(DMatrix::identity(2, 2), DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]));
        assert!(matches!(morse_index_lower_bound(&bad, 0.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn tangent_pair_of_catalog_disk_has_index_two() {
        let (p, l) = setup();
        let s = LoopSampling::default();
        let d = boundary_loop(&p, &l, Subbundle::Tangent, &s).unwrap();
        assert_eq!(maslov_index(&d).unwrap(), 2);
    }

    #[test]
    fn decomposition_is_additive_and_refinement_stable() {
        let (p, l) = setup();
        let s = LoopSampling::default();
        let a = maslov_decomposition_check(&p, &l, &s).unwrap();
        assert!(a.additive, "{a:?}");
        assert_eq!(a.tangent, 2);
        let b = maslov_decomposition_check(&p, &l, &s.refined()).unwrap();
        assert_eq!(a, b);
        let c = maslov_decomposition_check(&p, &l, &LoopSampling { rotation: 0.9, ..s }).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn single_field_form_matches_second_variation() {
        let (p, l) = setup();
        let q = QuadratureSpec { interior: 24, boundary: 64 };
        let b = admissible_basis(&p, &l, 1).unwrap();
        let one = BasisSpec::new(vec![b[3].clone()]);
        let m = assemble_quadratic_form(&p, &l, &one, &q).unwrap();
        let direct = variation::second_variation_nk(&p, &l, &b[3], &q).unwrap().total;
        assert!((m.q[(0, 0)] - direct).abs() < 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn assembled_form_is_symmetric_and_converged() {
        let (p, l) = setup();
        let basis = BasisSpec::new(admissible_basis(&p, &l, 2).unwrap());
        let q = QuadratureSpec { interior: 32, boundary: 64 };
        let a = assemble_quadratic_form(&p, &l, &basis, &q).unwrap();
        assert!(a.symmetry_residual() < 1e-8);
        let b = assemble_quadratic_form(&p, &l, &basis, &q.doubled()).unwrap();
        let scale = a.q.amax();
        assert!((&a.q - &b.q).amax() < 1e-5 * scale);
    }

    #[test]
    fn morse_count_is_monotone_under_enlargement() {
        let (p, l) = setup();
        let q = QuadratureSpec { interior: 32, boundary: 64 };
        let full = admissible_basis(&p, &l, 2).unwrap();
        let mut last = 0;
        for k in [1, 2, 6, 10, full.len()] {
            let m = assemble_quadratic_form(&p, &l, &BasisSpec::new(full[..k].to_vec()), &q).unwrap();
            let c = morse_index_lower_bound(&m, default_eig_tol(&m)).unwrap();
            assert!(c >= last, "{k}: {c} < {last}");
            last = c;
        }
        assert!(last >= 1);
    }

    #[test]
    fn kernel_fields_are_negative() {
        let (p, l) = setup();
        let q = QuadratureSpec { interior: 32, boundary: 64 };
        let m = assemble_quadratic_form(&p, &l, &BasisSpec::new(admissible_basis(&p, &l, 2).unwrap()), &q).unwrap();
        let ker = m.dbar_kernel(KERNEL_TOL).unwrap();
        assert!(!ker.is_empty());
        for c in ker {
            let d2 = QuadFormMatrix::form(&m.q, &c);
            let mass = QuadFormMatrix::form(&m.gram, &c);
            assert!(d2 < 0.0);
            assert!((d2 + 2.0 * mass).abs() < 1e-3 * d2.abs());
        }
    }

    #[test]
    fn ambient_index_matches_upsilon_winding() {
        // D̄-transport preserves Υ, so det A is Υ(f₁, f₂, f₃) up to a constant
        let (p, l) = setup();
        let d = boundary_loop(&p, &l, Subbundle::Ambient, &LoopSampling::default()).unwrap();
        let mut total = 0.0;
        let n = d.loop_params.len();
        let ups = |k: usize| {
            let f = &d.lagrangian_frames[k];
            let z = sphere::upsilon_raw(&d.base[k], &f[0], &f[1], &f[2]);
            z * z
        };
        for k in 0..n {
            total += (ups((k + 1) % n) / ups(k)).arg();
        }
        assert_eq!((total / (2.0 * PI)).round() as i64, maslov_index(&d).unwrap());
    }

    #[test]
    fn verdicts() {
        assert_eq!(decide(3, 2), (true, Verdict::Satisfied));
        assert_eq!(decide(1, 2), (false, Verdict::BasisInsufficient));
        assert_eq!(decide(0, 0), (true, Verdict::Vacuous));
        assert_eq!(decide(0, -1), (true, Verdict::Vacuous));
    }

    #[test]
    fn positive_basis_gives_no_negative_directions() {
        let (p, l) = setup();
        let all = admissible_basis(&p, &l, 2).unwrap();
        let pick: Vec<NormalField> =
            all.into_iter().filter(|f| f.name == "x1*x2*e5" || f.name == "x1*x3*e4" || f.name == "x2^2*e6").collect();
        assert_eq!(pick.len(), 3);
        let r = verify_index_bound(&p, &l, &BasisSpec::new(pick), &QuadratureSpec { interior: 32, boundary: 64 }, &LoopSampling::default())
            .unwrap();
        assert!(r.eigenvalues.iter().all(|&x| x > 0.0));
        assert_eq!(r.negative_count, 0);
        assert_eq!(r.bound_satisfied, r.negative_count as i64 >= r.maslov_total);
        assert_ne!(r.verdict, Verdict::Satisfied);
    }

    #[test]
    fn riemann_roch_bookkeeping() {
        assert_eq!(riemann_roch_expected(1, true, 3), Some(5));
        assert_eq!(riemann_roch_expected(2, false, 0), None);
    }
}
