//! Verification suites and the machine-readable report they produce.
//!
//! Each suite draws its randomness from a ChaCha8 stream keyed by the run
//! seed and the suite's position, so sequential and parallel runs agree bit
//! for bit. Wall-clock data lives in a separate `timing` block that
//! [`SuiteReport::reproducible_json`] drops.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{self, lookup};
use crate::cone;
use crate::config::{RunConfig, Suite, Tier};
use crate::error::{Error, Result};
use crate::forms::perm_sign;
use crate::index::{
    self, assemble_quadratic_form, maslov_decomposition_check, BasisSpec, IndexReport, LoopSampling,
    MaslovDecomposition, QuadFormMatrix, Verdict, KERNEL_TOL,
};
use crate::octonion::{g2_bilinear, phi0, phi0_alt, star_phi0, ImOct};
use crate::quadrature::{boundary_rule, Domain};
use crate::sphere::{self, almost_complex_j, torsion_p, FrameSU3, SpherePoint, TangentVec, LAMBDA};
use crate::surface::{self, jet, midpoint_grid, AmbientField, Jet, Monomial, SurfacePatch};
use crate::variation::{self, admissible_basis, GeodesicFamily, NormalField};
use crate::vec7::{self, V7};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub name: String,
    /// The identity or property under test.
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    pub residual: Option<f64>,
    pub verdict: Option<String>,
    pub tolerance: Option<f64>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn key(&self) -> String {
        match &self.entry {
            Some(e) => format!("{}/{}@{e}", self.suite, self.name),
            None => format!("{}/{}", self.suite, self.name),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub vacuous: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub started_unix_ms: u128,
    pub total_seconds: f64,
    /// Seconds per check, keyed by [`CheckRecord::key`].
    pub checks: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexReport>,
    pub timing: Timing,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// The report without its `timing` block.
    pub fn reproducible_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("value serializes") + "\n"
    }

    /// `suite,name,entry,residual,tolerance,status`, one row per record.
    pub fn residual_csv(&self) -> String {
        let mut s = String::from("suite,name,entry,residual,tolerance,status\n");
        let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for r in &self.records {
            let status = serde_json::to_value(r.status).expect("status serializes");
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.suite,
                r.name,
                r.entry.as_deref().unwrap_or(""),
                num(r.residual),
                num(r.tolerance),
                status.as_str().unwrap_or("")
            ));
        }
        s
    }

    /// Writes the JSON report to `path`, the residual table next to it with
    /// extension `csv`, and the eigenvalue table (index runs only) as
    /// `<stem>-eigenvalues.csv`. Returns the paths written.
    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut written = vec![path.to_path_buf(), path.with_extension("csv")];
        std::fs::write(path, self.to_json())?;
        std::fs::write(&written[1], self.residual_csv())?;
        if let Some(ix) = &self.index {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
            let p = path.with_file_name(format!("{stem}-eigenvalues.csv"));
            std::fs::write(&p, index::eigenvalues_csv(ix))?;
            written.push(p);
        }
        Ok(written)
    }
}

enum Tol {
    Tier(Tier),
    Fixed(f64),
}

type Outcome = (Option<f64>, Option<String>, Status, Option<String>);

struct Runner<'a> {
    cfg: &'a RunConfig,
    suite: Suite,
    records: Vec<CheckRecord>,
    times: Vec<(String, f64)>,
    index: Option<IndexReport>,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a RunConfig, suite: Suite) -> Self {
        Runner { cfg, suite, records: Vec::new(), times: Vec::new(), index: None }
    }

    fn tol(&self, t: Tol) -> f64 {
        match t {
            Tol::Tier(t) => self.cfg.tolerances.get(t),
            Tol::Fixed(v) => v,
        }
    }

    fn push(
        &mut self,
        name: &str,
        anchor: &str,
        entry: Option<&str>,
        tolerance: Option<f64>,
        f: impl FnOnce() -> Result<Outcome>,
    ) {
        if entry.is_some_and(|id| !self.cfg.selects(id)) {
            return;
        }
        let start = Instant::now();
        let (residual, verdict, status, detail) = match f() {
            Ok(o) => o,
            Err(e) => (None, None, Status::Fail, Some(e.to_string())),
        };
        let rec = CheckRecord {
            suite: self.suite,
            name: name.to_string(),
            anchor: anchor.to_string(),
            entry: entry.map(str::to_string),
            residual,
            verdict,
            tolerance,
            status,
            detail,
        };
        self.times.push((rec.key(), start.elapsed().as_secs_f64()));
        self.records.push(rec);
    }

    /// Passes when the residual is at most the tolerance.
    fn bound(&mut self, name: &str, anchor: &str, entry: Option<&str>, tol: Tol, f: impl FnOnce() -> Result<f64>) {
        let tol = self.tol(tol);
        self.push(name, anchor, entry, Some(tol), || {
            let r = f()?;
            Ok((Some(r), None, if r <= tol { Status::Pass } else { Status::Fail }, None))
        });
    }

    /// A negative control: passes when the residual exceeds the tolerance.
    fn control(&mut self, name: &str, anchor: &str, entry: Option<&str>, tol: Tol, f: impl FnOnce() -> Result<f64>) {
        let tol = self.tol(tol);
        self.push(name, anchor, entry, Some(tol), || {
            let r = f()?;
            let flagged = r > tol;
            let v = if flagged { "flagged" } else { "not flagged" };
            Ok((Some(r), Some(v.into()), if flagged { Status::Pass } else { Status::Fail }, None))
        });
    }

    fn verdict(&mut self, name: &str, anchor: &str, entry: Option<&str>, f: impl FnOnce() -> Result<Outcome>) {
        self.push(name, anchor, entry, None, f);
    }
}

fn max_of<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    let mut m: f64 = 0.0;
    for x in it {
        let x = x?;
        if x.is_nan() {
            return Ok(f64::NAN);
        }
        m = m.max(x);
    }
    Ok(m)
}

fn unavailable(what: &str) -> Error {
    Error::Precondition(format!("{what} unavailable after an earlier failure"))
}

/// Orderings of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let total = n.pow(n as u32);
    for code in 0..total {
        let idx: Vec<usize> = (0..n).map(|k| code / n.pow(k as u32) % n).collect();
        let mut seen = vec![false; n];
        if idx.iter().all(|&i| !std::mem::replace(&mut seen[i], true)) {
            let s = perm_sign(&idx);
            out.push((idx, s));
        }
    }
    out
}

fn algebra(r: &mut Runner, rng: &mut ChaCha8Rng) {
    let e = ImOct::basis;
    let mut rand_oct = || ImOct(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
    let pairs: Vec<(ImOct, ImOct)> = (0..100).map(|_| (rand_oct(), rand_oct())).collect();
    r.bound("cross-product-norm", "|x × y|² = |x|²|y|² − ⟨x, y⟩²", None, Tol::Fixed(1e-12), || {
        max_of(pairs.iter().map(|(x, y)| {
            let c = x.cross(y);
            Ok((c.dot(&c) - (x.dot(x) * y.dot(y) - x.dot(y).powi(2))).abs())
        }))
    });
    r.bound("phi0-alternating", "φ₀ is alternating on basis triples", None, Tol::Fixed(1e-12), || {
        let perms = permutations(3);
        let mut worst: f64 = 0.0;
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let b = [e(i), e(j), e(k)];
                    let v = phi0(&b[0], &b[1], &b[2]);
                    for (p, s) in &perms {
                        worst = worst.max((phi0(&b[p[0]], &b[p[1]], &b[p[2]]) - s * v).abs());
                    }
                }
            }
        }
        Ok(worst)
    });
    r.bound("star-phi0-alternating", "∗φ₀ is alternating on basis quadruples", None, Tol::Fixed(1e-12), || {
        let perms = permutations(4);
        let mut worst: f64 = 0.0;
        for code in 0..7usize.pow(4) {
            let b: [ImOct; 4] = std::array::from_fn(|k| e(code / 7usize.pow(k as u32) % 7));
            let v = star_phi0(&b[0], &b[1], &b[2], &b[3]);
            for (p, s) in &perms {
                worst = worst.max((star_phi0(&b[p[0]], &b[p[1]], &b[p[2]], &b[p[3]]) - s * v).abs());
            }
        }
        Ok(worst)
    });
    r.bound("metric-recovery", "B_φ₀(eᵢ, eⱼ) = δᵢⱼ", None, Tol::Fixed(1e-12), || {
        let phi = phi0_alt();
        let mut worst: f64 = 0.0;
        for i in 0..7 {
            for j in i..7 {
                let d = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g2_bilinear(&phi, &e(i), &e(j)) - d).abs());
            }
        }
        Ok(worst)
    });
}

fn nk_identities(r: &mut Runner, rng: &mut ChaCha8Rng) {
    let pts: Vec<(SpherePoint, TangentVec, TangentVec)> = (0..100)
        .map(|_| {
            let p = SpherePoint::random(rng);
            let x = TangentVec::random(rng, &p);
            let y = TangentVec::random(rng, &p);
            (p, x, y)
        })
        .collect();
    let alg = || Tol::Tier(Tier::Algebraic);
    r.bound("torsion-antisymmetry", "P(X, Y) = −P(Y, X)", None, alg(), || {
        max_of(pts.iter().map(|(p, x, y)| {
            Ok(vec7::norm(&vec7::add(&torsion_p(p, x, y)?.v(), &torsion_p(p, y, x)?.v())))
        }))
    });
    r.bound("torsion-symmetries", "P(X, JY) = −J P(X, Y) and P(X, Y) ⟂ X, Y", None, alg(), || {
        max_of(pts.iter().map(|(p, x, y)| {
            let pxy = torsion_p(p, x, y)?;
            let jy = almost_complex_j(p, y)?;
            let a = vec7::add(&torsion_p(p, x, &jy)?.v(), &almost_complex_j(p, &pxy)?.v());
            Ok(vec7::norm(&a).max(pxy.dot(x).abs()).max(pxy.dot(y).abs()))
        }))
    });
    r.bound("constant-type", "|P(X, Y)|² = λ²(|X|²|Y|² − ⟨X, Y⟩² − ⟨JX, Y⟩²), λ = 1", None, alg(), || {
        max_of(pts.iter().map(|(p, x, y)| {
            let jx = almost_complex_j(p, x)?;
            let rhs = LAMBDA * LAMBDA * (x.norm().powi(2) * y.norm().powi(2) - x.dot(y).powi(2) - jx.dot(y).powi(2));
            Ok((torsion_p(p, x, y)?.norm().powi(2) - rhs).abs())
        }))
    });
    r.bound(
        "curvature-identity",
        "R(X, Y, Y, X) + R(X, JY, JY, X) + R(X, JX, Y, JY) = 2|P(X, Y)|²",
        None,
        alg(),
        || max_of(pts.iter().map(|(p, x, y)| sphere::check_curvature_identity(p, x, y))),
    );
    let mut structure = Vec::new();
    r.bound("structure-d-omega", "dω = 3 Im Υ", None, Tol::Tier(Tier::Fd1), || {
        structure = pts.iter().map(|(p, _, _)| sphere::check_structure_equations(p, rng, 2, 1e-4)).collect();
        Ok(structure.iter().map(|s| s.d_omega).fold(0.0, f64::max))
    });
    r.bound("structure-d-re-upsilon", "d Re Υ = 2 ω ∧ ω", None, Tol::Tier(Tier::Fd1), || {
        if structure.is_empty() {
            return Err(unavailable("structure residuals"));
        }
        Ok(structure.iter().map(|s| s.d_re_upsilon).fold(0.0, f64::max))
    });
}

const RECT_PTS: [(f64, f64); 4] = [(0.7, 0.3), (1.3, 2.1), (2.2, 4.0), (0.4, 5.5)];
const DISK_PTS: [(f64, f64); 3] = [(0.1, 0.2), (-0.5, 0.3), (0.0, -0.8)];

fn sample_points(patch: &SurfacePatch) -> &'static [(f64, f64)] {
    match patch.domain {
        Domain::Disk { .. } => &DISK_PTS,
        Domain::Rect { .. } => &RECT_PTS,
    }
}

/// Fixed combination of the normal basis, rotated by `k`.
fn test_normal(j: &Jet, k: usize) -> V7<f64> {
    const W: [f64; 8] = [0.3, -0.7, 0.5, 0.2, 0.9, -0.1, 0.4, 0.6];
    j.normal_basis().iter().enumerate().fold([0.0; 7], |v, (i, b)| vec7::axpy(&v, W[(i + k) % 8], b))
}

fn shape_symmetry_residual(p: &SurfacePatch, s: f64, t: f64) -> Result<f64> {
    let j = jet(p, s, t);
    let tf = j.tangent_frame();
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let eta = test_normal(&j, k);
        for x in tf {
            let wx = surface::shape_operator(p, s, t, &x, &eta)?;
            for y in tf {
                let ii = surface::second_fundamental_form(p, s, t, &x, &y)?;
                worst = worst.max((vec7::dot(&wx, &y) + vec7::dot(&ii, &eta)).abs());
            }
            let jx = surface::j_at(&j.u, &x);
            let wjx = surface::shape_operator(p, s, t, &jx, &eta)?;
            worst = worst.max(vec7::dist_inf(&wjx, &vec7::neg(&surface::j_at(&j.u, &wx))));
            let wjeta = surface::shape_operator(p, s, t, &x, &surface::j_at(&j.u, &eta))?;
            worst = worst.max(vec7::dist_inf(&wjeta, &surface::j_at(&j.u, &wx)));
            worst = worst.max(surface::torsion_tangential_part(p, s, t, &x, &eta)?);
        }
    }
    Ok(worst)
}

fn hopf_spread(p: &SurfacePatch, s: f64, t: f64) -> Result<f64> {
    let base = surface::hopf_coefficients(p, &surface::adapt_u2_frame(p, s, t)?)?.magnitude2();
    let mut worst: f64 = 0.0;
    for (ang, seed) in [(0.4, None), (1.9, Some([0.2, 0.1, -0.4, 0.6, 0.3, -0.5, 0.7])), (3.0, None)] {
        let f = surface::adapt_u2_frame_with(p, s, t, ang, seed)?;
        worst = worst.max((surface::hopf_coefficients(p, &f)?.magnitude2() - base).abs());
    }
    Ok(worst)
}

fn curve(r: &mut Runner) {
    for id in ["hl-torus", "geodesic-s2-assoc"] {
        let p = lookup(id).expect("shipped").patch;
        let pts = sample_points(&p);
        r.bound(
            "shape-operator-symmetries",
            "⟨W_X η, Y⟩ = −⟨II(X, Y), η⟩, W_{JX} η = −J W_X η, W_X Jη = J W_X η, P(TΣ, NΣ) ⊂ NΣ",
            Some(id),
            Tol::Tier(Tier::Algebraic),
            || max_of(pts.iter().map(|&(s, t)| shape_symmetry_residual(&p, s, t))),
        );
        r.bound(
            "ricci-equation",
            "R̄(X, Y, η, ξ) = R⊥(X, Y, η, ξ) + ⟨W_X η, W_Y ξ⟩ − ⟨W_X ξ, W_Y η⟩",
            Some(id),
            Tol::Tier(Tier::Fd1),
            || {
                max_of(pts.iter().map(|&(s, t)| {
                    let j = jet(&p, s, t);
                    let [e1, e2] = j.tangent_frame();
                    surface::ricci_residual(&p, s, t, &e1, &e2, &test_normal(&j, 0), &test_normal(&j, 3))
                }))
            },
        );
        r.bound(
            "hopf-frame-independence",
            "|κ|² + |μ|² does not depend on the adapted U(2)-frame",
            Some(id),
            Tol::Fixed(1e-6),
            || max_of(pts.iter().map(|&(s, t)| hopf_spread(&p, s, t))),
        );
    }
    for id in ["geodesic-s2-assoc", "geodesic-s2-nonholo", "hl-torus", "halfsphere-lag"] {
        let p = lookup(id).expect("shipped").patch;
        r.bound("mean-curvature", "H = 0 on minimal surfaces", Some(id), Tol::Fixed(1e-6), || {
            max_of(sample_points(&p).iter().map(|&(s, t)| Ok(vec7::norm(&surface::mean_curvature(&p, s, t)))))
        });
    }
    let small = lookup("small-sphere").expect("shipped").patch;
    r.control("mean-curvature-control", "H ≠ 0 on a small sphere", Some("small-sphere"), Tol::Fixed(1e-6), || {
        max_of(sample_points(&small).iter().map(|&(s, t)| Ok(vec7::norm(&surface::mean_curvature(&small, s, t)))))
    });
    for e in catalog::catalog() {
        r.verdict("holomorphicity", "J TΣ = TΣ exactly on the holomorphic entries", Some(e.id), || {
            let pts = sample_points(&e.patch);
            let mut all = true;
            for &(s, t) in pts {
                all &= surface::is_holomorphic(&e.patch, s, t, 1e-8)?;
            }
            let v = if all { "holomorphic" } else { "not holomorphic" };
            Ok((None, Some(v.into()), if all == e.holomorphic { Status::Pass } else { Status::Fail }, None))
        });
    }
    free_boundary(r);
}

fn free_boundary(r: &mut Runner) {
    let id = "halfsphere-freeboundary";
    let e = lookup(id).expect("shipped");
    let ball = e.ball.expect("ball");
    let bdry = catalog::disk_boundary_params(1.0, 32);
    let interior = midpoint_grid(&e.patch.domain, 6);
    r.bound("boundary-orthogonality", "Σ meets ∂B orthogonally", Some(id), Tol::Fixed(1e-8), || {
        max_of(bdry.iter().map(|&(s, t)| Ok(surface::boundary_orthogonality(&e.patch, &ball, s, t)?.angle_defect)))
    });
    r.bound("ball-umbilicity", "A = cot(ρ) Id on ∂B", Some(id), Tol::Fixed(1e-6), || {
        max_of(bdry.iter().map(|&(s, t)| Ok(surface::boundary_orthogonality(&e.patch, &ball, s, t)?.umbilicity)))
    });
    r.bound("hopf-vanishing", "Φ = 0 along ∂Σ and in the interior", Some(id), Tol::Fixed(1e-6), || {
        let rep = surface::rigidity_probe(&e.patch, &ball, &bdry, &interior, 1e-6)?;
        Ok(rep.max_phi_boundary.max(rep.max_phi_interior).max(rep.max_ii12_boundary))
    });
    let cid = "torus-ball-control";
    let c = lookup(cid).expect("shipped");
    r.control("orthogonality-control", "a ball not meeting Σ orthogonally is flagged", Some(cid), Tol::Fixed(1e-6), || {
        let ball = c.ball.expect("ball");
        let bd = catalog::ball_boundary_params(&c.patch, &ball, (0.0, 0.0), 16)?;
        Ok(surface::rigidity_probe(&c.patch, &ball, &bd, &[(0.05, 0.05)], 1e-6)?.max_orthogonality_defect)
    });
}

fn mono(coeff: f64, powers: [u8; 7], v: V7<f64>) -> AmbientField {
    AmbientField { terms: vec![(vec![Monomial { coeff, powers }], v)] }
}

fn torus_field() -> NormalField {
    let f = mono(1.0, [0, 1, 0, 0, 0, 0, 0], [0.3, 0.0, 0.2, -0.5, 0.1, 0.7, 0.4])
        .plus(&mono(0.8, [0, 0, 0, 1, 1, 0, 0], [1.0, -0.4, 0.0, 0.3, 0.0, 0.2, -0.6]))
        .plus(&AmbientField::constant([0.1, 0.5, -0.3, 0.0, 0.6, 0.0, 0.2]));
    NormalField::new("torus-mix", f)
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn variation_suite(r: &mut Runner) {
    let quad = r.cfg.quadrature;
    let id = "halfsphere-lag";
    let e = lookup(id).expect("shipped");
    let l = e.lagrangian.clone().expect("lagrangian");
    let p = e.patch.clone();
    let fields = match admissible_basis(&p, &l, 1) {
        Ok(f) => f,
        Err(err) => {
            r.verdict("admissible-basis", "admissible fields exist", Some(id), || Err(err));
            return;
        }
    };
    for f in &fields {
        r.bound(
            &format!("master-oracle/{}", f.name),
            "nearly-Kähler second variation = d²/dε² Area(F_ε) at ε = 0",
            Some(id),
            Tol::Tier(Tier::Integral),
            || {
                let nk = variation::second_variation_nk(&p, &l, f, &quad)?.total;
                let fd = variation::area_second_difference_checked(&GeodesicFamily::new(&p, f), 1e-3, quad.interior)?;
                Ok(relative(nk, fd.value))
            },
        );
    }
    r.bound(
        "general-formula",
        "general second variation with boundary term = d²/dε² Area(F_ε)",
        Some(id),
        Tol::Tier(Tier::Integral),
        || {
            max_of(fields.iter().map(|f| {
                let fam = GeodesicFamily::new(&p, f);
                let g = variation::second_variation_general(&fam, &quad)?.total;
                Ok(relative(g, variation::area_second_difference(&fam, 1e-3, quad.interior)))
            }))
        },
    );
    r.bound("family-boundary-drift", "F_ε(∂Σ) ⊂ L", Some(id), Tol::Fixed(1e-12), || {
        Ok(fields.iter().map(|f| GeodesicFamily::new(&p, f).boundary_drift(&l, 0.3, 32)).fold(0.0, f64::max))
    });

    let torus = lookup("hl-torus").expect("shipped").patch;
    for (pid, patch) in [("hl-torus", &torus), (id, &p)] {
        r.bound(
            "shape-torsion-pairing",
            "pointwise shape-operator and torsion pairing on holomorphic curves",
            Some(pid),
            Tol::Tier(Tier::Fd1),
            || {
                max_of(sample_points(patch).iter().flat_map(|&(s, t)| {
                    jet(patch, s, t)
                        .normal_basis()
                        .into_iter()
                        .map(move |v| variation::lemma41_residual(patch, s, t, &v))
                }))
            },
        );
    }
    let tf = torus_field();
    r.bound("d-alpha-identity", "Stokes identity for the 1-form α_η", Some("hl-torus"), Tol::Tier(Tier::Fd2), || {
        max_of(RECT_PTS.iter().map(|&(s, t)| variation::lemma42_residual(&torus, s, t, &tf)))
    });
    r.bound("d-alpha-identity", "Stokes identity for the 1-form α_η", Some(id), Tol::Tier(Tier::Fd2), || {
        max_of(fields.iter().flat_map(|f| DISK_PTS.iter().map(|&(s, t)| variation::lemma42_residual(&p, s, t, f))))
    });
    let bnodes = boundary_rule(&p.domain, 16);
    r.bound(
        "boundary-term",
        "the boundary term of the general formula cancels on Lagrangian boundary",
        Some(id),
        Tol::Tier(Tier::Fd2),
        || {
            max_of(fields.iter().flat_map(|f| {
                let fam = GeodesicFamily::new(&p, f);
                let (p, l) = (&p, &l);
                bnodes.iter().map(move |b| variation::lemma43_boundary_residual(p, l, b.s, b.t, &fam))
            }))
        },
    );
    let cid = "halfsphere-nonlag";
    let ctl = lookup(cid).expect("shipped");
    r.control(
        "boundary-term-control",
        "the boundary term survives when L is not Lagrangian",
        Some(cid),
        Tol::Tier(Tier::Fd2),
        || {
            let lc = ctl.lagrangian.clone().expect("plane");
            let rot = NormalField::new(
                "x1*e4+x2*e5",
                mono(1.0, [1, 0, 0, 0, 0, 0, 0], vec7::basis(3)).plus(&mono(1.0, [0, 1, 0, 0, 0, 0, 0], vec7::basis(4))),
            );
            let fam = GeodesicFamily::new(&ctl.patch, &rot);
            max_of(
                boundary_rule(&ctl.patch.domain, 16)
                    .iter()
                    .map(|b| variation::lemma43_boundary_residual(&ctl.patch, &lc, b.s, b.t, &fam)),
            )
        },
    );
}

fn index_suite(r: &mut Runner) {
    let quad = r.cfg.quadrature;
    let id = "halfsphere-lag";
    if !r.cfg.selects(id) {
        return;
    }
    let e = lookup(id).expect("shipped");
    let l = e.lagrangian.clone().expect("lagrangian");
    let p = e.patch.clone();
    let sampling = LoopSampling::default();

    let mut dec: Option<MaslovDecomposition> = None;
    r.bound("maslov-tangent", "μ(TΣ, T∂Σ) = 2χ(Σ) = 2 on the disk", Some(id), Tol::Fixed(0.0), || {
        let d = maslov_decomposition_check(&p, &l, &sampling)?;
        dec = Some(d);
        Ok((d.tangent - 2).abs() as f64)
    });
    r.bound("maslov-additivity", "μ(u*TM, TL) = μ(TΣ, T∂Σ) + μ(NΣ, F)", Some(id), Tol::Fixed(0.0), || {
        let d = dec.ok_or_else(|| unavailable("Maslov decomposition"))?;
        Ok((d.total - d.tangent - d.normal).abs() as f64)
    });
    r.bound("maslov-refinement", "Maslov indices are stable under 2× sampling", Some(id), Tol::Fixed(0.0), || {
        let d = dec.ok_or_else(|| unavailable("Maslov decomposition"))?;
        let f = maslov_decomposition_check(&p, &l, &sampling.refined())?;
        Ok(((f.total - d.total).abs() + (f.tangent - d.tangent).abs() + (f.normal - d.normal).abs()) as f64)
    });

    let mut q: Option<QuadFormMatrix> = None;
    r.bound("form-symmetry", "the assembled second variation is symmetric", Some(id), Tol::Fixed(1e-8), || {
        let basis = BasisSpec::new(admissible_basis(&p, &l, 2)?);
        let m = assemble_quadratic_form(&p, &l, &basis, &quad)?;
        let res = m.symmetry_residual();
        q = Some(m);
        Ok(res)
    });
    r.bound(
        "dbar-kernel-negativity",
        "δ²A(η) = −2λ² ∫ |η|² < 0 on ker 𝒟",
        Some(id),
        Tol::Tier(Tier::Integral),
        || {
            let m = q.as_ref().ok_or_else(|| unavailable("quadratic form"))?;
            let ker = m.dbar_kernel(KERNEL_TOL)?;
            if ker.is_empty() {
                return Err(Error::Precondition("the basis meets no 𝒟-kernel direction".into()));
            }
            max_of(ker.iter().map(|c| {
                let d2 = QuadFormMatrix::form(&m.q, c);
                let mass = QuadFormMatrix::form(&m.gram, c);
                Ok(if d2 < 0.0 { (d2 + 2.0 * LAMBDA * LAMBDA * mass).abs() / d2.abs() } else { f64::INFINITY })
            }))
        },
    );
    let mut report = None;
    r.verdict("index-bound", "Ind(u) ≥ μ(u*TM, TL)", Some(id), || {
        let m = q.as_ref().ok_or_else(|| unavailable("quadratic form"))?;
        let d = dec.ok_or_else(|| unavailable("Maslov decomposition"))?;
        let rep = index::index_report(m, &d)?;
        let consistent = rep.bound_satisfied == (rep.negative_count as i64 >= rep.maslov_total);
        let status = match (consistent, rep.verdict) {
            (false, _) | (_, Verdict::BasisInsufficient) => Status::Fail,
            (true, Verdict::Satisfied) => Status::Pass,
            (true, Verdict::Vacuous) => Status::Vacuous,
        };
        let verdict = serde_json::to_value(rep.verdict).expect("verdict serializes");
        let detail = format!(
            "negative_count={} maslov_total={} maslov_tangent={} maslov_normal={}",
            rep.negative_count, rep.maslov_total, rep.maslov_tangent, rep.maslov_normal
        );
        let out = (Some(rep.negative_count as f64), verdict.as_str().map(str::to_string), status, Some(detail));
        report = Some(rep);
        Ok(out)
    });
    r.index = report;
}

fn cone_suite(r: &mut Runner, rng: &mut ChaCha8Rng) {
    let pts = cone::random_cone_points(rng, 10);
    let mut tr = None;
    r.bound("d-phi", "dφ = 0 on the cone", None, Tol::Tier(Tier::Fd1), || {
        let t = cone::torsion_free_check(&pts, 1e-4);
        tr = Some(t);
        Ok(t.d_phi)
    });
    let get = |f: fn(&cone::TorsionResiduals) -> f64| move || tr.as_ref().map(f).ok_or_else(|| unavailable("torsion residuals"));
    r.bound("d-psi", "dψ = 0 on the cone", None, Tol::Tier(Tier::Fd1), get(|t| t.d_psi));
    r.bound("phi-primitive", "φ = d(r³ω/3)", None, Tol::Tier(Tier::Fd1), get(|t| t.phi_primitive));
    r.bound("psi-primitive", "ψ = d(−r⁴ Im Υ₀/4)", None, Tol::Tier(Tier::Fd1), get(|t| t.psi_primitive));
    r.bound("step-convergence", "dφ, dψ residuals scale as h² (ratio 4 under halving, within ±1)", None, Tol::Fixed(1.0), || {
        let st = cone::torsion_step_study(&pts, 1e-3);
        Ok((st.d_phi_ratio - 4.0).abs().max((st.d_psi_ratio - 4.0).abs()))
    });
    let mut flat = None;
    r.bound("flat-phi", "φ = r²dr∧ω + r³ Re Υ₀ equals φ₀ on ℝ⁷", None, Tol::Tier(Tier::Algebraic), || {
        let (dp, ds) = cone::flat_agreement(rng, &pts, 20);
        flat = Some(ds);
        Ok(dp)
    });
    r.bound("flat-psi", "ψ = −r³dr∧Im Υ₀ + ½r⁴ ω∧ω equals ∗φ₀ on ℝ⁷", None, Tol::Tier(Tier::Algebraic), || {
        flat.ok_or_else(|| unavailable("flat agreement"))
    });
    let tol = r.tol(Tol::Tier(Tier::Algebraic));
    r.push(
        "volume-normalization",
        "(i/8) Υ ∧ Ῡ = vol on SU(3)-frames",
        None,
        Some(tol),
        || {
            let c: Vec<_> = pts.iter().map(|cp| cone::volume_normalization(&FrameSU3::at(&cp.m))).collect();
            let res = c.iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max);
            let status = if res <= tol { Status::Pass } else { Status::Fail };
            Ok((Some(res), Some(format!("measured {:.12}", c[0].re)), status, None))
        },
    );
    for e in catalog::catalog() {
        r.verdict("associative-iff-holomorphic", "C(Σ) is associative ⇔ Σ is holomorphic", Some(e.id), || {
            let a = cone::associativity_check(&e.patch, &midpoint_grid(&e.patch.domain, 6), 1.0)?;
            let assoc = a.max_residual < tol;
            let ok = assoc == e.holomorphic && a.equivalence_holds(tol);
            let v = format!("{} / {}", if assoc { "associative" } else { "not associative" }, if e.holomorphic { "holomorphic" } else { "not holomorphic" });
            Ok((Some(a.max_residual), Some(v), if ok { Status::Pass } else { Status::Fail }, None))
        });
    }
}

struct SuiteOutput {
    records: Vec<CheckRecord>,
    times: Vec<(String, f64)>,
    index: Option<IndexReport>,
}

fn run_suite(cfg: &RunConfig, suite: Suite) -> SuiteOutput {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(Suite::CONCRETE.iter().position(|&s| s == suite).unwrap_or(0) as u64);
    let mut r = Runner::new(cfg, suite);
    match suite {
        Suite::Algebra => algebra(&mut r, &mut rng),
        Suite::NkIdentities => nk_identities(&mut r, &mut rng),
        Suite::Curve => curve(&mut r),
        Suite::Variation => variation_suite(&mut r),
        Suite::Index => index_suite(&mut r),
        Suite::Cone => cone_suite(&mut r, &mut rng),
        Suite::All => unreachable!("expanded before dispatch"),
    }
    SuiteOutput { records: r.records, times: r.times, index: r.index }
}

/// Runs the configured suites in a fixed order.
pub fn run(cfg: &RunConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let started_unix_ms = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
    let t0 = Instant::now();
    let suites = cfg.suite.expand();
    let outputs: Vec<SuiteOutput> = if cfg.parallel {
        suites.par_iter().map(|&s| run_suite(cfg, s)).collect()
    } else {
        suites.iter().map(|&s| run_suite(cfg, s)).collect()
    };
    let mut records = Vec::new();
    let mut checks = BTreeMap::new();
    let mut index = None;
    for o in outputs {
        records.extend(o.records);
        checks.extend(o.times);
        index = index.or(o.index);
    }
    let summary = Summary {
        total: records.len(),
        passed: records.iter().filter(|r| r.status == Status::Pass).count(),
        failed: records.iter().filter(|r| r.status == Status::Fail).count(),
        vacuous: records.iter().filter(|r| r.status == Status::Vacuous).count(),
    };
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        records,
        summary,
        index,
        timing: Timing { started_unix_ms, total_seconds: t0.elapsed().as_secs_f64(), checks },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(suite: Suite) -> RunConfig {
        RunConfig { suite, quadrature: crate::config::nodes_spec(16), ..RunConfig::default() }
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|(_, s)| s).sum::<f64>(), 0.0);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn algebra_suite_passes_and_is_exact() {
        let rep = run(&cfg(Suite::Algebra)).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert_eq!(rep.summary.total, 4);
        let alt = rep.records.iter().find(|r| r.name == "phi0-alternating").unwrap();
        assert_eq!(alt.residual, Some(0.0));
    }

    #[test]
    fn catalog_filter_drops_entry_checks() {
        let mut c = cfg(Suite::Curve);
        c.catalog_ids = vec!["small-sphere".into()];
        let rep = run(&c).unwrap();
        assert!(rep.records.iter().all(|r| r.entry.as_deref() == Some("small-sphere")));
        assert_eq!(rep.summary.total, 2);
        assert!(rep.passed());
    }

    #[test]
    fn reports_are_reproducible_and_csv_has_a_row_per_record() {
        let a = run(&cfg(Suite::NkIdentities)).unwrap();
        let mut c = cfg(Suite::NkIdentities);
        c.parallel = true;
        let b = run(&c).unwrap();
        assert_eq!(a.records, b.records);
        let mut d = c.clone();
        d.seed = 43;
        assert_ne!(run(&d).unwrap().records, a.records);
        assert_eq!(a.residual_csv().lines().count(), a.records.len() + 1);
        assert!(!a.reproducible_json().contains("timing"));
        assert!(a.to_json().contains("\"timing\""));
    }

    #[test]
    fn failing_tolerance_is_reported() {
        let mut c = cfg(Suite::NkIdentities);
        c.tolerances.fd1 = 1e-14;
        let rep = run(&c).unwrap();
        assert!(!rep.passed());
        assert!(rep.failures().all(|r| r.name.starts_with("structure") && !r.anchor.is_empty()));
    }
}
