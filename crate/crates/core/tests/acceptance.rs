//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances and time limits are pinned here rather than read from
//! the suite configuration.

use std::time::{Duration, Instant};

use nklab::catalog::{self, lookup};
use nklab::config::{nodes_spec, RunConfig, Suite};
use nklab::cone;
use nklab::index::{
    assemble_quadratic_form, maslov_decomposition_check, verify_index_bound, BasisSpec, LoopSampling, Verdict,
};
use nklab::suite::{run, CheckRecord, Status, SuiteReport};
use nklab::surface::midpoint_grid;
use nklab::variation::{admissible_basis, QuadratureSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const NODES: usize = 64;

const EXACT: f64 = 1e-12;
const ALGEBRAIC: f64 = 1e-7;
const FD1: f64 = 1e-5;
const FD2: f64 = 1e-4;
const INTEGRAL: f64 = 1e-3;
const ORTHOGONALITY: f64 = 1e-8;
const SURFACE: f64 = 1e-6;
const KERNEL_SV: f64 = 1e-5;

struct Outcome {
    checks: Vec<(String, bool)>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { checks: Vec::new() }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    fn below(&mut self, what: &str, value: Option<f64>, limit: f64) {
        let ok = value.is_some_and(|v| v < limit);
        self.check(format!("{what}: {} < {limit:e}", value.map_or("missing".into(), |v| format!("{v:.3e}"))), ok);
    }

    fn within(&mut self, start: Instant, limit: Duration) {
        let t = start.elapsed();
        self.check(format!("runtime {:.2}s < {}s", t.as_secs_f64(), limit.as_secs()), t < limit);
    }
}

fn config(suite: Suite) -> RunConfig {
    RunConfig { suite, seed: SEED, quadrature: nodes_spec(NODES), ..RunConfig::default() }
}

fn records<'a>(rep: &'a SuiteReport, name: &str, entry: Option<&str>) -> Vec<&'a CheckRecord> {
    rep.records
        .iter()
        .filter(|r| (r.name == name || r.name.starts_with(&format!("{name}/"))) && (entry.is_none() || r.entry.as_deref() == entry))
        .collect()
}

fn residual(rep: &SuiteReport, name: &str, entry: Option<&str>) -> Option<f64> {
    let rs = records(rep, name, entry);
    if rs.is_empty() {
        return None;
    }
    rs.iter().map(|r| r.residual).try_fold(0.0f64, |m, x| x.map(|v| m.max(v)))
}

fn no_failures(o: &mut Outcome, rep: &SuiteReport) {
    let failed: Vec<String> = rep.failures().map(|r| r.key()).collect();
    o.check(format!("suite reports no failures {failed:?}"), failed.is_empty());
}

fn algebra() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let rep = run(&config(Suite::Algebra)).unwrap();
    o.within(t, Duration::from_secs(1));
    for name in ["cross-product-norm", "phi0-alternating", "star-phi0-alternating", "metric-recovery"] {
        o.below(name, residual(&rep, name, None), EXACT);
    }
    no_failures(&mut o, &rep);
    o
}

fn nk_identities() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let rep = run(&config(Suite::NkIdentities)).unwrap();
    o.within(t, Duration::from_secs(10));
    for name in ["torsion-antisymmetry", "torsion-symmetries", "constant-type", "curvature-identity"] {
        o.below(name, residual(&rep, name, None), ALGEBRAIC);
    }
    for name in ["structure-d-omega", "structure-d-re-upsilon"] {
        o.below(name, residual(&rep, name, None), FD1);
    }
    no_failures(&mut o, &rep);
    o
}

fn surface() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let rep = run(&config(Suite::Curve)).unwrap();
    o.within(t, Duration::from_secs(30));
    for id in ["geodesic-s2-assoc", "hl-torus"] {
        o.below(&format!("shape-operator symmetries on {id}"), residual(&rep, "shape-operator-symmetries", Some(id)), ALGEBRAIC);
        o.below(&format!("Ricci equation on {id}"), residual(&rep, "ricci-equation", Some(id)), FD1);
        o.below(&format!("mean curvature on {id}"), residual(&rep, "mean-curvature", Some(id)), SURFACE);
        o.below(&format!("Hopf frame independence on {id}"), residual(&rep, "hopf-frame-independence", Some(id)), SURFACE);
    }
    no_failures(&mut o, &rep);
    o
}

fn free_boundary() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let mut cfg = config(Suite::Curve);
    cfg.catalog_ids = vec!["halfsphere-freeboundary".into(), "torus-ball-control".into()];
    let rep = run(&cfg).unwrap();
    o.within(t, Duration::from_secs(30));
    let id = Some("halfsphere-freeboundary");
    o.below("boundary orthogonality", residual(&rep, "boundary-orthogonality", id), ORTHOGONALITY);
    o.below("umbilicity A = cot(ρ) Id", residual(&rep, "ball-umbilicity", id), SURFACE);
    o.below("Φ along boundary and interior", residual(&rep, "hopf-vanishing", id), SURFACE);
    let ctl = records(&rep, "orthogonality-control", Some("torus-ball-control"));
    o.check(
        "non-orthogonal control flagged",
        ctl.len() == 1 && ctl[0].status == Status::Pass && ctl[0].residual.is_some_and(|r| r > SURFACE),
    );
    no_failures(&mut o, &rep);
    o
}

fn second_variation() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let rep = run(&config(Suite::Variation)).unwrap();
    o.within(t, Duration::from_secs(300));
    let id = Some("halfsphere-lag");
    let oracle = records(&rep, "master-oracle", id);
    let good = oracle.iter().filter(|r| r.residual.is_some_and(|x| x < INTEGRAL)).count();
    o.check(format!("{good} of {} fields match the area oracle within {INTEGRAL:e} (need ≥ 5)", oracle.len()), good >= 5 && good == oracle.len());
    o.below("general formula vs oracle", residual(&rep, "general-formula", id), INTEGRAL);
    o.below("shape/torsion pairing", residual(&rep, "shape-torsion-pairing", None), FD1);
    o.below("dα identity", residual(&rep, "d-alpha-identity", None), FD2);
    o.below("boundary term, pointwise", residual(&rep, "boundary-term", id), FD2);
    no_failures(&mut o, &rep);
    o
}

fn kernel_negativity() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let e = lookup("halfsphere-lag").unwrap();
    let l = e.lagrangian.clone().unwrap();
    let basis = BasisSpec::new(admissible_basis(&e.patch, &l, 2).unwrap());
    let q = assemble_quadratic_form(&e.patch, &l, &basis, &nodes_spec(NODES)).unwrap();
    let mut kernel_fields = 0;
    for i in 0..basis.len() {
        let sv = (q.dbar[(i, i)] / q.gram[(i, i)]).max(0.0).sqrt();
        if sv < KERNEL_SV {
            kernel_fields += 1;
            let d2 = q.q[(i, i)];
            let expected = -2.0 * q.gram[(i, i)];
            let rel = (d2 - expected).abs() / expected.abs();
            o.check(format!("{}: δ²A = {d2:.6} < 0, rel. dev. from −2∫|η|² {rel:.1e} < {INTEGRAL:e}", q.names[i]), d2 < 0.0 && rel < INTEGRAL);
        }
    }
    o.check(format!("{kernel_fields} basis fields in the 𝒟-kernel (need ≥ 1)"), kernel_fields >= 1);
    let ker = q.dbar_kernel(KERNEL_SV).unwrap();
    for c in &ker {
        let d2 = nklab::index::QuadFormMatrix::form(&q.q, c);
        let mass = nklab::index::QuadFormMatrix::form(&q.gram, c);
        o.check(format!("kernel combination: δ²A = {d2:.6} vs −2∫|η|² = {:.6}", -2.0 * mass), d2 < 0.0 && (d2 + 2.0 * mass).abs() < INTEGRAL * d2.abs());
    }
    o.within(t, Duration::from_secs(120));
    o
}

fn maslov() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let e = lookup("halfsphere-lag").unwrap();
    let l = e.lagrangian.clone().unwrap();
    let s = LoopSampling::default();
    let m = maslov_decomposition_check(&e.patch, &l, &s).unwrap();
    o.check(format!("μ(TΣ, T∂Σ) = {} = 2χ(disk)", m.tangent), m.tangent == 2);
    o.check(format!("additivity {} = {} + {}", m.total, m.tangent, m.normal), m.additive && m.total == m.tangent + m.normal);
    let r = maslov_decomposition_check(&e.patch, &l, &s.refined()).unwrap();
    o.check("stable under 2× sampling refinement", r == m);
    let basis = BasisSpec::new(admissible_basis(&e.patch, &l, 2).unwrap());
    let rep = verify_index_bound(&e.patch, &l, &basis, &QuadratureSpec { interior: NODES, boundary: 4 * NODES }, &s).unwrap();
    let consistent = rep.bound_satisfied == (rep.negative_count as i64 >= rep.maslov_total)
        && match rep.verdict {
            Verdict::Satisfied => rep.bound_satisfied && rep.maslov_total > 0,
            Verdict::Vacuous => rep.maslov_total <= 0,
            Verdict::BasisInsufficient => false,
        };
    o.check(
        format!("verdict {:?}: {} negative eigenvalues, μ = {}", rep.verdict, rep.negative_count, rep.maslov_total),
        consistent,
    );
    o.within(t, Duration::from_secs(300));
    o
}

fn cone_suite() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let rep = run(&config(Suite::Cone)).unwrap();
    for name in ["d-phi", "d-psi", "phi-primitive", "psi-primitive"] {
        o.below(name, residual(&rep, name, None), FD1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let pts = cone::random_cone_points(&mut rng, 5);
    let st = cone::torsion_step_study(&pts, 1e-3);
    o.check(format!("h² convergence: ratios {:.3}, {:.3} in [3, 5]", st.d_phi_ratio, st.d_psi_ratio), st.is_second_order());
    o.below("flat vs cone φ", residual(&rep, "flat-phi", None), ALGEBRAIC);
    let (mut holo, mut nonholo) = (0, 0);
    for e in catalog::catalog() {
        let a = cone::associativity_check(&e.patch, &midpoint_grid(&e.patch.domain, 6), 1.0).unwrap();
        let assoc = a.max_residual < ALGEBRAIC;
        if e.holomorphic { holo += 1 } else { nonholo += 1 }
        o.check(format!("{}: associative = {assoc}, holomorphic = {}", e.id, e.holomorphic), assoc == e.holomorphic && a.equivalence_holds(ALGEBRAIC));
    }
    o.check("both directions exercised", holo > 0 && nonholo > 0);
    no_failures(&mut o, &rep);
    o.within(t, Duration::from_secs(60));
    o
}

fn reproducibility() -> Outcome {
    let mut o = Outcome::new();
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for k in 0..2 {
        let rep = run(&config(Suite::All)).unwrap();
        let p = dir.path().join(format!("run{k}.json"));
        rep.write(&p).unwrap();
        files.push((p, rep));
    }
    let strip = |p: &std::path::Path| {
        let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_vec(&v).unwrap()
    };
    o.check("report files identical without timing", strip(&files[0].0) == strip(&files[1].0));
    o.check("reproducible JSON identical", files[0].1.reproducible_json() == files[1].1.reproducible_json());
    let csv = |k: usize| std::fs::read(files[k].0.with_extension("csv")).unwrap();
    o.check("residual tables identical", csv(0) == csv(1));
    let mut par = config(Suite::All);
    par.parallel = true;
    o.check("parallel run gives the same records", run(&par).unwrap().records == files[0].1.records);
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("algebra suite", algebra),
        ("nearly-Kähler identities", nk_identities),
        ("surface identities", surface),
        ("free-boundary rigidity mechanism", free_boundary),
        ("second-variation master oracle", second_variation),
        ("negativity on the 𝒟-kernel", kernel_negativity),
        ("Maslov indices and index bound", maslov),
        ("cone G₂ structure", cone_suite),
        ("reproducibility", reproducibility),
    ];
    let verbose = std::env::args().any(|a| a == "--nocapture" || a == "--verbose");
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let out = f();
        let ok = out.checks.iter().all(|(_, b)| *b);
        println!("criterion {} {}: {name}", k + 1, if ok { "PASS" } else { "FAIL" });
        for (what, b) in &out.checks {
            if !b || verbose {
                println!("    [{}] {what}", if *b { "ok" } else { "FAIL" });
            }
        }
        failed += usize::from(!ok);
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
