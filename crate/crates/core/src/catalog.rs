//! Shipped surface configurations, addressed by string id.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lagrangian::{search_coassociative, LagrangianPatch};
use crate::quadrature::Domain;
use crate::sphere::SpherePoint;
use crate::surface::{Ball, PatchMap, SurfacePatch};
use crate::vec7::{self, V7};

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub models: &'static str,
    pub patch: SurfacePatch,
    pub ball: Option<Ball>,
    pub lagrangian: Option<LagrangianPatch>,
    pub holomorphic: bool,
    pub totally_geodesic: bool,
}

pub const IDS: [&str; 8] = [
    "geodesic-s2-assoc",
    "geodesic-s2-nonholo",
    "halfsphere-freeboundary",
    "halfsphere-lag",
    "halfsphere-nonlag",
    "hl-torus",
    "torus-ball-control",
    "small-sphere",
];

fn e(i: usize) -> V7<f64> {
    vec7::basis(i)
}

fn sphere_domain() -> Domain {
    Domain::Rect { s0: 0.0, s1: PI, t0: 0.0, t1: 2.0 * PI }
}

fn torus() -> SurfacePatch {
    SurfacePatch::new(PatchMap::HolomorphicTorus, Domain::Rect { s0: 0.0, s1: 2.0 * PI, t0: 0.0, t1: 2.0 * PI })
}

fn hemisphere() -> SurfacePatch {
    SurfacePatch::new(PatchMap::Hemisphere { basis: [e(0), e(1), e(2)] }, Domain::Disk { radius: 1.0 })
}

/// Lagrangian through the boundary great circle of the hemisphere, found by
/// the coassociative-plane search.
pub fn boundary_lagrangian() -> LagrangianPatch {
    search_coassociative(&e(0), &e(1), 1e-10).expect("search succeeds for the boundary circle")
}

/// Ball centred at the torus point `u(0, 0)`.
pub fn torus_control_ball() -> Ball {
    let c = torus().point(0.0, 0.0);
    Ball { center: SpherePoint::from_array(c).expect("unit"), radius: 0.4 }
}

pub fn lookup(id: &str) -> Result<CatalogEntry> {
    let entry = match id {
        "geodesic-s2-assoc" => CatalogEntry {
            id: IDS[0],
            description: "great 2-sphere in the associative 3-plane span(e1,e2,e3)",
            models: "totally geodesic holomorphic curve; surface and cone suites",
            patch: SurfacePatch::new(PatchMap::GreatSphere { basis: [e(0), e(1), e(2)] }, sphere_domain()),
            ball: None,
            lagrangian: None,
            holomorphic: true,
            totally_geodesic: true,
        },
        "geodesic-s2-nonholo" => CatalogEntry {
            id: IDS[1],
            description: "great 2-sphere in the non-associative 3-plane span(e1,e2,e4)",
            models: "non-holomorphic control; totally geodesic but not J-invariant",
            patch: SurfacePatch::new(PatchMap::GreatSphere { basis: [e(0), e(1), e(3)] }, sphere_domain()),
            ball: None,
            lagrangian: None,
            holomorphic: false,
            totally_geodesic: true,
        },
        "halfsphere-freeboundary" => CatalogEntry {
            id: IDS[2],
            description: "upper half of the associative great 2-sphere inside the ball of radius pi/2 about e3",
            models: "free-boundary holomorphic disk; rigidity test bed",
            patch: hemisphere(),
            ball: Some(Ball { center: SpherePoint::basis(2), radius: PI / 2.0 }),
            lagrangian: None,
            holomorphic: true,
            totally_geodesic: true,
        },
        "halfsphere-lag" => CatalogEntry {
            id: IDS[3],
            description: "upper half of the associative great 2-sphere with boundary on the Lagrangian 3-sphere S6 ∩ span(e1,e2,e5,e6)",
            models: "holomorphic disk with Lagrangian boundary; second variation and index bound test bed",
            patch: hemisphere(),
            ball: None,
            lagrangian: Some(boundary_lagrangian()),
            holomorphic: true,
            totally_geodesic: true,
        },
        "halfsphere-nonlag" => CatalogEntry {
            id: IDS[4],
            description: "upper half of the associative great 2-sphere with boundary on S6 ∩ span(e1,e2,e4,e5), which is not Lagrangian",
            models: "boundary-term control: the Lagrangian hypothesis fails",
            patch: hemisphere(),
            ball: None,
            lagrangian: Some(LagrangianPatch::new([e(0), e(1), e(3), e(4)]).expect("orthonormal")),
            holomorphic: true,
            totally_geodesic: true,
        },
        "hl-torus" => CatalogEntry {
            id: IDS[5],
            description: "flat holomorphic torus (0, cos s, sin s, cos t, sin t, cos(s+t), -sin(s+t))/sqrt(3)",
            models: "holomorphic curve that is not totally geodesic; shape-operator, Hopf and curvature identities",
            patch: torus(),
            ball: None,
            lagrangian: None,
            holomorphic: true,
            totally_geodesic: false,
        },
        "torus-ball-control" => CatalogEntry {
            id: IDS[6],
            description: "piece of the holomorphic torus cut out by a geodesic ball of radius 0.4 centred on it",
            models: "non-orthogonal free-boundary control; rigidity must be flagged",
            patch: torus(),
            ball: Some(torus_control_ball()),
            lagrangian: None,
            holomorphic: true,
            totally_geodesic: false,
        },
        "small-sphere" => CatalogEntry {
            id: IDS[7],
            description: "small 2-sphere 0.5 e4 + (sqrt 3/2) S2(e1,e2,e3)",
            models: "non-minimal control with nonzero mean curvature",
            patch: SurfacePatch::new(
                PatchMap::SmallSphere { basis: [e(0), e(1), e(2)], axis: e(3), height: 0.5 },
                sphere_domain(),
            ),
            ball: None,
            lagrangian: None,
            holomorphic: false,
            totally_geodesic: false,
        },
        other => return Err(Error::Config(format!("unknown catalog id `{other}`"))),
    };
    Ok(entry)
}

pub fn catalog() -> Vec<CatalogEntry> {
    IDS.iter().map(|id| lookup(id).expect("shipped id")).collect()
}

/// One block per entry: id, description and the configuration it models.
pub fn listing() -> String {
    let mut s = String::new();
    for e in catalog() {
        s.push_str(&format!("{}\n    {}\n    models: {}\n", e.id, e.description, e.models));
    }
    s
}

/// Parameter points where rays from `origin` first leave `ball`, found by
/// bisection on the geodesic distance to the centre.
pub fn ball_boundary_params(patch: &SurfacePatch, ball: &Ball, origin: (f64, f64), n: usize) -> Result<Vec<(f64, f64)>> {
    let c = ball.center.x();
    let dist = |s: f64, t: f64| vec7::dot(&patch.point(s, t), &c).clamp(-1.0, 1.0).acos();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let th = 2.0 * PI * k as f64 / n as f64;
        let (dx, dy) = (th.cos(), th.sin());
        let f = |r: f64| dist(origin.0 + r * dx, origin.1 + r * dy) - ball.radius;
        if f(0.0) >= 0.0 {
            return Err(Error::Precondition("ray origin lies outside the ball".into()));
        }
        let mut hi = 0.05;
        while f(hi) < 0.0 {
            hi *= 1.5;
            if hi > 10.0 {
                return Err(Error::Precondition("ray never leaves the ball".into()));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let r = 0.5 * (lo + hi);
        out.push((origin.0 + r * dx, origin.1 + r * dy));
    }
    Ok(out)
}

/// Samples on the boundary circle of a disk-domain patch.
pub fn disk_boundary_params(radius: f64, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let th = 2.0 * PI * (k as f64 + 0.25) / n as f64;
            (radius * th.cos(), radius * th.sin())
        })
        .collect()
}
