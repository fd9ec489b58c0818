//! Gauss–Legendre rules on parameter domains.
//!
//! Node evaluations run in parallel; accumulation is sequential in node order
//! so results are bit-reproducible for a given node count.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter domain of a surface patch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// `[s0, s1] × [t0, t1]`
    Rect { s0: f64, s1: f64, t0: f64, t1: f64 },
    /// Closed disk of the given radius centred at the origin, integrated in
    /// polar coordinates.
    Disk { radius: f64 },
}

/// A quadrature node with its weight (Jacobian included).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub s: f64,
    pub t: f64,
    pub w: f64,
}

/// A node on a boundary curve `τ ↦ (s(τ), t(τ))` with velocity and `dτ` weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryNode {
    pub s: f64,
    pub t: f64,
    pub ds: f64,
    pub dt: f64,
    pub w: f64,
    pub tau: f64,
}

/// Nodes and weights on `[a, b]`.
pub fn interval_rule(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(1)).expect("positive");
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out: Vec<(f64, f64)> = GaussLegendre::new(n)
        .iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// Tensor rule with `n` nodes per direction.
pub fn domain_rule(domain: &Domain, n: usize) -> Vec<Node> {
    match *domain {
        Domain::Rect { s0, s1, t0, t1 } => {
            let rs = interval_rule(s0, s1, n);
            let rt = interval_rule(t0, t1, n);
            rs.iter()
                .flat_map(|&(s, ws)| rt.iter().map(move |&(t, wt)| Node { s, t, w: ws * wt }))
                .collect()
        }
        Domain::Disk { radius } => {
            let rr = interval_rule(0.0, radius, n);
            let rth = interval_rule(0.0, 2.0 * PI, n);
            rr.iter()
                .flat_map(|&(r, wr)| {
                    rth.iter().map(move |&(th, wth)| Node {
                        s: r * th.cos(),
                        t: r * th.sin(),
                        w: wr * wth * r,
                    })
                })
                .collect()
        }
    }
}

/// Counterclockwise boundary circle of a disk domain; rectangles have none
/// here (catalog rectangles are closed surfaces or carry no boundary data).
pub fn boundary_rule(domain: &Domain, n: usize) -> Vec<BoundaryNode> {
    match *domain {
        Domain::Rect { .. } => Vec::new(),
        Domain::Disk { radius } => interval_rule(0.0, 2.0 * PI, n)
            .into_iter()
            .map(|(th, w)| BoundaryNode {
                s: radius * th.cos(),
                t: radius * th.sin(),
                ds: -radius * th.sin(),
                dt: radius * th.cos(),
                w,
                tau: th,
            })
            .collect(),
    }
}

/// `Σ w f(node)` with `K` simultaneous integrands.
pub fn integrate<const K: usize, F>(nodes: &[Node], f: F) -> [f64; K]
where
    F: Fn(f64, f64) -> [f64; K] + Sync,
{
    let vals: Vec<[f64; K]> = nodes.par_iter().map(|n| f(n.s, n.t)).collect();
    let mut acc = [0.0; K];
    for (n, v) in nodes.iter().zip(&vals) {
        for k in 0..K {
            acc[k] += n.w * v[k];
        }
    }
    acc
}

/// Fallible variant of [`integrate`]; the first error in node order wins.
pub fn try_integrate<const K: usize, F>(nodes: &[Node], f: F) -> Result<[f64; K]>
where
    F: Fn(f64, f64) -> Result<[f64; K]> + Sync,
{
    let vals: Vec<Result<[f64; K]>> = nodes.par_iter().map(|n| f(n.s, n.t)).collect();
    let mut acc = [0.0; K];
    for (n, v) in nodes.iter().zip(vals) {
        let v = v?;
        for k in 0..K {
            acc[k] += n.w * v[k];
        }
    }
    Ok(acc)
}

/// Boundary analogue of [`try_integrate`]; `f` receives the node itself.
pub fn try_integrate_boundary<const K: usize, F>(nodes: &[BoundaryNode], f: F) -> Result<[f64; K]>
where
    F: Fn(&BoundaryNode) -> Result<[f64; K]> + Sync,
{
    let vals: Vec<Result<[f64; K]>> = nodes.par_iter().map(&f).collect();
    let mut acc = [0.0; K];
    for (n, v) in nodes.iter().zip(vals) {
        let v = v?;
        for k in 0..K {
            acc[k] += n.w * v[k];
        }
    }
    Ok(acc)
}

/// Integrate at `n` and `2n` nodes; fail if the results differ by more than
/// `rel_tol` relative to `max(1, |I|)`.
pub fn integrate_checked<F>(domain: &Domain, n: usize, rel_tol: f64, f: F) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let a = integrate(&domain_rule(domain, n), |s, t| [f(s, t)])[0];
    let b = integrate(&domain_rule(domain, 2 * n), |s, t| [f(s, t)])[0];
    let rel = (a - b).abs() / b.abs().max(1.0);
    if rel > rel_tol {
        return Err(Error::Accuracy(format!("refinement changed integral by {rel:e} (n = {n})")));
    }
    Ok(b)
}
