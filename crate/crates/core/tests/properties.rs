use std::f64::consts::PI;

use nalgebra::DMatrix;
use nklab::config::RunConfig;
use nklab::cone::{cone_phi, cone_psi, ConePoint};
use nklab::index::{maslov_index, morse_index_lower_bound, MaslovLoopData, QuadFormMatrix};
use nklab::octonion::{phi0_generic, psi0_generic, ImOct};
use nklab::sphere::{self, almost_complex_j, check_curvature_identity, torsion_p, SpherePoint, TangentVec};
use nklab::vec7::{self, V7};
use proptest::prelude::*;

fn v7() -> impl Strategy<Value = V7<f64>> {
    prop::array::uniform7(-1.0..1.0f64)
}

fn point() -> impl Strategy<Value = SpherePoint> {
    v7().prop_filter("nonzero", |v| vec7::norm(v) > 1e-3).prop_map(|v| SpherePoint::from_array(v).unwrap())
}

fn tangent(p: &SpherePoint, v: &V7<f64>) -> TangentVec {
    sphere::project_tangent(p, &ImOct(*v))
}

proptest! {
    #[test]
    fn cross_product_is_alternating_orthogonal_and_normed(x in v7(), y in v7()) {
        let (a, b) = (ImOct(x), ImOct(y));
        let c = a.cross(&b);
        prop_assert!(vec7::dist_inf(&c.0, &vec7::neg(&b.cross(&a).0)) < 1e-15);
        prop_assert!(c.dot(&a).abs() < 1e-12 && c.dot(&b).abs() < 1e-12);
        prop_assert!((c.dot(&c) - (a.dot(&a) * b.dot(&b) - a.dot(&b).powi(2))).abs() < 1e-12);
    }

    #[test]
    fn phi0_is_the_cross_product_pairing(x in v7(), y in v7(), z in v7()) {
        let p = phi0_generic(&x, &y, &z);
        prop_assert!((p - vec7::dot(&ImOct(x).cross(&ImOct(y)).0, &z)).abs() < 1e-12);
        prop_assert!((p + phi0_generic(&y, &x, &z)).abs() < 1e-12);
        prop_assert!((p - phi0_generic(&y, &z, &x)).abs() < 1e-12);
    }

    #[test]
    fn star_phi0_is_alternating(w in v7(), x in v7(), y in v7(), z in v7()) {
        let s = psi0_generic(&w, &x, &y, &z);
        prop_assert!((s + psi0_generic(&x, &w, &y, &z)).abs() < 1e-12);
        prop_assert!((s + psi0_generic(&w, &x, &z, &y)).abs() < 1e-12);
        prop_assert!(psi0_generic(&w, &w, &y, &z).abs() < 1e-12);
    }

    #[test]
    fn j_is_an_orthogonal_complex_structure(p in point(), x in v7(), y in v7()) {
        let (x, y) = (tangent(&p, &x), tangent(&p, &y));
        let jx = almost_complex_j(&p, &x).unwrap();
        let jjx = almost_complex_j(&p, &jx).unwrap();
        prop_assert!(vec7::dist_inf(&jjx.v(), &vec7::neg(&x.v())) < 1e-12);
        let jy = almost_complex_j(&p, &y).unwrap();
        prop_assert!((jx.dot(&jy) - x.dot(&y)).abs() < 1e-12);
        prop_assert!(jx.dot(&x).abs() < 1e-12);
    }

    #[test]
    fn torsion_has_constant_type_one(p in point(), x in v7(), y in v7()) {
        let (x, y) = (tangent(&p, &x), tangent(&p, &y));
        let jx = almost_complex_j(&p, &x).unwrap();
        let expected = x.norm().powi(2) * y.norm().powi(2) - x.dot(&y).powi(2) - jx.dot(&y).powi(2);
        prop_assert!((torsion_p(&p, &x, &y).unwrap().norm().powi(2) - expected).abs() < 1e-7);
        prop_assert!(check_curvature_identity(&p, &x, &y).unwrap() < 1e-7);
    }

    #[test]
    fn cone_forms_are_the_flat_forms(
        r in 0.2..3.0f64, m in point(), u in v7(), v in v7(), w in v7(), z in v7()
    ) {
        let cp = ConePoint::new(r, m).unwrap();
        prop_assert!((cone_phi(&cp, &u, &v, &w) - phi0_generic(&u, &v, &w)).abs() < 1e-7);
        prop_assert!((cone_psi(&cp, &[u, v, w, z]) - psi0_generic(&u, &v, &w, &z)).abs() < 1e-7);
    }

    #[test]
    fn rotating_line_has_maslov_index_twice_its_winding(k in -3i64..=3, phase in 0.0..(2.0 * PI)) {
        let n = 256;
        let params: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let line = |t: f64| {
            let a = k as f64 * t + phase;
            [a.cos(), a.sin(), 0.0, 0.0, 0.0, 0.0, 0.0]
        };
        let data = MaslovLoopData {
            base: vec![vec7::basis(2); n],
            bundle_frames: vec![vec![vec7::basis(0)]; n],
            lagrangian_frames: params.iter().map(|&t| vec![line(t)]).collect(),
            loop_params: params,
        };
        prop_assert_eq!(maslov_index(&data).unwrap(), 2 * k);
    }

    #[test]
    fn morse_count_of_diagonal_forms(d in prop::collection::vec(prop_oneof![-5.0..-0.1f64, 0.1..5.0f64], 1..8)) {
        let n = d.len();
        let q = QuadFormMatrix::from_parts(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone())), DMatrix::identity(n, n));
        let count = morse_index_lower_bound(&q, 1e-9).unwrap();
        prop_assert_eq!(count, d.iter().filter(|&&x| x < 0.0).count());
    }

    #[test]
    fn node_counts_must_be_powers_of_two(n in 0usize..5000) {
        let ok = RunConfig::parse(&format!("nodes = {n}")).is_ok();
        prop_assert_eq!(ok, n >= 16 && n.is_power_of_two());
    }

    #[test]
    fn config_seed_round_trips(seed in any::<u64>()) {
        prop_assert_eq!(RunConfig::parse(&format!("seed = {seed}")).unwrap().seed, seed);
    }
}
