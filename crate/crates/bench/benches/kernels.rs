use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nklab::catalog::lookup;
use nklab::cone;
use nklab::index::{assemble_quadratic_form, maslov_decomposition_check, BasisSpec, LoopSampling};
use nklab::octonion::ImOct;
use nklab::sphere::{self, SpherePoint};
use nklab::variation::{admissible_basis, second_variation_nk, QuadratureSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn algebra(c: &mut Criterion) {
    let x = ImOct([0.3, -0.1, 0.8, 0.2, -0.5, 0.4, 0.1]);
    let y = ImOct([-0.6, 0.2, 0.1, 0.9, 0.3, -0.2, 0.5]);
    c.bench_function("cross_product", |b| b.iter(|| black_box(&x).cross(black_box(&y))));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = SpherePoint::random(&mut rng);
    c.bench_function("structure_equations_at_point", |b| {
        b.iter(|| sphere::check_structure_equations(black_box(&p), &mut rng, 2, 1e-4))
    });
}

fn variation(c: &mut Criterion) {
    let e = lookup("halfsphere-lag").unwrap();
    let l = e.lagrangian.clone().unwrap();
    let fields = admissible_basis(&e.patch, &l, 1).unwrap();
    let q = QuadratureSpec { interior: 32, boundary: 128 };
    c.bench_function("second_variation_nk_32", |b| {
        b.iter(|| second_variation_nk(&e.patch, &l, black_box(&fields[3]), &q).unwrap())
    });
    let basis = BasisSpec::new(fields);
    let mut g = c.benchmark_group("index");
    g.sample_size(10);
    g.bench_function("assemble_degree1_32", |b| b.iter(|| assemble_quadratic_form(&e.patch, &l, &basis, &q).unwrap()));
    g.bench_function("maslov_decomposition", |b| {
        b.iter(|| maslov_decomposition_check(&e.patch, &l, &LoopSampling::default()).unwrap())
    });
    g.finish();
}

fn cone_checks(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pts = cone::random_cone_points(&mut rng, 4);
    c.bench_function("cone_torsion_free_check", |b| b.iter(|| cone::torsion_free_check(black_box(&pts), 1e-4)));
}

criterion_group!(benches, algebra, variation, cone_checks);
criterion_main!(benches);
