use criterion::{criterion_group, criterion_main, Criterion};
use dualpair::classify::{rs_pair_exists, PairType};
use dualpair::corresp::{verify_theorem, DEFAULT_BUDGET};
use dualpair::lattice::{jumps, tensor_jumps};
use dualpair::sample::{random_combination, random_mat, rng_from_seed};
use dualpair::{
    make_field, ApartmentPoint, DivisionKind, Involution, LieAlgebra, LieType, Rational, Sign,
};
use dualpair_bench::{prime_field, sp2_o3_instance, sp_o, symplectic};
use std::hint::black_box;

fn field_arithmetic(c: &mut Criterion) {
    let f = make_field(5, 2, Involution::Frobenius).unwrap();
    let els: Vec<_> = f.elements().collect();
    c.bench_function("F25 all products and conjugates", |b| {
        b.iter(|| {
            let mut acc = f.from_i64(0);
            for &x in &els {
                for &y in &els {
                    acc = f.add(acc, f.mul(x, f.conj(y)));
                }
            }
            black_box(acc)
        })
    });
}

fn moment_maps(c: &mut Criterion) {
    let f = prime_field(5);
    let s = sp_o(&f, 4, 5);
    let (r, cols) = s.w_shape();
    let mut rng = rng_from_seed(7);
    let w = random_mat(&f, r, cols, &mut rng);
    c.bench_function("Sp4xO5 moment pair", |b| {
        b.iter(|| black_box((s.moment(&w), s.moment_p(&w))))
    });
}

fn regular_semisimple(c: &mut Criterion) {
    let f = prime_field(5);
    let v = symplectic(&f, 6);
    let g = LieAlgebra::of_space(&v);
    let mut rng = rng_from_seed(11);
    let x = random_combination(&f, &v.lie_basis(), &mut rng);
    c.bench_function("sp6 invariant P", |b| {
        b.iter(|| black_box(g.is_regular_semisimple(&x)))
    });
    c.bench_function("sp6 centralizer oracle", |b| {
        b.iter(|| black_box(g.centralizer_oracle(&x)))
    });
}

fn jump_sets(c: &mut Criterion) {
    let q = Rational::new;
    let pt = ApartmentPoint::new(
        DivisionKind::Split,
        Sign::Minus,
        vec![q(3, 8), q(1, 8), q(-5, 12)],
        vec![],
        vec![],
    )
    .unwrap();
    let ptp = ApartmentPoint::new(
        DivisionKind::Split,
        Sign::Plus,
        vec![q(1, 2), q(1, 4)],
        vec![q(0, 1)],
        vec![1],
    )
    .unwrap();
    c.bench_function("tensor jumps", |b| {
        b.iter(|| black_box(tensor_jumps(&jumps(&pt), &jumps(&ptp))))
    });
}

fn exhaustive_classification(c: &mut Criterion) {
    let f = prime_field(5);
    let pair = PairType::new(LieType::O(2), LieType::Sp(4)).unwrap();
    let mut group = c.benchmark_group("classify");
    group.sample_size(10);
    group.bench_function("O2-Sp4 exhaustive over F5", |b| {
        b.iter(|| black_box(rs_pair_exists(&pair, &f, u64::MAX, 1).unwrap()))
    });
    group.finish();
}

fn correspondence(c: &mut Criterion) {
    let inst = sp2_o3_instance(5);
    c.bench_function("Sp2-O3 theorem check over F5", |b| {
        b.iter(|| black_box(verify_theorem(&inst, DEFAULT_BUDGET).unwrap()))
    });
}

criterion_group!(
    kernels,
    field_arithmetic,
    moment_maps,
    regular_semisimple,
    jump_sets,
    exhaustive_classification,
    correspondence
);
criterion_main!(kernels);
