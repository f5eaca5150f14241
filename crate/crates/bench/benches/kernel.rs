use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ultratree::generate::{random_complete_tree, random_end_map, random_step_modulus, random_ultrametric, relabeled_copy, seeded};
use ultratree::morphisms::{check_lipschitz1, sample_pairs};
use ultratree::{concave_majorant, ends_of, induce_tree_map, tree_of};

fn duality(c: &mut Criterion) {
    let mut group = c.benchmark_group("tree_of");
    for n in [16, 64, 256] {
        let space = random_ultrametric(&mut seeded(n as u64), n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &space, |b, s| b.iter(|| tree_of(black_box(s)).unwrap()));
    }
    group.finish();

    let tree = tree_of(&random_ultrametric(&mut seeded(1), 128)).unwrap();
    c.bench_function("ends_of/128", |b| b.iter(|| ends_of(black_box(&tree)).unwrap()));
}

fn majorant(c: &mut Criterion) {
    let mut group = c.benchmark_group("concave_majorant");
    for steps in [8, 64, 512] {
        let rho = random_step_modulus(&mut seeded(steps as u64), 4096, steps);
        group.bench_with_input(BenchmarkId::from_parameter(steps), &rho, |b, r| b.iter(|| concave_majorant(black_box(r))));
    }
    group.finish();
}

fn lipschitz(c: &mut Criterion) {
    let mut rng = seeded(7);
    let (s, t) = (random_ultrametric(&mut rng, 16), random_ultrametric(&mut rng, 16));
    let m = induce_tree_map(&random_end_map(&mut rng, &s, &t)).unwrap();
    let pairs = sample_pairs(m.source(), 1000, &mut rng);
    c.bench_function("check_lipschitz1/1000_pairs", |b| b.iter(|| check_lipschitz1(black_box(&m), &pairs).unwrap()));
}

fn isometry(c: &mut Criterion) {
    let mut rng = seeded(9);
    let tree = random_complete_tree(&mut rng, 64, 8);
    let (copy, _) = relabeled_copy(&mut rng, &tree);
    c.bench_function("rooted_isometric/64", |b| b.iter(|| black_box(&tree).rooted_isometric(black_box(&copy)).unwrap()));
}

criterion_group!(benches, duality, majorant, lipschitz, isometry);
criterion_main!(benches);
