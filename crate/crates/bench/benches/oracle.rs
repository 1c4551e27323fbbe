use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use graded_posets::genfun::{quark_family_count, QuarkFamilyFlags};
use graded_posets::oracle::{brute_counts_with, enumerate_bipartite};

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("posets n=5 serial", |b| b.iter(|| brute_counts_with(black_box(5), false).unwrap()));
    g.bench_function("bipartite 4x4 enumeration", |b| {
        b.iter(|| enumerate_bipartite(black_box(4), 4, QuarkFamilyFlags::MIDDLE).unwrap())
    });
    g.bench_function("bipartite 4x4 formula", |b| b.iter(|| quark_family_count(black_box(4), 4, QuarkFamilyFlags::MIDDLE)));
    g.finish();
}

criterion_group!(benches, oracle);
criterion_main!(benches);
