use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use graded_posets::genfun::{strong_by_height_gf, strong_closed_form, strong_gf, weak_total_closed_form, weak_total_gf, Method};

fn pipelines(c: &mut Criterion) {
    let mut g = c.benchmark_group("order 16");
    g.bench_function("strong pipeline", |b| b.iter(|| strong_gf(black_box(16), Method::Pipeline).unwrap()));
    g.bench_function("strong by height", |b| b.iter(|| strong_by_height_gf(black_box(16)).unwrap()));
    g.bench_function("weak pipeline", |b| b.iter(|| weak_total_gf(black_box(16), Method::Pipeline).unwrap()));
    g.bench_function("strong closed form", |b| b.iter(|| strong_closed_form(black_box(16))));
    g.bench_function("weak closed form", |b| b.iter(|| weak_total_closed_form(black_box(16))));
    g.finish();
}

criterion_group!(benches, pipelines);
criterion_main!(benches);
