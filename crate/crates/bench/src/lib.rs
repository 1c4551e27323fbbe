//! Criterion benchmarks for the counting pipelines and the oracle live in
//! `benches/`.
