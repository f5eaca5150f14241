//! Criterion benchmarks for the `ultratree` kernel live in `benches/`.
