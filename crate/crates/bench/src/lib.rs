//! Criterion benchmarks for `deficiency-core`. See `benches/`.
