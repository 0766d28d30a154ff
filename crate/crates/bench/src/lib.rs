//! Criterion benchmarks for the splice pipeline live in `benches/`.
