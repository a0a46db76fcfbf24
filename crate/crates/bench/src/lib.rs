//! Criterion benchmarks for the exploration engine live under `benches/`.
