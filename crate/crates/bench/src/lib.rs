//! Criterion benchmarks for the scoring pipeline live under `benches/`.
