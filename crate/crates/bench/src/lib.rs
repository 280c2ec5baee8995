//! Criterion benchmarks for the crossing-intention toolkit; see `benches/`.
