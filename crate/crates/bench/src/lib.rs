//! Criterion benchmarks for the ring engine; see `benches/`.
