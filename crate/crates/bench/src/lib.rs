//! Criterion benchmarks for `slitsim-core`; see `benches/`.
