//! Criterion benchmarks for `brandsim-core`; see `benches/`.
