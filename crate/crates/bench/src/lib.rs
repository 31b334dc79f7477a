//! Criterion benchmarks for `bohr-core`; see `benches/`.
