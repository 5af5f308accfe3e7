//! Criterion benchmarks for csreg; see `benches/`.
