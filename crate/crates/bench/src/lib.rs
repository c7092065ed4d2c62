//! Criterion benchmarks for mvlab; see `benches/`.
