//! Criterion benchmarks for the perron-core pipeline; see `benches/`.
