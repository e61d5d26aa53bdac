//! Criterion benchmarks for the qdstack kernels live under `benches/`.
