//! Criterion benchmarks for the `udw-core` kernels; see `benches/kernels.rs`.
