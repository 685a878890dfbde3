//! Criterion benchmarks for the weyllab-core kernels; see `benches/kernels.rs`.
