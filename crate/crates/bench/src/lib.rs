//! Criterion benchmarks for the exact kernels of `casimir-core`; see `benches/kernels.rs`.
