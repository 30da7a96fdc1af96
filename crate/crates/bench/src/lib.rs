//! Criterion benchmarks for the lattice kernels live in `benches/kernels.rs`.
