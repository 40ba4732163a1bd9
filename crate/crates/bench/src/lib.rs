//! Criterion benchmarks for the sieve and the zeta engine; see `benches/`.
