//! Benchmarks for the calculus and certification hot paths live in `benches/`.
