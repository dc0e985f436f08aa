//! Criterion benchmarks for the evaluator; see `benches/christoffel.rs`.
