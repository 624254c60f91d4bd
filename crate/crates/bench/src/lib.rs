//! Benchmark-only crate; the measurements live in `benches/routing.rs`.
