//! Benchmark harness and curated suite behind the `fxsat` command-line tool.

pub mod bench;
pub mod suite;

pub use bench::{render_csv, run_benchmark, BenchRow, CSV_HEADER};
pub use suite::{curated_suite, CuratedCase};
