//! Static satisfiability analysis for SPARQL basic graph patterns over
//! Façade-X RDF graphs.
//!
//! A Façade-X graph represents any structured source (CSV, JSON, XML) using
//! only containers, slots, values, and types, and therefore uses a small
//! fraction of RDF. Many basic graph patterns can never match such a graph;
//! this crate decides whether one can, enumerates the valid solution
//! patterns (node-to-role annotations), and cross-validates every verdict
//! against a brute-force oracle running on materialized graphs.
//!
//! The main entry points are:
//! - [`parser::parse_bgp_text`] / [`parser::extract_bgps_from_query`]
//! - [`annotate::is_satisfiable`] with a choice of algorithm and mode
//! - [`oracle`] for building Façade-X instances from files, materializing
//!   them as quads, matching BGPs against them, and constructing witness
//!   graphs from solution patterns

pub mod annotate;
pub mod annotation;
pub mod oracle;
pub mod parser;
pub mod predicate;
mod realize;
pub mod rules;
pub mod sample;
pub mod structure;
pub mod term;

pub use annotate::{is_satisfiable, Algorithm, Mode, SatReport, Verdict};
pub use annotation::Annotation;
pub use parser::{extract_bgps_from_query, parse_bgp_text, serialize_bgp, strip_config_triples};
pub use predicate::FxPredicate;
pub use term::{Bgp, NodeKind, PatternNode, TriplePattern};
