//! The brute-force oracle side of the analyzer: Façade-X model instances
//! built from real files, their RDF materialization, BGP evaluation over the
//! resulting quads, and witness construction from solution patterns.

pub mod facadify;
pub mod matcher;
pub mod materialize;
pub mod mgraph;
pub mod model;
pub mod witness;

pub use facadify::{
    facadify_bytes, facadify_csv, facadify_file, facadify_file_as, facadify_json, facadify_xml,
    DataFormat, FacadifyError,
};
pub use matcher::{bgp_match, bgp_match_exists, Binding};
pub use materialize::{
    from_quads, instances_isomorphic, materialize, parse_nquads, to_nquads, to_ntriples,
    EntityMode, FxQuad,
    Term,
};
pub use model::{
    validate_model, AxiomViolation, ContainerId, FxInstance, Holding, LiteralValue, Slot, SlotKey,
    TypeName,
};
pub use witness::{build_witness, find_witness, WitnessError};
