//! Relaxation of failing entity relatedness queries over knowledge graphs.
//!
//! A query is a set of entities plus a diameter bound `D`; it succeeds when
//! some tree in the graph connects all of them with diameter at most `D`.
//! When it fails, the relaxers here find a largest succeeding sub-query
//! together with a compact certificate of its success.

pub mod association;
pub mod bench;
pub mod certificate;
pub mod distance;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod oracle;
pub mod quality;
pub mod query;
pub mod relax;
pub mod synthetic;
pub mod workload;

pub use association::{materialize_sa, tree_diameter, SemanticAssociation};
pub use certificate::{opt_with_cert, verify_certificate, Certificate, CertifiedSubQuery};
pub use distance::{BfsOracle, Distance, DistanceIndex, DistanceOracle};
pub use error::{Error, Result};
pub use graph::{load_graph, EntityGraph, EntityId, GraphBuilder, GraphFormat};
pub use query::{half_diameter, Query};
pub use relax::{
    certqr, certqr_plus, certqr_plus_with, certqr_with, is_successful, PriorityMode, RelaxOptions, RelaxationOutcome,
    RunStats,
};
