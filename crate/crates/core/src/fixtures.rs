//! Small bundled graphs used by tests, examples and the CLI smoke checks.

use crate::graph::{load_edge_list, load_ntriples, EntityGraph, EntityId};

pub const CONFERENCE_NT: &str = include_str!("../data/conference.nt");
pub const TRIANGLE_TSV: &str = include_str!("../data/triangle.tsv");
pub const CONFERENCE_PREFIX: &str = "http://example.org/";

/// The conference knowledge graph: researchers, papers and one venue.
pub fn conference_graph() -> EntityGraph {
    load_ntriples(CONFERENCE_NT.as_bytes()).expect("bundled conference graph parses")
}

pub fn triangle_graph() -> EntityGraph {
    load_edge_list(TRIANGLE_TSV.as_bytes()).expect("bundled triangle graph parses")
}

/// Looks up a conference entity by its local name, e.g. `"Alice"`.
pub fn conf(g: &EntityGraph, local: &str) -> EntityId {
    g.lookup(&format!("{CONFERENCE_PREFIX}{local}")).unwrap_or_else(|| panic!("no conference entity {local}"))
}
