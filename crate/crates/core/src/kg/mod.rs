//! In-memory RDF triple store.

mod graph;
mod ntriples;
mod retrieve;
mod term;

pub use graph::{Graph, GraphStats, Overlay, TripleSource};
pub use ntriples::{parse_line, parse_ntriples, read_ntriples, ParseError};
pub use retrieve::retrieve_subgraph;
pub use term::{Datatype, Iri, Literal, Term, TermError, Triple, RDFS_LABEL, RDF_TYPE};
