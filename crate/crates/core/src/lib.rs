//! List coloring of k-uniform hypergraphs of girth at least five by the
//! semi-random method, with the random-hypergraph pipeline around it.

pub mod error;
pub mod exec;
pub mod finisher;
pub mod hypergraph;
pub mod nibble;
pub mod pipeline;
pub mod randgen;
pub mod rng;
pub mod schedule;

pub use error::{Error, Result};
pub use exec::Exec;
pub use hypergraph::{Color, Coloring, EdgeId, Hypergraph, ListAssignment, VertexId};
