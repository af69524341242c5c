use thiserror::Error;

use crate::hypergraph::{Color, EdgeId, VertexId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge {edge} has {got} vertices, expected {expected}")]
    Arity { edge: usize, got: usize, expected: usize },
    #[error("edge {edge} repeats vertex {vertex}")]
    RepeatedVertex { edge: usize, vertex: VertexId },
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: u64, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("keep is undefined for alpha = {alpha} >= L = {l}")]
    KeepDomain { alpha: f64, l: f64 },
    #[error("vertex {vertex} has {len} colors, below the target {target}")]
    ListTooShort { vertex: VertexId, len: usize, target: usize },
    #[error("t_{r}({vertex}, {color}) = {count} exceeds the target {target}")]
    ConflictTooHigh { vertex: VertexId, color: Color, r: usize, count: u64, target: u64 },
    #[error("list of vertex {vertex} exhausted ({list_len} colors, {forbidden} forbidden, {blocked} blocked by colored neighbors)")]
    ListExhausted { vertex: VertexId, list_len: usize, forbidden: usize, blocked: usize },
    #[error("resample budget of {budget} exhausted with {violated} events still violated")]
    BudgetExhausted { budget: u64, violated: usize },
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("hypergraph has a {len}-cycle on edges {edges:?}")]
    GirthViolation { len: usize, edges: Vec<EdgeId> },
    #[error("average degree {d} is not above e")]
    DegreeTooLow { d: f64 },
    #[error("theory-mode schedule cannot be followed: {0}")]
    TheoryPrecondition(String),
    #[error("trajectory collapsed at iteration {0} (L <= alpha or L <= 0)")]
    Collapse(usize),
    #[error("partial coloring is improper on edge {0}")]
    ImproperInput(EdgeId),
}
