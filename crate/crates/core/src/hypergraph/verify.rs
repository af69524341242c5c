use serde::{Deserialize, Serialize};

use super::{Coloring, EdgeId, Hypergraph, ListAssignment, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub is_total: bool,
    pub list_respecting: bool,
    /// Vertices whose color is missing from their list (or that have no list).
    pub off_list: Vec<VertexId>,
    pub monochromatic_edges: Vec<EdgeId>,
    /// Set when the coloring or list assignment does not cover `n` vertices.
    pub size_mismatch: bool,
    pub proper: bool,
}

pub fn verify(h: &Hypergraph, la: &ListAssignment, col: &Coloring) -> VerifyReport {
    let n = h.n();
    let size_mismatch = col.assignment.len() != n || la.lists.len() != n;
    let is_total = col.assignment.len() == n && col.is_total();
    let off_list: Vec<VertexId> = col
        .assignment
        .iter()
        .enumerate()
        .filter_map(|(v, c)| {
            let c = (*c)?;
            (!la.contains(v as VertexId, c)).then_some(v as VertexId)
        })
        .collect();
    let monochromatic_edges: Vec<EdgeId> = (0..h.m() as EdgeId)
        .filter(|&e| {
            let mut it = h.edge(e).iter().map(|&v| col.get(v));
            match it.next().flatten() {
                Some(c) => it.all(|x| x == Some(c)),
                None => false,
            }
        })
        .collect();
    let list_respecting = off_list.is_empty() && !size_mismatch;
    VerifyReport {
        proper: is_total && list_respecting && monochromatic_edges.is_empty(),
        is_total,
        list_respecting,
        off_list,
        monochromatic_edges,
        size_mismatch,
    }
}
