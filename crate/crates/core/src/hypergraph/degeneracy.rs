use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Hypergraph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degeneracy {
    pub kappa: usize,
    /// Elimination order: `order[0]` is deleted first.
    pub order: Vec<VertexId>,
    /// Degree of each vertex at the moment it was deleted, indexed by vertex.
    pub degree_at_deletion: Vec<usize>,
}

/// Repeatedly deletes a minimum-degree vertex (smallest id on ties) together
/// with all of its remaining edges.
pub fn degeneracy(h: &Hypergraph) -> Degeneracy {
    let n = h.n();
    let mut deg: Vec<usize> = h.degrees();
    let mut edge_alive = vec![true; h.m()];
    let mut queue: BTreeSet<(usize, VertexId)> =
        (0..n).map(|v| (deg[v], v as VertexId)).collect();
    let mut order = Vec::with_capacity(n);
    let mut at_deletion = vec![0; n];
    let mut kappa = 0;
    while let Some((d, v)) = queue.pop_first() {
        kappa = kappa.max(d);
        at_deletion[v as usize] = d;
        order.push(v);
        for &e in h.incident(v) {
            if !edge_alive[e as usize] {
                continue;
            }
            edge_alive[e as usize] = false;
            for &u in h.edge(e) {
                if u != v {
                    let du = &mut deg[u as usize];
                    queue.remove(&(*du, u));
                    *du -= 1;
                    queue.insert((*du, u));
                }
            }
        }
        deg[v as usize] = 0;
    }
    Degeneracy { kappa, order, degree_at_deletion: at_deletion }
}
