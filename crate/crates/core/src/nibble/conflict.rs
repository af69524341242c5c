use serde::{Deserialize, Serialize};

use super::NibbleState;
use crate::hypergraph::{Color, EdgeId, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeRef {
    Real(EdgeId),
    Dummy(u32),
}

/// The sets D_r(v, c) of the current state, for every uncolored real v and
/// c in its list, plus the reverse map from edges to the (v, c, r) entries
/// they contribute to.
#[derive(Clone, Debug)]
pub struct ConflictIndex {
    k: usize,
    /// Slots of vertex v (one per list color) are `slot_start[v]..slot_start[v+1]`.
    slot_start: Vec<usize>,
    slot_color: Vec<Color>,
    members: Vec<Vec<(EdgeRef, u8)>>,
    reverse: Vec<(EdgeRef, VertexId, Color, u8)>,
}

impl ConflictIndex {
    pub fn build(state: &NibbleState<'_>) -> Self {
        let h = state.base();
        let k = h.k();
        let n = h.n();
        let mut slot_start = Vec::with_capacity(n + 1);
        let mut slot_color = Vec::new();
        slot_start.push(0);
        for v in 0..n as VertexId {
            if state.is_uncolored(v) {
                slot_color.extend_from_slice(state.list(v));
            }
            slot_start.push(slot_color.len());
        }
        let mut members: Vec<Vec<(EdgeRef, u8)>> = vec![Vec::new(); slot_color.len()];
        for v in 0..n as VertexId {
            if !state.is_uncolored(v) {
                continue;
            }
            let base = slot_start[v as usize];
            let list = state.list(v);
            for &e in h.incident(v) {
                let Some((col, unc)) = state.edge_shape(e, v) else { continue };
                let r = unc.len();
                if r == 0 {
                    continue;
                }
                let fits = |c: Color| unc.iter().all(|&u| state.list(u).binary_search(&c).is_ok());
                match col {
                    Some(c) => {
                        if let Ok(pos) = list.binary_search(&c) {
                            if fits(c) {
                                members[base + pos].push((EdgeRef::Real(e), r as u8));
                            }
                        }
                    }
                    None => {
                        for (pos, &c) in list.iter().enumerate() {
                            if fits(c) {
                                members[base + pos].push((EdgeRef::Real(e), r as u8));
                            }
                        }
                    }
                }
            }
            let d = state.dummies();
            for j in d.owned_by(v) {
                if let Ok(pos) = list.binary_search(&d.edge_color(j)) {
                    members[base + pos].push((EdgeRef::Dummy(j as u32), d.edge_r(j) as u8));
                }
            }
        }
        let mut reverse = Vec::new();
        for v in 0..n {
            for s in slot_start[v]..slot_start[v + 1] {
                for &(e, r) in &members[s] {
                    reverse.push((e, v as VertexId, slot_color[s], r));
                }
            }
        }
        reverse.sort_unstable();
        ConflictIndex { k, slot_start, slot_color, members, reverse }
    }

    fn slot(&self, v: VertexId, c: Color) -> Option<usize> {
        let (a, b) = (self.slot_start[v as usize], self.slot_start[v as usize + 1]);
        self.slot_color[a..b].binary_search(&c).ok().map(|p| a + p)
    }

    /// D_r(v, c), sorted. Empty when v is colored or c is not in its list.
    pub fn d(&self, v: VertexId, c: Color, r: usize) -> Vec<EdgeRef> {
        let Some(s) = self.slot(v, c) else { return Vec::new() };
        let mut out: Vec<EdgeRef> =
            self.members[s].iter().filter(|&&(_, rr)| rr as usize == r).map(|&(e, _)| e).collect();
        out.sort_unstable();
        out
    }

    /// t_r(v, c) = |D_r(v, c)|.
    pub fn t(&self, v: VertexId, c: Color, r: usize) -> u64 {
        self.slot(v, c).map_or(0, |s| {
            self.members[s].iter().filter(|&&(_, rr)| rr as usize == r).count() as u64
        })
    }

    /// Largest t_r over all (v, c).
    pub fn max_t(&self, r: usize) -> u64 {
        self.members
            .iter()
            .map(|m| m.iter().filter(|&&(_, rr)| rr as usize == r).count() as u64)
            .max()
            .unwrap_or(0)
    }

    /// Entries (v, c, r) that edge `e` contributes to.
    pub fn entries_of(&self, e: EdgeRef) -> Vec<(VertexId, Color, usize)> {
        let lo = self.reverse.partition_point(|x| x.0 < e);
        self.reverse[lo..]
            .iter()
            .take_while(|x| x.0 == e)
            .map(|&(_, v, c, r)| (v, c, r as usize))
            .collect()
    }

    /// Every (v, c, r) over the uncolored vertices with the current lists.
    pub fn for_each_count(&self, mut f: impl FnMut(VertexId, Color, usize, u64)) {
        for v in 0..self.slot_start.len() - 1 {
            for s in self.slot_start[v]..self.slot_start[v + 1] {
                let mut counts = vec![0u64; self.k];
                for &(_, r) in &self.members[s] {
                    counts[r as usize] += 1;
                }
                for (r, &c) in counts.iter().enumerate().skip(1) {
                    f(v as VertexId, self.slot_color[s], r, c);
                }
            }
        }
    }
}
