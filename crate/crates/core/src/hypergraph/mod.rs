//! Immutable k-uniform hypergraphs and the checks run against them.

mod cycles;
mod degeneracy;
pub mod io;
mod verify;

pub use cycles::{short_cycle_vertices, short_cycles, short_cycles_with, CycleReport};
pub use degeneracy::{degeneracy, Degeneracy};
pub use verify::{verify, VerifyReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type EdgeId = u32;
pub type Color = u32;

/// Edges are stored flat (`m * k` ids), each strictly increasing, and the
/// edge list is strictly increasing in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    k: usize,
    n: usize,
    verts: Vec<VertexId>,
    inc_start: Vec<usize>,
    inc: Vec<EdgeId>,
}

impl Hypergraph {
    /// Canonicalizes `raw_edges` (sort each tuple, sort and dedup the list).
    pub fn build<E: AsRef<[u64]>>(k: usize, n: usize, raw_edges: &[E]) -> Result<Self> {
        Self::build_counted(k, n, raw_edges).map(|(h, _)| h)
    }

    /// Like [`Hypergraph::build`], also returning how many duplicates were dropped.
    pub fn build_counted<E: AsRef<[u64]>>(
        k: usize,
        n: usize,
        raw_edges: &[E],
    ) -> Result<(Self, usize)> {
        if k < 2 {
            return Err(Error::InvalidParam(format!("uniformity k = {k} must be at least 2")));
        }
        if n > VertexId::MAX as usize {
            return Err(Error::InvalidParam(format!("n = {n} too large")));
        }
        let mut tuples: Vec<Vec<VertexId>> = Vec::with_capacity(raw_edges.len());
        for (i, raw) in raw_edges.iter().enumerate() {
            let raw = raw.as_ref();
            if raw.len() != k {
                return Err(Error::Arity { edge: i, got: raw.len(), expected: k });
            }
            let mut t = Vec::with_capacity(k);
            for &v in raw {
                if v >= n as u64 {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                t.push(v as VertexId);
            }
            t.sort_unstable();
            if let Some(w) = t.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::RepeatedVertex { edge: i, vertex: w[0] });
            }
            tuples.push(t);
        }
        tuples.sort_unstable();
        let before = tuples.len();
        tuples.dedup();
        let dups = before - tuples.len();
        let verts: Vec<VertexId> = tuples.into_iter().flatten().collect();
        Ok((Self::from_canonical(k, n, verts), dups))
    }

    /// `verts` must already be canonical.
    pub(crate) fn from_canonical(k: usize, n: usize, verts: Vec<VertexId>) -> Self {
        debug_assert_eq!(verts.len() % k, 0);
        let m = verts.len() / k;
        let mut deg = vec![0usize; n + 1];
        for &v in &verts {
            deg[v as usize + 1] += 1;
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let inc_start = deg;
        let mut fill = inc_start.clone();
        let mut inc = vec![0 as EdgeId; verts.len()];
        for e in 0..m {
            for &v in &verts[e * k..(e + 1) * k] {
                inc[fill[v as usize]] = e as EdgeId;
                fill[v as usize] += 1;
            }
        }
        Hypergraph { k, n, verts, inc_start, inc }
    }

    pub fn empty(k: usize, n: usize) -> Self {
        Self::from_canonical(k, n, Vec::new())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.verts.len() / self.k
    }

    pub fn edge(&self, e: EdgeId) -> &[VertexId] {
        let e = e as usize;
        &self.verts[e * self.k..(e + 1) * self.k]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[VertexId]> + '_ {
        self.verts.chunks_exact(self.k)
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        let v = v as usize;
        &self.inc[self.inc_start[v]..self.inc_start[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.inc_start[v + 1] - self.inc_start[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n as VertexId).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n as VertexId).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// d = k·m/n.
    pub fn avg_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.k * self.m()) as f64 / self.n as f64
        }
    }

    /// Edge id of the given sorted tuple, if present.
    pub fn find_edge(&self, tuple: &[VertexId]) -> Option<EdgeId> {
        let m = self.m();
        let (mut lo, mut hi) = (0usize, m);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.edge(mid as EdgeId).cmp(tuple) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid as EdgeId),
            }
        }
        None
    }

    /// Distinct vertices sharing an edge with `v`, sorted.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .incident(v)
            .iter()
            .flat_map(|&e| self.edge(e).iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Sub-hypergraph induced on the vertices with `keep[v]`, relabelled
    /// densely in increasing order. Returns the new graph and the map from
    /// new ids to old ids.
    pub fn induced(&self, keep: &[bool]) -> (Hypergraph, Vec<VertexId>) {
        assert_eq!(keep.len(), self.n);
        let mut new_id = vec![VertexId::MAX; self.n];
        let mut old_of = Vec::new();
        for v in 0..self.n {
            if keep[v] {
                new_id[v] = old_of.len() as VertexId;
                old_of.push(v as VertexId);
            }
        }
        let mut verts = Vec::new();
        for e in self.edges() {
            if e.iter().all(|&v| keep[v as usize]) {
                verts.extend(e.iter().map(|&v| new_id[v as usize]));
            }
        }
        // Relabelling is monotone, so the canonical order survives.
        (Self::from_canonical(self.k, old_of.len(), verts), old_of)
    }

    /// Raw edge tuples, for rebuilding or serializing.
    pub fn raw_edges(&self) -> Vec<Vec<u64>> {
        self.edges().map(|e| e.iter().map(|&v| v as u64).collect()).collect()
    }
}

/// Number of common elements of two sorted slices.
pub(crate) fn common(a: &[VertexId], b: &[VertexId]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListAssignment {
    pub lists: Vec<Vec<Color>>,
}

impl ListAssignment {
    /// Every vertex gets `[0, q)`.
    pub fn uniform(n: usize, q: usize) -> Self {
        let list: Vec<Color> = (0..q as Color).collect();
        ListAssignment { lists: vec![list; n] }
    }

    pub fn contains(&self, v: VertexId, c: Color) -> bool {
        self.lists
            .get(v as usize)
            .is_some_and(|l| l.binary_search(&c).is_ok())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub assignment: Vec<Option<Color>>,
}

impl Coloring {
    pub fn uncolored(n: usize) -> Self {
        Coloring { assignment: vec![None; n] }
    }

    pub fn get(&self, v: VertexId) -> Option<Color> {
        self.assignment.get(v as usize).copied().flatten()
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    pub fn colors_used(&self) -> usize {
        let mut cs: Vec<Color> = self.assignment.iter().flatten().copied().collect();
        cs.sort_unstable();
        cs.dedup();
        cs.len()
    }
}
