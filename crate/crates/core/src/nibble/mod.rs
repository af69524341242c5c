//! One round of the semi-random coloring: equalize, propose, resample bad
//! events, and commit the surviving colors.

mod conflict;
mod gadget;
mod mt;

pub use conflict::{ConflictIndex, EdgeRef};
pub use gadget::{estimate_keep, KeepEstimate, KeepGadget};
pub use mt::{BadEvent, IterationOutcome, MtLimits, Targets};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Color, EdgeId, Hypergraph, VertexId};
use crate::rng::{seeded, Rng};

/// Colors at or above this value are reserved for dummy vertices.
pub const DUMMY_COLOR_BASE: Color = 1 << 31;

/// Padding edges added by [`NibbleState::equalize`] and removed when the
/// round ends. Each dummy edge is owned by one real vertex and one color;
/// its dummy vertices are numbered contiguously.
#[derive(Clone, Debug, Default)]
pub struct Dummies {
    /// List length of every dummy vertex.
    list_len: usize,
    owner: Vec<VertexId>,
    color: Vec<Color>,
    /// Dummy vertex range of edge `j` is `vstart[j]..vstart[j + 1]`.
    vstart: Vec<u32>,
    /// Dummy edges of real vertex `v` are `by_owner[v]..by_owner[v + 1]`.
    by_owner: Vec<u32>,
}

impl Dummies {
    pub fn edge_count(&self) -> usize {
        self.owner.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vstart.last().copied().unwrap_or(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn list_len(&self) -> usize {
        self.list_len
    }

    pub fn owned_by(&self, v: VertexId) -> std::ops::Range<usize> {
        if self.by_owner.is_empty() {
            return 0..0;
        }
        self.by_owner[v as usize] as usize..self.by_owner[v as usize + 1] as usize
    }

    pub fn edge_color(&self, j: usize) -> Color {
        self.color[j]
    }

    pub fn edge_owner(&self, j: usize) -> VertexId {
        self.owner[j]
    }

    pub fn edge_vertices(&self, j: usize) -> std::ops::Range<usize> {
        self.vstart[j] as usize..self.vstart[j + 1] as usize
    }

    /// Number of dummy vertices of edge `j`, i.e. its r.
    pub fn edge_r(&self, j: usize) -> usize {
        (self.vstart[j + 1] - self.vstart[j]) as usize
    }

    /// The color a dummy vertex shows for list index `idx`: index 0 is the
    /// owner color, the rest are fresh.
    pub fn dummy_color(&self, j: usize, dummy: usize, idx: u32) -> Color {
        if idx == 0 {
            self.color[j]
        } else {
            DUMMY_COLOR_BASE + (dummy * (self.list_len - 1)) as Color + idx - 1
        }
    }
}

/// Random choices of one proposal. Entries of colored real vertices are unused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proposal {
    pub color: Vec<Color>,
    pub active: Vec<bool>,
    /// List index chosen by each dummy vertex (0 means the owner color).
    pub dummy_idx: Vec<u32>,
    pub dummy_active: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualizeReport {
    pub trimmed_colors: usize,
    pub dummy_edges: usize,
    pub dummy_vertices: usize,
}

/// Mutable coloring state of the nibble over a fixed base hypergraph.
#[derive(Clone, Debug)]
pub struct NibbleState<'a> {
    base: &'a Hypergraph,
    iteration: usize,
    /// Lists of uncolored vertices; emptied when a vertex is colored.
    lists: Vec<Vec<Color>>,
    phi: Vec<Option<Color>>,
    dummies: Dummies,
    pub(crate) rng: Rng,
}

impl<'a> NibbleState<'a> {
    /// All vertices uncolored with the given lists (sorted and deduplicated here).
    pub fn new(base: &'a Hypergraph, lists: Vec<Vec<Color>>, seed: u64) -> Result<Self> {
        Self::with_partial(base, lists, vec![None; base.n()], seed)
    }

    /// Starts from a partial coloring `phi`; lists of colored vertices are ignored.
    pub fn with_partial(
        base: &'a Hypergraph,
        mut lists: Vec<Vec<Color>>,
        phi: Vec<Option<Color>>,
        seed: u64,
    ) -> Result<Self> {
        if lists.len() != base.n() || phi.len() != base.n() {
            return Err(Error::InvalidParam("lists and coloring must cover every vertex".into()));
        }
        for (v, l) in lists.iter_mut().enumerate() {
            if phi[v].is_some() {
                l.clear();
                continue;
            }
            l.sort_unstable();
            l.dedup();
            if l.last().is_some_and(|&c| c >= DUMMY_COLOR_BASE) {
                return Err(Error::InvalidParam(format!("vertex {v} uses a reserved color id")));
            }
        }
        Ok(NibbleState { base, iteration: 1, lists, phi, dummies: Dummies::default(), rng: seeded(seed) })
    }

    pub fn base(&self) -> &'a Hypergraph {
        self.base
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn list(&self, v: VertexId) -> &[Color] {
        &self.lists[v as usize]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn phi(&self) -> &[Option<Color>] {
        &self.phi
    }

    pub fn is_uncolored(&self, v: VertexId) -> bool {
        self.phi[v as usize].is_none()
    }

    /// V_i, sorted.
    pub fn uncolored(&self) -> Vec<VertexId> {
        (0..self.base.n() as VertexId).filter(|&v| self.is_uncolored(v)).collect()
    }

    pub fn uncolored_count(&self) -> usize {
        self.phi.iter().filter(|c| c.is_none()).count()
    }

    pub fn dummies(&self) -> &Dummies {
        &self.dummies
    }

    /// Smallest and largest list size over V_i.
    pub fn list_range(&self) -> Option<(usize, usize)> {
        let mut it = self.uncolored().into_iter().map(|v| self.lists[v as usize].len());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
    }

    /// The color blocked for `v` by edge `e` under `prop`: every other vertex
    /// is either colored or activated, and all of them show the same color.
    fn edge_block(&self, prop: &Proposal, e: EdgeId, v: VertexId) -> Option<Color> {
        let mut col = None;
        for &u in self.base.edge(e) {
            if u == v {
                continue;
            }
            let cu = match self.phi[u as usize] {
                Some(x) => x,
                None if prop.active[u as usize] => prop.color[u as usize],
                None => return None,
            };
            match col {
                None => col = Some(cu),
                Some(x) if x != cu => return None,
                _ => {}
            }
        }
        col
    }

    fn dummy_blocks(&self, prop: &Proposal, j: usize) -> bool {
        self.dummies
            .edge_vertices(j)
            .all(|d| prop.dummy_active[d] && prop.dummy_idx[d] == 0)
    }

    /// Whether `c` stays available for the uncolored vertex `v` under `prop`.
    /// The activation bit of `v` itself plays no role.
    pub fn available(&self, prop: &Proposal, v: VertexId, c: Color) -> bool {
        if self.base.incident(v).iter().any(|&e| self.edge_block(prop, e, v) == Some(c)) {
            return false;
        }
        !self
            .dummies
            .owned_by(v)
            .any(|j| self.dummies.color[j] == c && self.dummy_blocks(prop, j))
    }

    /// L_v minus the colors blocked under `prop`.
    pub fn available_list(&self, prop: &Proposal, v: VertexId) -> Vec<Color> {
        let mut blocked: Vec<Color> = self
            .base
            .incident(v)
            .iter()
            .filter_map(|&e| self.edge_block(prop, e, v))
            .collect();
        blocked.extend(
            self.dummies
                .owned_by(v)
                .filter(|&j| self.dummy_blocks(prop, j))
                .map(|j| self.dummies.color[j]),
        );
        blocked.sort_unstable();
        blocked.dedup();
        self.lists[v as usize]
            .iter()
            .copied()
            .filter(|c| blocked.binary_search(c).is_err())
            .collect()
    }

    fn draw_real(&self, v: usize, alpha: f64, rng: &mut Rng, prop: &mut Proposal) {
        let l = &self.lists[v];
        prop.color[v] = l[rng.random_range(0..l.len())];
        prop.active[v] = rng.random_bool(alpha);
    }

    fn draw_dummy(&self, d: usize, alpha: f64, rng: &mut Rng, prop: &mut Proposal) {
        prop.dummy_idx[d] = rng.random_range(0..self.dummies.list_len as u32);
        prop.dummy_active[d] = rng.random_bool(alpha);
    }

    /// Independent uniform color and Bernoulli(α) activation for every
    /// uncolored vertex, real ones in id order and then dummies.
    pub fn sample_with(&self, alpha: f64, rng: &mut Rng) -> Proposal {
        let n = self.base.n();
        let nd = self.dummies.vertex_count();
        let mut prop = Proposal {
            color: vec![0; n],
            active: vec![false; n],
            dummy_idx: vec![0; nd],
            dummy_active: vec![false; nd],
        };
        for v in 0..n {
            if self.phi[v].is_none() && !self.lists[v].is_empty() {
                self.draw_real(v, alpha, rng, &mut prop);
            }
        }
        for d in 0..nd {
            self.draw_dummy(d, alpha, rng, &mut prop);
        }
        prop
    }

    /// Draws a proposal from the state's own generator.
    pub fn sample(&mut self, alpha: f64) -> Proposal {
        let mut rng = self.rng.clone();
        let p = self.sample_with(alpha, &mut rng);
        self.rng = rng;
        p
    }

    /// Redraws the variables of the given real vertices and dummy vertices.
    pub fn resample_with(
        &self,
        prop: &mut Proposal,
        alpha: f64,
        real: &[VertexId],
        dummy: &[usize],
        rng: &mut Rng,
    ) {
        for &v in real {
            let v = v as usize;
            if self.phi[v].is_none() && !self.lists[v].is_empty() {
                self.draw_real(v, alpha, rng, prop);
            }
        }
        for &d in dummy {
            self.draw_dummy(d, alpha, rng, prop);
        }
    }

    /// Conflict counts t_r(v, c) over real edges only, indexed by the
    /// position of c in L_v; `out[pos * (k-1) + r - 1]`.
    pub(crate) fn real_conflicts(&self, v: VertexId) -> Vec<u64> {
        let k = self.base.k();
        let list = &self.lists[v as usize];
        let mut out = vec![0u64; list.len() * (k - 1)];
        for &e in self.base.incident(v) {
            let Some((col, unc)) = self.edge_shape(e, v) else { continue };
            let r = unc.len();
            if r == 0 {
                continue;
            }
            let mut tally = |pos: usize, c: Color| {
                if unc.iter().all(|&u| self.lists[u as usize].binary_search(&c).is_ok()) {
                    out[pos * (k - 1) + r - 1] += 1;
                }
            };
            match col {
                Some(c) => {
                    if let Ok(pos) = list.binary_search(&c) {
                        tally(pos, c);
                    }
                }
                None => {
                    for (pos, &c) in list.iter().enumerate() {
                        tally(pos, c);
                    }
                }
            }
        }
        out
    }

    /// Colored part of edge `e` seen from `v`: the common color of its
    /// colored vertices (None if there are none) and the other uncolored
    /// vertices. Returns None when the colored vertices disagree.
    fn edge_shape(&self, e: EdgeId, v: VertexId) -> Option<(Option<Color>, Vec<VertexId>)> {
        let mut col = None;
        let mut unc = Vec::new();
        for &u in self.base.edge(e) {
            if u == v {
                continue;
            }
            match self.phi[u as usize] {
                None => unc.push(u),
                Some(x) => match col {
                    None => col = Some(x),
                    Some(y) if y != x => return None,
                    _ => {}
                },
            }
        }
        Some((col, unc))
    }

    /// Trims every list of V_i to `l_target` colors (dropping the largest
    /// ids) and pads each t_r(v, c) up to `t_target[r-1]` with dummy edges.
    pub fn equalize(&mut self, l_target: usize, t_target: &[u64]) -> Result<EqualizeReport> {
        let k = self.base.k();
        if t_target.len() != k - 1 {
            return Err(Error::InvalidParam(format!("T target needs {} entries", k - 1)));
        }
        if !self.dummies.is_empty() {
            return Err(Error::InvalidParam("dummy registry must be empty before equalizing".into()));
        }
        if l_target == 0 {
            return Err(Error::InvalidParam("L target must be positive".into()));
        }
        let uncolored = self.uncolored();
        for &v in &uncolored {
            let len = self.lists[v as usize].len();
            if len < l_target {
                return Err(Error::ListTooShort { vertex: v, len, target: l_target });
            }
        }
        for &v in &uncolored {
            let t = self.real_conflicts(v);
            for (idx, &count) in t.iter().enumerate() {
                let r = idx % (k - 1) + 1;
                if count > t_target[r - 1] {
                    let color = self.lists[v as usize][idx / (k - 1)];
                    return Err(Error::ConflictTooHigh { vertex: v, color, r, count, target: t_target[r - 1] });
                }
            }
        }
        let mut trimmed = 0;
        for &v in &uncolored {
            let l = &mut self.lists[v as usize];
            trimmed += l.len() - l_target;
            l.truncate(l_target);
        }
        let n = self.base.n();
        let mut d = Dummies { list_len: l_target, vstart: vec![0], by_owner: vec![0; n + 1], ..Default::default() };
        for v in 0..n as VertexId {
            if self.is_uncolored(v) {
                let t = self.real_conflicts(v);
                for (pos, &c) in self.lists[v as usize].iter().enumerate() {
                    for r in 1..k {
                        let deficit = t_target[r - 1] - t[pos * (k - 1) + r - 1];
                        for _ in 0..deficit {
                            d.owner.push(v);
                            d.color.push(c);
                            let last = *d.vstart.last().expect("non-empty");
                            d.vstart.push(last + r as u32);
                        }
                    }
                }
            }
            d.by_owner[v as usize + 1] = d.owner.len() as u32;
        }
        if d.vertex_count() as u64 * (l_target as u64).saturating_sub(1) >= u64::from(u32::MAX - DUMMY_COLOR_BASE) {
            return Err(Error::Infeasible("too many dummy vertices for the reserved color range".into()));
        }
        let report = EqualizeReport { trimmed_colors: trimmed, dummy_edges: d.edge_count(), dummy_vertices: d.vertex_count() };
        self.dummies = if d.owner.is_empty() { Dummies::default() } else { d };
        Ok(report)
    }

    pub(crate) fn strip_dummies(&mut self) {
        self.dummies = Dummies::default();
    }

    /// Rebuilds the conflict index for the current state (dummy edges included).
    pub fn conflict_index(&self) -> ConflictIndex {
        ConflictIndex::build(self)
    }

    /// Colors of the partial coloring with V_i left empty.
    pub fn into_parts(self) -> (Vec<Option<Color>>, Vec<Vec<Color>>) {
        (self.phi, self.lists)
    }
}
