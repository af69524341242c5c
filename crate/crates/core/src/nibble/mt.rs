//! Bad events of a round and the Moser-Tardos loop that avoids them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{NibbleState, Proposal};
use crate::error::{Error, Result};
use crate::hypergraph::{Color, EdgeId, VertexId};
use crate::rng::Rng;
use crate::schedule::Record;

/// Ordered by (kind, vertex or edge, color, r); the loop always resamples
/// the smallest violated event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BadEvent {
    /// Fewer than L_{i+1} colors survive at v.
    ListDepletion { v: VertexId },
    /// t_{i+1,r}(v, c) exceeds T_{i+1,r}.
    ConflictExcess { v: VertexId, c: Color, r: u8 },
    /// Final phase: every vertex of the edge ends up with color c.
    Monochromatic { edge: EdgeId, c: Color },
}

impl BadEvent {
    pub fn center(&self) -> Option<VertexId> {
        match *self {
            BadEvent::ListDepletion { v } | BadEvent::ConflictExcess { v, .. } => Some(v),
            BadEvent::Monochromatic { .. } => None,
        }
    }
}

/// Integer thresholds for the next round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Targets {
    pub l_next: usize,
    /// Indexed by r − 1.
    pub t_next: Vec<u64>,
}

impl Targets {
    /// ⌊L⌋ and ⌈T_r⌉ of a schedule record.
    pub fn from_record(rec: &Record) -> Self {
        Targets {
            l_next: rec.l.floor().max(0.0) as usize,
            t_next: rec.t.iter().map(|t| t.ceil().max(0.0) as u64).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MtLimits {
    /// Maximum number of resampling steps; `None` runs until no event holds.
    pub budget: Option<u64>,
    /// Radius of the resampled ball for conflict-excess events.
    pub b_radius: usize,
    /// Fail when a surviving uncolored vertex is left with an empty list.
    pub collapse_on_empty: bool,
    /// Return the accepted proposal in the outcome.
    pub keep_proposal: bool,
}

impl Default for MtLimits {
    fn default() -> Self {
        MtLimits { budget: Some(100_000), b_radius: 2, collapse_on_empty: false, keep_proposal: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationOutcome {
    pub iteration: usize,
    pub uncolored_before: usize,
    pub uncolored_after: usize,
    pub l_target: usize,
    pub resamples: u64,
    /// No bad event held at acceptance.
    pub certified: bool,
    pub violated_list: usize,
    pub violated_conflict: usize,
    pub dummy_edges: usize,
    /// Smallest and largest list over the new uncolored set.
    pub list_range: Option<(usize, usize)>,
    #[serde(skip)]
    pub proposal: Option<Proposal>,
}

/// Would-be next state: surviving lists and retention for every uncolored vertex.
struct Next {
    avail: Vec<Vec<Color>>,
    retained: Vec<bool>,
}

/// Visit marks for repeated ball searches.
pub(super) struct Marks {
    stamp: Vec<u32>,
    cur: u32,
}

impl Marks {
    pub(super) fn new(n: usize) -> Self {
        Marks { stamp: vec![0; n], cur: 0 }
    }

    fn next(&mut self) -> u32 {
        self.cur += 1;
        if self.cur == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.cur = 1;
        }
        self.cur
    }
}

impl NibbleState<'_> {
    fn next_for(&self, prop: &Proposal, v: VertexId) -> (Vec<Color>, bool) {
        let avail = self.available_list(prop, v);
        let retained = prop.active[v as usize]
            && !self.lists[v as usize].is_empty()
            && avail.binary_search(&prop.color[v as usize]).is_ok();
        (avail, retained)
    }

    fn compute_next(&self, prop: &Proposal) -> Next {
        let n = self.base.n();
        let mut next = Next { avail: vec![Vec::new(); n], retained: vec![false; n] };
        for v in 0..n as VertexId {
            if self.is_uncolored(v) {
                let (a, r) = self.next_for(prop, v);
                next.avail[v as usize] = a;
                next.retained[v as usize] = r;
            }
        }
        next
    }

    fn next_color(&self, next: &Next, prop: &Proposal, u: VertexId) -> Option<Color> {
        self.phi[u as usize].or_else(|| next.retained[u as usize].then(|| prop.color[u as usize]))
    }

    /// t_{i+1,r}(v, c) for c in the surviving list of v, indexed `pos * (k-1) + r - 1`.
    fn next_conflicts(&self, next: &Next, prop: &Proposal, v: VertexId) -> Vec<u64> {
        let k = self.base.k();
        let list = &next.avail[v as usize];
        let mut out = vec![0u64; list.len() * (k - 1)];
        let mut unc: Vec<VertexId> = Vec::with_capacity(k);
        'edges: for &e in self.base.incident(v) {
            unc.clear();
            let mut col = None;
            for &u in self.base.edge(e) {
                if u == v {
                    continue;
                }
                match self.next_color(next, prop, u) {
                    None => unc.push(u),
                    Some(x) => match col {
                        None => col = Some(x),
                        Some(y) if y != x => continue 'edges,
                        _ => {}
                    },
                }
            }
            let r = unc.len();
            if r == 0 {
                continue;
            }
            let fits = |c: Color| unc.iter().all(|&u| next.avail[u as usize].binary_search(&c).is_ok());
            match col {
                Some(c) => {
                    if let Ok(pos) = list.binary_search(&c) {
                        if fits(c) {
                            out[pos * (k - 1) + r - 1] += 1;
                        }
                    }
                }
                None => {
                    for (pos, &c) in list.iter().enumerate() {
                        if fits(c) {
                            out[pos * (k - 1) + r - 1] += 1;
                        }
                    }
                }
            }
        }
        out
    }

    fn events_at(&self, next: &Next, prop: &Proposal, v: VertexId, targets: &Targets, out: &mut Vec<BadEvent>) {
        if !self.is_uncolored(v) || next.retained[v as usize] {
            return;
        }
        if next.avail[v as usize].len() < targets.l_next {
            out.push(BadEvent::ListDepletion { v });
        }
        let k = self.base.k();
        let counts = self.next_conflicts(next, prop, v);
        for (idx, &t) in counts.iter().enumerate() {
            let r = idx % (k - 1) + 1;
            if t > targets.t_next[r - 1] {
                let c = next.avail[v as usize][idx / (k - 1)];
                out.push(BadEvent::ConflictExcess { v, c, r: r as u8 });
            }
        }
    }

    /// Every violated event under `prop`, sorted.
    pub fn evaluate_bad_events(&self, prop: &Proposal, targets: &Targets) -> Vec<BadEvent> {
        let next = self.compute_next(prop);
        let mut out = Vec::new();
        for v in 0..self.base.n() as VertexId {
            self.events_at(&next, prop, v, targets, &mut out);
        }
        out.sort_unstable();
        out
    }

    /// Closed ball of the given radius around `centers`, sorted.
    pub(super) fn ball(&self, centers: &[VertexId], radius: usize, marks: &mut Marks) -> Vec<VertexId> {
        let s = marks.next();
        let mut out: Vec<VertexId> = Vec::new();
        for &c in centers {
            if marks.stamp[c as usize] != s {
                marks.stamp[c as usize] = s;
                out.push(c);
            }
        }
        let mut frontier = 0;
        for _ in 0..radius {
            let end = out.len();
            for idx in frontier..end {
                let v = out[idx];
                for &e in self.base.incident(v) {
                    for &u in self.base.edge(e) {
                        if marks.stamp[u as usize] != s {
                            marks.stamp[u as usize] = s;
                            out.push(u);
                        }
                    }
                }
            }
            frontier = end;
        }
        out.sort_unstable();
        out
    }

    pub(super) fn owned_dummies(&self, owners: &[VertexId]) -> Vec<usize> {
        let mut out = Vec::new();
        for &v in owners {
            for j in self.dummies.owned_by(v) {
                out.extend(self.dummies.edge_vertices(j));
            }
        }
        out
    }

    fn scope_with(&self, ev: &BadEvent, b_radius: usize, marks: &mut Marks) -> (Vec<VertexId>, Vec<usize>) {
        let (real, owners) = match *ev {
            BadEvent::ListDepletion { v } => (self.ball(&[v], 1, marks), vec![v]),
            BadEvent::ConflictExcess { v, .. } => {
                let inner = self.ball(&[v], b_radius.saturating_sub(1), marks);
                (self.ball(&[v], b_radius, marks), inner)
            }
            BadEvent::Monochromatic { edge, .. } => (self.base.edge(edge).to_vec(), Vec::new()),
        };
        let real: Vec<VertexId> = real.into_iter().filter(|&u| self.is_uncolored(u)).collect();
        (real, self.owned_dummies(&owners))
    }

    /// Variables resampled for `ev`: uncolored real vertices and dummy vertices.
    pub fn event_scope(&self, ev: &BadEvent, b_radius: usize) -> (Vec<VertexId>, Vec<usize>) {
        self.scope_with(ev, b_radius, &mut Marks::new(self.base.n()))
    }

    /// Runs the round: draw a proposal, resample violated events until none
    /// holds (or the budget runs out, keeping the best proposal seen), then
    /// commit retained colors and surviving lists and drop the dummies.
    pub fn moser_tardos_iterate(&mut self, alpha: f64, targets: &Targets, limits: &MtLimits) -> Result<IterationOutcome> {
        let k = self.base.k();
        if targets.t_next.len() != k - 1 {
            return Err(Error::InvalidParam(format!("T target needs {} entries", k - 1)));
        }
        let n = self.base.n();
        let uncolored_before = self.uncolored_count();
        let l_target = self.list_range().map_or(0, |(lo, _)| lo);
        let mut rng: Rng = self.rng.clone();
        let mut prop = self.sample_with(alpha, &mut rng);
        let mut next = self.compute_next(&prop);
        let mut by_center: Vec<Vec<BadEvent>> = vec![Vec::new(); n];
        let mut violated: BTreeSet<BadEvent> = BTreeSet::new();
        for v in 0..n as VertexId {
            self.events_at(&next, &prop, v, targets, &mut by_center[v as usize]);
            violated.extend(by_center[v as usize].iter().copied());
        }
        let mut best = (violated.len(), prop.clone());
        let mut marks = Marks::new(n);
        let mut resamples = 0u64;
        let mut scratch = Vec::new();
        while let Some(&ev) = violated.first() {
            if limits.budget.is_some_and(|b| resamples >= b) {
                break;
            }
            let (real, dummies) = self.scope_with(&ev, limits.b_radius, &mut marks);
            self.resample_with(&mut prop, alpha, &real, &dummies, &mut rng);
            resamples += 1;
            let mut touched = real.clone();
            touched.extend(dummies.iter().map(|&d| self.dummy_owner_of(d)));
            let a1 = self.ball(&touched, 1, &mut marks);
            for &w in &a1 {
                if self.is_uncolored(w) {
                    let (a, r) = self.next_for(&prop, w);
                    next.avail[w as usize] = a;
                    next.retained[w as usize] = r;
                }
            }
            for w in self.ball(&a1, 1, &mut marks) {
                for e in by_center[w as usize].drain(..) {
                    violated.remove(&e);
                }
                scratch.clear();
                self.events_at(&next, &prop, w, targets, &mut scratch);
                violated.extend(scratch.iter().copied());
                by_center[w as usize].extend(scratch.iter().copied());
            }
            if violated.len() < best.0 {
                best = (violated.len(), prop.clone());
            }
        }
        let certified = violated.is_empty();
        if !certified {
            prop = best.1;
            next = self.compute_next(&prop);
        }
        let mut census = Vec::new();
        if !certified {
            for v in 0..n as VertexId {
                self.events_at(&next, &prop, v, targets, &mut census);
            }
        }
        let violated_list = census.iter().filter(|e| matches!(e, BadEvent::ListDepletion { .. })).count();
        let dummy_edges = self.dummies.edge_count();
        self.rng = rng;

        // Commit.
        for v in 0..n {
            if self.phi[v].is_some() {
                continue;
            }
            if next.retained[v] {
                self.phi[v] = Some(prop.color[v]);
                self.lists[v].clear();
            } else {
                if limits.collapse_on_empty && next.avail[v].is_empty() {
                    return Err(Error::Collapse(self.iteration + 1));
                }
                self.lists[v] = std::mem::take(&mut next.avail[v]);
            }
        }
        self.strip_dummies();
        self.iteration += 1;
        assert!(self.phi_is_proper(), "committed coloring has a monochromatic edge");
        Ok(IterationOutcome {
            iteration: self.iteration - 1,
            uncolored_before,
            uncolored_after: self.uncolored_count(),
            l_target,
            resamples,
            certified,
            violated_list,
            violated_conflict: census.len() - violated_list,
            dummy_edges,
            list_range: self.list_range(),
            proposal: limits.keep_proposal.then_some(prop),
        })
    }

    fn dummy_owner_of(&self, d: usize) -> VertexId {
        let j = self.dummies.vstart.partition_point(|&s| s as usize <= d) - 1;
        self.dummies.owner[j]
    }

    /// No edge is fully colored with a single color.
    pub fn phi_is_proper(&self) -> bool {
        self.base.edges().all(|e| {
            let c0 = self.phi[e[0] as usize];
            c0.is_none() || e.iter().any(|&u| self.phi[u as usize] != c0)
        })
    }

    /// Empirical targets: over `pilots` unresampled proposals, the survivor
    /// count and conflict counts seen by the would-be uncolored vertices,
    /// taken `slack * pilots` ranks away from the extreme (so roughly `slack`
    /// violations per kind are expected per proposal). `None` when no
    /// vertex stays uncolored in any pilot.
    pub fn pilot_targets(&mut self, alpha: f64, pilots: usize, slack: f64) -> Option<Targets> {
        let k = self.base.k();
        let mut rng = self.rng.clone();
        let mut survivors: Vec<usize> = Vec::new();
        let mut hist: Vec<Vec<u64>> = vec![Vec::new(); k - 1];
        for _ in 0..pilots.max(1) {
            let prop = self.sample_with(alpha, &mut rng);
            let next = self.compute_next(&prop);
            for v in 0..self.base.n() as VertexId {
                if !self.is_uncolored(v) || next.retained[v as usize] {
                    continue;
                }
                survivors.push(next.avail[v as usize].len());
                for (idx, &t) in self.next_conflicts(&next, &prop, v).iter().enumerate() {
                    let h = &mut hist[idx % (k - 1)];
                    if h.len() <= t as usize {
                        h.resize(t as usize + 1, 0);
                    }
                    h[t as usize] += 1;
                }
            }
        }
        self.rng = rng;
        if survivors.is_empty() {
            return None;
        }
        let rank = (slack * pilots.max(1) as f64).floor().max(0.0) as u64;
        survivors.sort_unstable();
        let l_next = survivors[(rank as usize).min(survivors.len() - 1)];
        let t_next = hist
            .iter()
            .map(|h| {
                let mut seen = 0u64;
                for t in (0..h.len()).rev() {
                    seen += h[t];
                    if seen > rank {
                        return t as u64;
                    }
                }
                0
            })
            .collect();
        Some(Targets { l_next, t_next })
    }

    /// Actual extremes of the current state: smallest list and largest t_r.
    pub fn current_extremes(&self) -> Option<Targets> {
        let (lo, _) = self.list_range()?;
        let k = self.base.k();
        let mut t_next = vec![0u64; k - 1];
        for v in self.uncolored() {
            for (idx, &t) in self.real_conflicts(v).iter().enumerate() {
                let r = idx % (k - 1);
                t_next[r] = t_next[r].max(t);
            }
        }
        Some(Targets { l_next: lo, t_next })
    }
}
