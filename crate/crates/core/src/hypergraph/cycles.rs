//! Short cycles, counted as minimal deficient edge sets.
//!
//! An i-set of edges is deficient when it spans at most i(k-1) vertices.
//! Minimal deficient sets of size at most four have a rigid shape:
//!
//! * 2: two edges sharing at least two vertices;
//! * 3: a linear triangle, pairwise intersections of size one at three
//!   distinct vertices;
//! * 4: a linear quadrilateral, consecutive edges meeting in one vertex and
//!   opposite edges disjoint.
//!
//! Each shape is enumerated from its smallest connecting vertex, so every
//! cycle is found exactly once and the per-vertex work runs in parallel.

use std::cell::RefCell;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::{common, EdgeId, Hypergraph, VertexId};
use crate::exec::Exec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub max_len: usize,
    /// `counts[i]` is the number of i-cycles; only indices 2..=4 are used.
    pub counts: [u64; 5],
    /// Up to the cap, the sorted edge ids of i-cycles.
    pub witnesses: [Vec<Vec<EdgeId>>; 5],
    /// Union of the vertices of every counted cycle, sorted.
    pub vertices_in_short_cycles: Vec<VertexId>,
}

impl CycleReport {
    pub fn count(&self, i: usize) -> u64 {
        self.counts.get(i).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Girth at least five, meaningful when `max_len >= 4`.
    pub fn girth_at_least_5(&self) -> bool {
        self.max_len >= 4 && self.total() == 0
    }

    /// Shortest witness, if any.
    pub fn first_witness(&self) -> Option<(usize, &[EdgeId])> {
        (2..=4).find_map(|i| self.witnesses[i].first().map(|w| (i, w.as_slice())))
    }
}

static CALLS: AtomicU64 = AtomicU64::new(0);

thread_local! {
    /// Per-thread marks for the vertex union; an entry equal to the task's
    /// epoch means the vertex was already recorded by that task.
    static STAMP: RefCell<Vec<u64>> = const { RefCell::new(Vec::new()) };
    /// Per-thread (epoch, lo, hi) ranges keyed by vertex.
    static RANGES: RefCell<Vec<(u64, u32, u32)>> = const { RefCell::new(Vec::new()) };
}

/// Counting sort of `items` by vertex key. Afterwards the range table maps
/// each key seen to (epoch, lo, hi), its run in the returned vector.
fn bucket<T: Copy>(n: usize, epoch: u64, items: &[T], key: impl Fn(&T) -> VertexId) -> (Vec<T>, Vec<VertexId>) {
    RANGES.with_borrow_mut(|ranges| {
        if ranges.len() < n {
            ranges.resize(n, (0, 0, 0));
        }
        let mut keys: Vec<VertexId> = Vec::new();
        for it in items {
            let k = key(it);
            let r = &mut ranges[k as usize];
            if r.0 != epoch {
                *r = (epoch, 0, 0);
                keys.push(k);
            }
            r.2 += 1;
        }
        let mut off = 0u32;
        for &k in &keys {
            let r = &mut ranges[k as usize];
            let len = r.2;
            *r = (epoch, off, off);
            off += len;
        }
        let mut sorted = items.to_vec();
        for it in items {
            let r = &mut ranges[key(it) as usize];
            sorted[r.2 as usize] = *it;
            r.2 += 1;
        }
        (sorted, keys)
    })
}

#[derive(Default)]
struct Partial {
    counts: [u64; 5],
    witnesses: [Vec<Vec<EdgeId>>; 5],
    verts: Vec<VertexId>,
    epoch: u64,
}

impl Partial {
    fn record(&mut self, h: &Hypergraph, len: usize, edges: &[EdgeId], cap: usize) {
        self.counts[len] += 1;
        if self.witnesses[len].len() < cap {
            let mut w = edges.to_vec();
            w.sort_unstable();
            self.witnesses[len].push(w);
        }
        STAMP.with_borrow_mut(|stamp| {
            if stamp.len() < h.n() {
                stamp.resize(h.n(), 0);
            }
            for &e in edges {
                for &v in h.edge(e) {
                    if stamp[v as usize] != self.epoch {
                        stamp[v as usize] = self.epoch;
                        self.verts.push(v);
                    }
                }
            }
        });
    }
}

fn contains(edge: &[VertexId], v: VertexId) -> bool {
    edge.binary_search(&v).is_ok()
}

pub fn short_cycles(h: &Hypergraph, max_len: usize, witness_cap: usize) -> CycleReport {
    short_cycles_with(h, max_len, witness_cap, Exec::default())
}

pub fn short_cycles_with(
    h: &Hypergraph,
    max_len: usize,
    witness_cap: usize,
    exec: Exec,
) -> CycleReport {
    let max_len = max_len.min(4);
    let call = CALLS.fetch_add(1, Ordering::Relaxed) + 1;
    let parts = exec.map(h.n(), |x| {
        let mut p = Partial { epoch: (call << 32) | (x as u64 + 1), ..Partial::default() };
        let x = x as VertexId;
        if max_len >= 2 {
            two_cycles_at(h, x, witness_cap, &mut p);
        }
        if max_len >= 3 {
            three_cycles_at(h, x, witness_cap, &mut p);
        }
        if max_len >= 4 {
            four_cycles_at(h, x, witness_cap, &mut p);
        }
        p.verts.sort_unstable();
        p.verts.dedup();
        p
    });
    let mut report = CycleReport {
        max_len,
        counts: [0; 5],
        witnesses: Default::default(),
        vertices_in_short_cycles: Vec::new(),
    };
    let mut seen = vec![false; h.n()];
    for mut p in parts {
        for i in 2..=4 {
            report.counts[i] += p.counts[i];
            let room = witness_cap.saturating_sub(report.witnesses[i].len());
            report.witnesses[i].extend(std::mem::take(&mut p.witnesses[i]).into_iter().take(room));
        }
        for v in p.verts {
            seen[v as usize] = true;
        }
    }
    report.vertices_in_short_cycles =
        (0..h.n()).filter(|&v| seen[v]).map(|v| v as VertexId).collect();
    report
}

/// Pairs of edges whose intersection has at least two vertices, the
/// smallest of which is `x`.
fn two_cycles_at(h: &Hypergraph, x: VertexId, cap: usize, p: &mut Partial) {
    let inc = h.incident(x);
    for (i, &e) in inc.iter().enumerate() {
        let ee = h.edge(e);
        for &f in &inc[i + 1..] {
            let ff = h.edge(f);
            if common(ee, ff) < 2 {
                continue;
            }
            let smallest = ee.iter().copied().find(|v| contains(ff, *v));
            if smallest == Some(x) {
                p.record(h, 2, &[e, f], cap);
            }
        }
    }
}

/// Linear triangles e, f, g with x = e ∩ f the smallest corner, found by
/// walking from each neighbor a of x along edges g that avoid x.
fn three_cycles_at(h: &Hypergraph, x: VertexId, cap: usize, p: &mut Partial) {
    // (neighbor, edge through x and that neighbor)
    let mut label: Vec<(VertexId, EdgeId)> = Vec::new();
    for &e in h.incident(x) {
        label.extend(h.edge(e).iter().filter(|&&a| a > x).map(|&a| (a, e)));
    }
    let epoch = p.epoch;
    let (sorted, keys) = bucket(h.n(), epoch, &label, |&(a, _)| a);
    let mut found: Vec<[EdgeId; 3]> = Vec::new();
    RANGES.with_borrow(|ranges| {
        let through = |v: VertexId| -> &[(VertexId, EdgeId)] {
            let (ep, lo, hi) = ranges[v as usize];
            if ep == epoch {
                &sorted[lo as usize..hi as usize]
            } else {
                &[]
            }
        };
        for &a in &keys {
            let from_a = through(a);
            for &g in h.incident(a) {
                let gg = h.edge(g);
                if contains(gg, x) {
                    continue;
                }
                for &b in gg.iter().filter(|&&b| b > x && b != a) {
                    for &(_, f) in through(b) {
                        for &(_, e) in from_a {
                            if e >= f {
                                continue;
                            }
                            let (ee, ff) = (h.edge(e), h.edge(f));
                            if common(ee, ff) == 1 && common(gg, ee) == 1 && common(gg, ff) == 1 {
                                found.push([e, f, g]);
                            }
                        }
                    }
                }
            }
        }
    });
    for t in &found {
        p.record(h, 3, t, cap);
    }
}

/// Quadrilaterals v0 -e1- v1 -e2- v2 -e3- v3 -e4- v0 with v0 the smallest
/// connecting vertex, joined from two 2-paths out of v0 meeting at v2.
fn four_cycles_at(h: &Hypergraph, v0: VertexId, cap: usize, p: &mut Partial) {
    // (v2, v1, e1, e2)
    let mut paths: Vec<(VertexId, VertexId, EdgeId, EdgeId)> = Vec::new();
    for &e1 in h.incident(v0) {
        let ee1 = h.edge(e1);
        for &v1 in ee1.iter().filter(|&&v| v > v0) {
            for &e2 in h.incident(v1) {
                if e2 == e1 {
                    continue;
                }
                let ee2 = h.edge(e2);
                // Intersection exactly {v1}: v0 and v2 then lie outside the other edge.
                if common(ee1, ee2) != 1 {
                    continue;
                }
                for &v2 in ee2.iter().filter(|&&v| v > v0 && v != v1) {
                    paths.push((v2, v1, e1, e2));
                }
            }
        }
    }
    // A distinct epoch: the triangle pass of the same task filled the table.
    let (sorted, keys) = bucket(h.n(), p.epoch | 1 << 63, &paths, |t| t.0);
    let mut found: Vec<[EdgeId; 4]> = Vec::new();
    RANGES.with_borrow(|ranges| {
        for &v2 in &keys {
            let (_, lo, hi) = ranges[v2 as usize];
            let group = &sorted[lo as usize..hi as usize];
            for (a, &(_, v1, e1, e2)) in group.iter().enumerate() {
                for &(_, v3, e4, e3) in &group[a + 1..] {
                    if v1 == v3 {
                        continue;
                    }
                    let (s1, s2, s3, s4) = (h.edge(e1), h.edge(e2), h.edge(e3), h.edge(e4));
                    if common(s1, s4) == 1 && common(s2, s3) == 1 && common(s1, s3) == 0 && common(s2, s4) == 0 {
                        found.push(if v1 < v3 { [e1, e2, e3, e4] } else { [e4, e3, e2, e1] });
                    }
                }
            }
        }
    });
    for c in &found {
        p.record(h, 4, c, cap);
    }
}

/// Vertices of edges that lie on some 2-, 3- or 4-cycle, as in
/// [`CycleReport::vertices_in_short_cycles`], without counting the cycles:
/// each edge stops searching at its first cycle, and every edge of a found
/// cycle is marked so later searches are skipped.
pub fn short_cycle_vertices(h: &Hypergraph, exec: Exec) -> Vec<VertexId> {
    let flagged: Vec<AtomicBool> = (0..h.m()).map(|_| AtomicBool::new(false)).collect();
    exec.map(h.m(), |e| {
        if !flagged[e].load(Ordering::Relaxed) {
            if let Some(cycle) = cycle_through(h, e as EdgeId) {
                for f in cycle {
                    flagged[f as usize].store(true, Ordering::Relaxed);
                }
            }
        }
    });
    let mut seen = vec![false; h.n()];
    for (e, f) in flagged.iter().enumerate() {
        if f.load(Ordering::Relaxed) {
            for &v in h.edge(e as EdgeId) {
                seen[v as usize] = true;
            }
        }
    }
    (0..h.n()).filter(|&v| seen[v]).map(|v| v as VertexId).collect()
}

/// Some short cycle containing `e`, if any.
fn cycle_through(h: &Hypergraph, e: EdgeId) -> Option<Vec<EdgeId>> {
    let ee = h.edge(e);
    for &a in ee {
        for &f in h.incident(a) {
            if f != e && common(ee, h.edge(f)) >= 2 {
                return Some(vec![e, f]);
            }
        }
    }
    // Quadrilaterals are by far the most common on dense inputs, so try them first.
    // Quadrilaterals e = e1 with e1 ∩ e2 = {v1}, e1 ∩ e4 = {v0}.
    let arms = |v: VertexId| -> Vec<(VertexId, EdgeId)> {
        let mut out = Vec::new();
        for &f in h.incident(v) {
            let ff = h.edge(f);
            if f != e && common(ee, ff) == 1 {
                out.extend(ff.iter().filter(|&&w| w != v).map(|&w| (w, f)));
            }
        }
        out
    };
    let epoch = (CALLS.fetch_add(1, Ordering::Relaxed) + 1) << 32 | 1 << 63;
    for (i, &v0) in ee.iter().enumerate() {
        let (back, _) = bucket(h.n(), epoch + i as u64, &arms(v0), |t| t.0);
        let hit = RANGES.with_borrow(|ranges| {
            for &v1 in ee.iter().filter(|&&v| v != v0) {
                for (v2, e2) in arms(v1) {
                    let s2 = h.edge(e2);
                    for &e3 in h.incident(v2) {
                        let s3 = h.edge(e3);
                        if e3 == e2 || common(s3, s2) != 1 || common(s3, ee) != 0 {
                            continue;
                        }
                        for &v3 in s3.iter().filter(|&&w| w != v2) {
                            let (ep, lo, hi) = ranges[v3 as usize];
                            if ep != epoch + i as u64 {
                                continue;
                            }
                            for &(_, e4) in &back[lo as usize..hi as usize] {
                                let s4 = h.edge(e4);
                                if e4 != e3 && common(s3, s4) == 1 && common(s2, s4) == 0 {
                                    return Some(vec![e, e2, e3, e4]);
                                }
                            }
                        }
                    }
                }
            }
            None
        });
        if hit.is_some() {
            return hit;
        }
    }
    // Triangles: e ∩ f = {a}, then g through another vertex c of f.
    for &a in ee {
        for &f in h.incident(a) {
            let ff = h.edge(f);
            if f == e || common(ee, ff) != 1 {
                continue;
            }
            for &c in ff.iter().filter(|&&c| c != a) {
                for &g in h.incident(c) {
                    if g == f || g == e {
                        continue;
                    }
                    let gg = h.edge(g);
                    if common(gg, ff) == 1 && common(gg, ee) == 1 {
                        return Some(vec![e, f, g]);
                    }
                }
            }
        }
    }
    None
}
