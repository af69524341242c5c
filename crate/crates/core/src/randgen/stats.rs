use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::hypergraph::{Hypergraph, VertexId};
use crate::rng::seeded;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub n: usize,
    pub k: usize,
    pub d: f64,
    /// histogram[c] = number of vertices of degree c.
    pub histogram: Vec<u64>,
    /// Poisson(d) pmf over the same support.
    pub poisson: Vec<f64>,
}

/// Poisson(d) pmf at c, in log space.
pub fn poisson_pmf(d: f64, c: usize) -> f64 {
    if d == 0.0 {
        return if c == 0 { 1.0 } else { 0.0 };
    }
    let log = c as f64 * d.ln() - d - (1..=c).map(|i| (i as f64).ln()).sum::<f64>();
    log.exp()
}

pub fn degree_stats(h: &Hypergraph, d: f64) -> DegreeStats {
    let degs = h.degrees();
    let top = degs.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0u64; top + 1];
    for x in degs {
        histogram[x] += 1;
    }
    let poisson = (0..=top).map(|c| poisson_pmf(d, c)).collect();
    DegreeStats { n: h.n(), k: h.k(), d, histogram, poisson }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonRow {
    pub c: usize,
    pub observed: f64,
    pub expected: f64,
    pub band: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub rows: Vec<PoissonRow>,
    pub bands_pass: bool,
    /// Vertices with degree in [(1+δ)d, 3(k−1)^{k−1}d], against n/d².
    pub mid_range: u64,
    pub mid_range_bound: f64,
    /// Vertices with degree above (1+δ)d, against 2n/d².
    pub over_degree: u64,
    pub over_degree_bound: f64,
    pub pass: bool,
}

/// Compares X_c/n with the Poisson pmf for c ≤ c_max within `tol_sigma`
/// binomial standard errors, and counts the high-degree tail.
pub fn check_poisson(stats: &DegreeStats, c_max: usize, tol_sigma: f64, delta: f64) -> PoissonReport {
    let n = stats.n as f64;
    let rows: Vec<PoissonRow> = (0..=c_max)
        .map(|c| {
            let observed = stats.histogram.get(c).copied().unwrap_or(0) as f64 / n;
            let expected = poisson_pmf(stats.d, c);
            let band = tol_sigma * (expected * (1.0 - expected) / n).sqrt();
            PoissonRow { c, observed, expected, band, pass: (observed - expected).abs() <= band }
        })
        .collect();
    let bands_pass = rows.iter().all(|r| r.pass);
    let lo = (1.0 + delta) * stats.d;
    let hi = 3.0 * ((stats.k - 1) as f64).powi(stats.k as i32 - 1) * stats.d;
    let count = |f: &dyn Fn(f64) -> bool| -> u64 {
        stats.histogram.iter().enumerate().filter(|&(c, _)| f(c as f64)).map(|(_, &x)| x).sum()
    };
    let mid_range = count(&|c| c >= lo && c <= hi);
    let over_degree = count(&|c| c > lo);
    let d2 = stats.d * stats.d;
    let mid_range_bound = n / d2;
    let over_degree_bound = 2.0 * n / d2;
    PoissonReport {
        bands_pass,
        pass: bands_pass && mid_range as f64 <= mid_range_bound && over_degree as f64 <= over_degree_bound,
        rows,
        mid_range,
        mid_range_bound,
        over_degree,
        over_degree_bound,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetReport {
    pub trials: u64,
    pub d: f64,
    pub max_size: usize,
    /// (d/(ln d)²)^{1/(k−1)}.
    pub bound: f64,
    pub max_ratio: f64,
    pub argmax_size: usize,
    pub argmax_edges: usize,
    pub pass: bool,
}

/// Vertex-subset bookkeeping: edges fully inside and, for each outside
/// vertex, how many edges it would complete and how many inside slots
/// its edges already have.
struct Subset<'a> {
    h: &'a Hypergraph,
    inside: Vec<bool>,
    members: Vec<VertexId>,
    ins: Vec<u32>,
    complete: Vec<u32>,
    partial: Vec<u32>,
    inner_deg: Vec<u32>,
    edges: usize,
    heap: BinaryHeap<(u32, u32, Reverse<VertexId>)>,
}

impl<'a> Subset<'a> {
    fn new(h: &'a Hypergraph) -> Self {
        let n = h.n();
        Subset {
            h,
            inside: vec![false; n],
            members: Vec::new(),
            ins: vec![0; h.m()],
            complete: vec![0; n],
            partial: vec![0; n],
            inner_deg: vec![0; n],
            edges: 0,
            heap: BinaryHeap::new(),
        }
    }

    fn touch(&mut self, w: VertexId) {
        if !self.inside[w as usize] {
            self.heap.push((self.complete[w as usize], self.partial[w as usize], Reverse(w)));
        }
    }

    /// Moves u across the boundary. partial[w] counts the other members of
    /// w's edges; complete[w] counts w's edges whose other vertices are all in.
    fn flip(&mut self, u: VertexId, join: bool) {
        let k = self.h.k() as u32;
        self.inside[u as usize] = join;
        if join {
            self.members.push(u);
        } else {
            let pos = self.members.iter().position(|&x| x == u).expect("member");
            self.members.swap_remove(pos);
        }
        for &e in self.h.incident(u) {
            let before = self.ins[e as usize];
            let after = if join { before + 1 } else { before - 1 };
            self.ins[e as usize] = after;
            let vs = self.h.edge(e);
            if before == k || after == k {
                if join {
                    self.edges += 1;
                } else {
                    self.edges -= 1;
                }
                for &w in vs {
                    if join {
                        self.inner_deg[w as usize] += 1;
                    } else {
                        self.inner_deg[w as usize] -= 1;
                    }
                }
            }
            for &w in vs {
                if w == u {
                    continue;
                }
                let own = u32::from(self.inside[w as usize]);
                let (others_before, others_after) = (before - own, after - own);
                if join {
                    self.partial[w as usize] += 1;
                } else {
                    self.partial[w as usize] -= 1;
                }
                if others_after == k - 1 {
                    self.complete[w as usize] += 1;
                } else if others_before == k - 1 {
                    self.complete[w as usize] -= 1;
                }
                self.touch(w);
            }
        }
        self.touch(u);
    }

    fn add(&mut self, u: VertexId) {
        self.flip(u, true);
    }

    fn remove(&mut self, u: VertexId) {
        self.flip(u, false);
    }

    /// Outside vertex with the most completable edges, then the most partial ones.
    fn best_outside(&mut self) -> Option<VertexId> {
        while let Some(&(c, p, Reverse(w))) = self.heap.peek() {
            if self.inside[w as usize] || self.complete[w as usize] != c || self.partial[w as usize] != p {
                self.heap.pop();
                continue;
            }
            return Some(w);
        }
        None
    }

    fn worst_inside(&self) -> Option<VertexId> {
        self.members.iter().copied().min_by_key(|&u| (self.inner_deg[u as usize], u))
    }
}

/// Searches for vertex sets S with |S| ≤ n·d^{−1/(k−1)} spanning many edges,
/// alternating random subsets improved by swaps with greedy growth from a
/// random vertex, and reports the largest e(S)/|S| seen.
pub fn sparse_subset_check(h: &Hypergraph, trials: u64, seed: u64) -> SubsetReport {
    let k = h.k();
    let n = h.n();
    let d = h.avg_degree();
    let e = 1.0 / (k - 1) as f64;
    let bound = if d > 1.0 { (d / (d.ln() * d.ln())).powf(e) } else { f64::INFINITY };
    let max_size = ((n as f64 * d.powf(-e)).floor() as usize).min(n);
    let mut report = SubsetReport {
        trials,
        d,
        max_size,
        bound,
        max_ratio: 0.0,
        argmax_size: 0,
        argmax_edges: 0,
        pass: true,
    };
    if h.m() == 0 || max_size < k {
        return report;
    }
    const LEVELS: u64 = 16;
    let mut rng = seeded(seed);
    let (lo, hi) = ((k as f64).ln(), (max_size as f64).ln());
    for t in 0..trials {
        let frac = (t / 2 % LEVELS) as f64 / (LEVELS - 1) as f64;
        let s = ((lo + (hi - lo) * frac).exp().round() as usize).clamp(k, max_size);
        let mut sub = Subset::new(h);
        let consider = |sub: &Subset<'_>, report: &mut SubsetReport| {
            let ratio = sub.edges as f64 / sub.members.len() as f64;
            if ratio > report.max_ratio {
                report.max_ratio = ratio;
                report.argmax_size = sub.members.len();
                report.argmax_edges = sub.edges;
            }
        };
        if t % 2 == 0 {
            for v in sample(&mut rng, n, s) {
                sub.add(v as VertexId);
            }
            consider(&sub, &mut report);
            for _ in 0..s.min(32) {
                let (Some(w), Some(u)) = (sub.best_outside(), sub.worst_inside()) else { break };
                let before = sub.edges;
                sub.remove(u);
                sub.add(w);
                if sub.edges <= before {
                    sub.remove(w);
                    sub.add(u);
                    break;
                }
                consider(&sub, &mut report);
            }
        } else {
            sub.add(rng.random_range(0..n as VertexId));
            while sub.members.len() < s {
                let next = match sub.best_outside() {
                    Some(w) => w,
                    None => loop {
                        let v = rng.random_range(0..n as VertexId);
                        if !sub.inside[v as usize] {
                            break v;
                        }
                    },
                };
                sub.add(next);
                consider(&sub, &mut report);
            }
        }
    }
    report.pass = report.max_ratio < bound;
    report
}
