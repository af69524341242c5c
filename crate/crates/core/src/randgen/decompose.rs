use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hypergraph::{degeneracy, short_cycle_vertices, short_cycles_with, CycleReport, Hypergraph, VertexId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// Absorb every vertex with more than δ(d/ln d)^{1/(k−1)} neighbors in U.
    #[default]
    Definition,
    /// Absorb, edge by edge, the vertices with at least
    /// 9k²(d/(ln d)²)^{1/(k−1)} neighbors in U.
    Proof,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// (1+δ)d.
    pub degree: f64,
    pub boundary_definition: f64,
    pub boundary_proof: f64,
    /// (d/ln d)^{1/(k−1)}.
    pub degeneracy_definition: f64,
    /// k(d/(ln d)²)^{1/(k−1)}.
    pub degeneracy_lemma: f64,
    /// n·d^{−1/(k−1)}.
    pub size_bound: f64,
}

impl Thresholds {
    pub fn new(k: usize, n: usize, d: f64, delta: f64) -> Self {
        let e = 1.0 / (k - 1) as f64;
        let ln = d.ln();
        Thresholds {
            degree: (1.0 + delta) * d,
            boundary_definition: delta * (d / ln).powf(e),
            boundary_proof: 9.0 * (k * k) as f64 * (d / (ln * ln)).powf(e),
            degeneracy_definition: (d / ln).powf(e),
            degeneracy_lemma: k as f64 * (d / (ln * ln)).powf(e),
            size_bound: n as f64 * d.powf(-e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    /// κ(H[U]) and its elimination order, in original vertex ids.
    pub kappa_u: usize,
    pub order_u: Vec<VertexId>,
    /// Short cycles remaining in H[V∖U] (witness ids refer to the induced graph).
    pub rest_cycles: CycleReport,
    pub rest_max_degree: usize,
    /// Vertices of degree above (1+δ)d that ended outside U.
    pub high_degree_outside: usize,
    /// |N(v) ∩ U| for each v of V∖U, aligned with `Decomposition::complement`.
    pub boundary_counts: Vec<usize>,
    pub max_boundary: usize,
    pub clause_a: bool,
    pub clause_b_definition: bool,
    pub clause_b_lemma: bool,
    pub clause_c: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub mode: ThresholdMode,
    pub delta: f64,
    pub d: f64,
    pub thresholds: Thresholds,
    #[serde(rename = "U")]
    pub u: Vec<VertexId>,
    pub complement: Vec<VertexId>,
    pub initial_size: usize,
    /// Sizes of U after seeding and after every expansion step.
    pub growth: Vec<usize>,
    pub certificates: Certificates,
    pub girth_reducible: bool,
}

impl Decomposition {
    pub fn membership(&self, n: usize) -> Vec<bool> {
        let mut inside = vec![false; n];
        for &v in &self.u {
            inside[v as usize] = true;
        }
        inside
    }

    pub fn within_size_bound(&self) -> bool {
        self.u.len() as f64 <= self.thresholds.size_bound
    }
}

struct Grower<'a> {
    h: &'a Hypergraph,
    inside: Vec<bool>,
    count: Vec<usize>,
    size: usize,
}

impl Grower<'_> {
    /// Adds `v` to U; returns the neighbors whose count changed.
    fn add(&mut self, v: VertexId) -> Vec<VertexId> {
        if std::mem::replace(&mut self.inside[v as usize], true) {
            return Vec::new();
        }
        self.size += 1;
        let nb = self.h.neighbors(v);
        for &w in &nb {
            self.count[w as usize] += 1;
        }
        nb
    }
}

/// Splits V into U (short cycles, high degree, and whatever the boundary
/// rule pulls in) and V∖U, then evaluates the three clauses from scratch.
pub fn decompose(h: &Hypergraph, delta: f64, mode: ThresholdMode) -> Result<Decomposition> {
    decompose_with(h, delta, mode, Exec::default())
}

pub fn decompose_with(h: &Hypergraph, delta: f64, mode: ThresholdMode, exec: Exec) -> Result<Decomposition> {
    let d = h.avg_degree();
    if d.is_nan() || d <= std::f64::consts::E {
        return Err(Error::DegreeTooLow { d });
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParam(format!("delta = {delta} must be positive")));
    }
    let n = h.n();
    let th = Thresholds::new(h.k(), n, d, delta);
    let mut g = Grower { h, inside: vec![false; n], count: vec![0; n], size: 0 };
    for v in short_cycle_vertices(h, exec) {
        g.add(v);
    }
    for v in 0..n as VertexId {
        if h.degree(v) as f64 > th.degree {
            g.add(v);
        }
    }
    let initial_size = g.size;
    let mut growth = vec![g.size];
    match mode {
        ThresholdMode::Definition => loop {
            let boundary: Vec<VertexId> = (0..n as VertexId)
                .filter(|&v| !g.inside[v as usize] && g.count[v as usize] as f64 > th.boundary_definition)
                .collect();
            if boundary.is_empty() {
                break;
            }
            for v in boundary {
                g.add(v);
            }
            growth.push(g.size);
        },
        ThresholdMode::Proof => {
            let hot = |g: &Grower<'_>, v: VertexId| !g.inside[v as usize] && g.count[v as usize] as f64 >= th.boundary_proof;
            let mut queue: BTreeSet<VertexId> = (0..n as VertexId).filter(|&v| hot(&g, v)).collect();
            while let Some(v) = queue.pop_first() {
                if !hot(&g, v) {
                    continue;
                }
                let mut pending: BTreeSet<VertexId> =
                    h.neighbors(v).into_iter().filter(|&u| g.inside[u as usize]).collect();
                while let Some(u1) = pending.pop_first() {
                    let e = h
                        .incident(v)
                        .iter()
                        .copied()
                        .find(|&e| h.edge(e).binary_search(&u1).is_ok())
                        .expect("u1 is a neighbor of v");
                    for &w in h.edge(e) {
                        pending.remove(&w);
                        for x in g.add(w) {
                            if hot(&g, x) {
                                queue.insert(x);
                            }
                        }
                    }
                }
                growth.push(g.size);
            }
        }
    }
    let u: Vec<VertexId> = (0..n as VertexId).filter(|&v| g.inside[v as usize]).collect();
    let complement: Vec<VertexId> = (0..n as VertexId).filter(|&v| !g.inside[v as usize]).collect();
    let certificates = certify(h, &g.inside, &complement, &th, exec);
    let girth_reducible = certificates.clause_a
        && certificates.clause_b_definition
        && certificates.clause_c
        && !complement.is_empty();
    Ok(Decomposition { mode, delta, d, thresholds: th, u, complement, initial_size, growth, certificates, girth_reducible })
}

/// The three clauses, recomputed from the membership vector alone.
pub fn certify(h: &Hypergraph, inside: &[bool], complement: &[VertexId], th: &Thresholds, exec: Exec) -> Certificates {
    let (hu, old_u) = h.induced(inside);
    let deg_u = degeneracy(&hu);
    let outside: Vec<bool> = inside.iter().map(|x| !x).collect();
    let (hr, _) = h.induced(&outside);
    let rest_cycles = short_cycles_with(&hr, 4, 4, exec);
    let high_degree_outside = complement.iter().filter(|&&v| h.degree(v) as f64 > th.degree).count();
    let boundary_counts: Vec<usize> = complement
        .iter()
        .map(|&v| h.neighbors(v).into_iter().filter(|&u| inside[u as usize]).count())
        .collect();
    let max_boundary = boundary_counts.iter().copied().max().unwrap_or(0);
    Certificates {
        kappa_u: deg_u.kappa,
        order_u: deg_u.order.iter().map(|&v| old_u[v as usize]).collect(),
        rest_max_degree: hr.max_degree(),
        clause_a: rest_cycles.total() == 0 && high_degree_outside == 0,
        rest_cycles,
        high_degree_outside,
        clause_b_definition: deg_u.kappa as f64 <= th.degeneracy_definition,
        clause_b_lemma: deg_u.kappa as f64 <= th.degeneracy_lemma,
        clause_c: max_boundary as f64 <= th.boundary_definition,
        boundary_counts,
        max_boundary,
    }
}
