//! Random k-uniform hypergraphs and the girth-reducibility decomposition.

mod decompose;
mod stats;

pub use decompose::{certify, decompose, decompose_with, Certificates, Decomposition, ThresholdMode, Thresholds};
pub use stats::{check_poisson, degree_stats, poisson_pmf, sparse_subset_check, DegreeStats, PoissonReport, SubsetReport};

use std::collections::HashSet;

use rand::Rng as _;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, VertexId};
use crate::rng::{seeded, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Every k-subset independently with probability p.
    Binomial,
    /// Exactly ⌈dn/k⌉ distinct uniform k-subsets.
    FixedCount,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub k: usize,
    pub n: usize,
    pub d: f64,
    pub model: Model,
    pub seed: u64,
    /// Refuse to draw more edges than this.
    pub max_edges: u64,
}

impl GenParams {
    pub fn new(k: usize, n: usize, d: f64, model: Model, seed: u64) -> Self {
        GenParams { k, n, d, model, seed, max_edges: 50_000_000 }
    }

    /// p = d / C(n, k−1).
    pub fn p(&self) -> f64 {
        self.d / binom_f64(self.n as u64, self.k as u64 - 1)
    }
}

pub(crate) fn binom_f64(n: u64, r: u64) -> f64 {
    if r > n {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// C(n, r) exactly, or None on overflow.
pub fn binom_u64(n: u64, r: u64) -> Option<u64> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Draws `m` distinct uniform k-subsets of [0, n) by rejection; the set of
/// draws is uniform over all m-subsets of k-subsets.
pub fn distinct_subsets(k: usize, n: usize, m: u64, rng: &mut Rng) -> Vec<Vec<VertexId>> {
    let mut seen: HashSet<Vec<VertexId>> = HashSet::with_capacity(m as usize);
    let mut out = Vec::with_capacity(m as usize);
    let mut tuple: Vec<VertexId> = Vec::with_capacity(k);
    while (out.len() as u64) < m {
        tuple.clear();
        while tuple.len() < k {
            let v = rng.random_range(0..n as VertexId);
            if !tuple.contains(&v) {
                tuple.push(v);
            }
        }
        tuple.sort_unstable();
        if seen.insert(tuple.clone()) {
            out.push(tuple.clone());
        }
    }
    out
}

/// Number of edges of the binomial model: Binomial(C(n,k), p).
pub fn binomial_edge_count(k: usize, n: usize, p: f64, rng: &mut Rng) -> Result<u64> {
    let total = binom_u64(n as u64, k as u64)
        .ok_or_else(|| Error::Infeasible(format!("C({n}, {k}) overflows 64 bits")))?;
    if p <= 0.0 || total == 0 {
        return Ok(0);
    }
    if p >= 1.0 {
        return Ok(total);
    }
    let dist = Binomial::new(total, p).map_err(|e| Error::InvalidParam(format!("binomial: {e}")))?;
    Ok(dist.sample(rng))
}

pub fn generate(params: &GenParams) -> Result<Hypergraph> {
    let GenParams { k, n, d, model, seed, max_edges } = *params;
    if k < 2 {
        return Err(Error::InvalidParam(format!("k = {k} must be at least 2")));
    }
    if n < k {
        return Err(Error::InvalidParam(format!("n = {n} must be at least k = {k}")));
    }
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::InvalidParam(format!("d = {d} must be finite and non-negative")));
    }
    let p = params.p();
    if p > 1.0 {
        return Err(Error::Infeasible(format!("edge probability {p} exceeds 1")));
    }
    let mut rng = seeded(seed);
    let total = binom_u64(n as u64, k as u64);
    let m = match model {
        Model::Binomial => binomial_edge_count(k, n, p, &mut rng)?,
        Model::FixedCount => {
            let m = (d * n as f64 / k as f64).ceil() as u64;
            if total.is_some_and(|t| m > t) {
                return Err(Error::Infeasible(format!("{m} edges requested, only C({n},{k}) exist")));
            }
            m
        }
    };
    if m > max_edges {
        return Err(Error::Infeasible(format!("{m} edges exceed the budget of {max_edges}")));
    }
    // Rejection stays cheap while at most half of all k-subsets are drawn;
    // above that, draw the uniform set of missing edges instead.
    if let Some(t) = total {
        if m > t / 2 {
            let missing: HashSet<Vec<VertexId>> = distinct_subsets(k, n, t - m, &mut rng).into_iter().collect();
            let verts = complete(k, n)
                .chunks_exact(k)
                .filter(|e| !missing.contains(*e))
                .flatten()
                .copied()
                .collect();
            return Ok(Hypergraph::from_canonical(k, n, verts));
        }
    }
    let mut edges = distinct_subsets(k, n, m, &mut rng);
    edges.sort_unstable();
    Ok(Hypergraph::from_canonical(k, n, edges.into_iter().flatten().collect()))
}

/// All k-subsets of [0, n) in lexicographic order, flattened.
fn complete(k: usize, n: usize) -> Vec<VertexId> {
    let mut verts = Vec::new();
    let mut idx: Vec<VertexId> = (0..k as VertexId).collect();
    loop {
        verts.extend_from_slice(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return verts;
            }
            i -= 1;
            if (idx[i] as usize) < n - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Random greedy construction of a hypergraph of girth at least five:
/// random k-subsets are proposed and kept only if every pair of their
/// vertices is at distance at least four, until `target_edges` are placed
/// or `attempts` proposals are used. Also enforces a maximum degree.
pub fn girth5_greedy(
    k: usize,
    n: usize,
    target_edges: usize,
    max_degree: usize,
    attempts: u64,
    seed: u64,
) -> Result<Hypergraph> {
    if k < 2 || n < k {
        return Err(Error::InvalidParam(format!("need k >= 2 and n >= k, got k = {k}, n = {n}")));
    }
    let mut rng = seeded(seed);
    let mut edges: Vec<Vec<VertexId>> = Vec::new();
    let mut inc: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut stamp = vec![0u32; n];
    let mut cur = 0u32;
    let mut tuple: Vec<VertexId> = Vec::with_capacity(k);
    let mut tries = 0u64;
    let mut room = if max_degree > 0 { n } else { 0 };
    while edges.len() < target_edges && tries < attempts && room >= k {
        tries += 1;
        tuple.clear();
        while tuple.len() < k {
            let v = rng.random_range(0..n as VertexId);
            if !tuple.contains(&v) && inc[v as usize].len() < max_degree {
                tuple.push(v);
            }
        }
        // Ball of radius 2 around each vertex must miss the radius-1 balls
        // of the others: that rules out paths of length at most 3.
        let mut ok = true;
        'check: for (a_idx, &a) in tuple.iter().enumerate() {
            cur += 1;
            let mut frontier = vec![a];
            stamp[a as usize] = cur;
            for _ in 0..2 {
                let mut nxt = Vec::new();
                for &x in &frontier {
                    for &e in &inc[x as usize] {
                        for &y in &edges[e as usize] {
                            if stamp[y as usize] != cur {
                                stamp[y as usize] = cur;
                                nxt.push(y);
                            }
                        }
                    }
                }
                frontier = nxt;
            }
            for (b_idx, &b) in tuple.iter().enumerate() {
                if b_idx == a_idx {
                    continue;
                }
                if stamp[b as usize] == cur {
                    ok = false;
                    break 'check;
                }
                for &e in &inc[b as usize] {
                    if edges[e as usize].iter().any(|&y| stamp[y as usize] == cur) {
                        ok = false;
                        break 'check;
                    }
                }
            }
        }
        if ok {
            tuple.sort_unstable();
            let id = edges.len() as u32;
            for &v in &tuple {
                inc[v as usize].push(id);
                if inc[v as usize].len() == max_degree {
                    room -= 1;
                }
            }
            edges.push(tuple.clone());
        }
    }
    edges.sort_unstable();
    Ok(Hypergraph::from_canonical(k, n, edges.into_iter().flatten().collect()))
}
