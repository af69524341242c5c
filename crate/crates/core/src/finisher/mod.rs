//! Completing partial colorings: greedy coloring along a degeneracy order,
//! and the final Moser-Tardos phase with its local-lemma certificate.

use std::collections::BTreeSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Color, Coloring, EdgeId, Hypergraph, ListAssignment, VertexId};
use crate::rng::Rng;

/// What a vertex must avoid when it is colored greedily.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyRule {
    /// Skip c only when some edge would become entirely c. Needs at most
    /// κ + 1 colors along a degeneracy order.
    #[default]
    AvoidMonochromatic,
    /// Skip every color already used by a neighbor.
    AvoidNeighbors,
}

/// Colors the vertices in reverse elimination order, each with the smallest
/// color of its list that is not forbidden and not blocked by `rule`.
pub fn greedy_degenerate(
    h: &Hypergraph,
    la: &ListAssignment,
    order: &[VertexId],
    forbidden: &[Vec<Color>],
    rule: GreedyRule,
) -> Result<Coloring> {
    let n = h.n();
    if la.lists.len() != n || forbidden.len() != n || order.len() != n {
        return Err(Error::InvalidParam("lists, forbidden sets and order must cover every vertex".into()));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if (v as usize) >= n || std::mem::replace(&mut seen[v as usize], true) {
            return Err(Error::InvalidParam("order is not a permutation of the vertices".into()));
        }
    }
    let mut col = Coloring::uncolored(n);
    let mut blocked: Vec<Color> = Vec::new();
    for &v in order.iter().rev() {
        blocked.clear();
        match rule {
            GreedyRule::AvoidNeighbors => {
                for &e in h.incident(v) {
                    blocked.extend(h.edge(e).iter().filter_map(|&u| col.get(u)));
                }
            }
            GreedyRule::AvoidMonochromatic => {
                for &e in h.incident(v) {
                    let mut it = h.edge(e).iter().filter(|&&u| u != v).map(|&u| col.get(u));
                    let first = it.next().flatten();
                    if let Some(c) = first {
                        if it.all(|x| x == Some(c)) {
                            blocked.push(c);
                        }
                    }
                }
            }
        }
        blocked.sort_unstable();
        blocked.dedup();
        let forb = &forbidden[v as usize];
        let pick = la.lists[v as usize]
            .iter()
            .copied()
            .find(|c| !forb.contains(c) && blocked.binary_search(c).is_err());
        match pick {
            Some(c) => col.assignment[v as usize] = Some(c),
            None => {
                let list = &la.lists[v as usize];
                return Err(Error::ListExhausted {
                    vertex: v,
                    list_len: list.len(),
                    forbidden: list.iter().filter(|c| forb.contains(c)).count(),
                    blocked: list.iter().filter(|c| blocked.binary_search(c).is_ok()).count(),
                });
            }
        }
    }
    Ok(col)
}

/// A partial proper coloring `phi` plus lists for the uncolored vertices.
#[derive(Clone, Debug)]
pub struct FinalPhaseInstance<'a> {
    pub base: &'a Hypergraph,
    pub phi: Vec<Option<Color>>,
    pub lists: Vec<Vec<Color>>,
}

impl<'a> FinalPhaseInstance<'a> {
    pub fn new(base: &'a Hypergraph, phi: Vec<Option<Color>>, mut lists: Vec<Vec<Color>>) -> Result<Self> {
        if phi.len() != base.n() || lists.len() != base.n() {
            return Err(Error::InvalidParam("coloring and lists must cover every vertex".into()));
        }
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        Ok(FinalPhaseInstance { base, phi, lists })
    }

    pub fn uncolored(&self) -> Vec<VertexId> {
        (0..self.base.n() as VertexId).filter(|&v| self.phi[v as usize].is_none()).collect()
    }

    /// Colors c for which A_{h,c} is a live event: the colored part of h
    /// is all c and c lies in every list of the uncolored part, which is
    /// non-empty. Errors if a fully colored edge is monochromatic.
    pub fn event_colors(&self, e: EdgeId) -> Result<Vec<Color>> {
        let mut col = None;
        let mut unc = Vec::new();
        for &u in self.base.edge(e) {
            match self.phi[u as usize] {
                None => unc.push(u),
                Some(x) => match col {
                    None => col = Some(x),
                    Some(y) if y != x => return Ok(Vec::new()),
                    _ => {}
                },
            }
        }
        if unc.is_empty() {
            return Err(Error::ImproperInput(e));
        }
        let in_all = |c: &Color| unc.iter().all(|&u| self.lists[u as usize].binary_search(c).is_ok());
        Ok(match col {
            Some(c) => if in_all(&c) { vec![c] } else { Vec::new() },
            None => self.lists[unc[0] as usize].iter().copied().filter(|c| in_all(c)).collect(),
        })
    }

    /// All events (edge, color), sorted.
    pub fn events(&self) -> Result<Vec<(EdgeId, Color)>> {
        let mut out = Vec::new();
        for e in 0..self.base.m() as EdgeId {
            out.extend(self.event_colors(e)?.into_iter().map(|c| (e, c)));
        }
        Ok(out)
    }

    /// μ(A_{h,c}) = 1 / ∏ |L_v| over the uncolored vertices of h.
    pub fn probability(&self, e: EdgeId) -> f64 {
        self.base
            .edge(e)
            .iter()
            .filter(|&&u| self.phi[u as usize].is_none())
            .map(|&u| 1.0 / self.lists[u as usize].len() as f64)
            .product()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalOutcome {
    pub coloring: Coloring,
    pub resamples: u64,
    /// Each resampling step: the event and the vertices redrawn.
    pub trace: Option<Vec<(EdgeId, Color, Vec<VertexId>)>>,
}

/// Moser-Tardos over uniform colors from the lists of the uncolored
/// vertices; a violated A_{h,c} redraws exactly the uncolored vertices of h.
pub fn final_phase(
    inst: &FinalPhaseInstance<'_>,
    budget: Option<u64>,
    rng: &mut Rng,
    trace: bool,
) -> Result<FinalOutcome> {
    let h = inst.base;
    let unc = inst.uncolored();
    for &v in &unc {
        if inst.lists[v as usize].is_empty() {
            return Err(Error::ListExhausted { vertex: v, list_len: 0, forbidden: 0, blocked: 0 });
        }
    }
    let mut col = inst.phi.clone();
    for &v in &unc {
        let l = &inst.lists[v as usize];
        col[v as usize] = Some(l[rng.random_range(0..l.len())]);
    }
    let mono = |col: &[Option<Color>], e: EdgeId| -> Option<Color> {
        let vs = h.edge(e);
        let c = col[vs[0] as usize];
        vs.iter().all(|&u| col[u as usize] == c).then_some(c).flatten()
    };
    let mut violated: BTreeSet<(EdgeId, Color)> = BTreeSet::new();
    for e in 0..h.m() as EdgeId {
        if let Some(c) = mono(&col, e) {
            if h.edge(e).iter().all(|&u| inst.phi[u as usize].is_some()) {
                return Err(Error::ImproperInput(e));
            }
            violated.insert((e, c));
        }
    }
    let mut resamples = 0u64;
    let mut log = trace.then(Vec::new);
    while let Some((e, c)) = violated.pop_first() {
        if budget.is_some_and(|b| resamples >= b) {
            return Err(Error::BudgetExhausted { budget: resamples, violated: violated.len() + 1 });
        }
        let redraw: Vec<VertexId> =
            h.edge(e).iter().copied().filter(|&u| inst.phi[u as usize].is_none()).collect();
        for &u in &redraw {
            for &f in h.incident(u) {
                if let Some(cf) = mono(&col, f) {
                    violated.remove(&(f, cf));
                }
            }
        }
        for &u in &redraw {
            let l = &inst.lists[u as usize];
            col[u as usize] = Some(l[rng.random_range(0..l.len())]);
        }
        for &u in &redraw {
            for &f in h.incident(u) {
                if let Some(cf) = mono(&col, f) {
                    violated.insert((f, cf));
                }
            }
        }
        resamples += 1;
        if let Some(log) = log.as_mut() {
            log.push((e, c, redraw));
        }
    }
    Ok(FinalOutcome { coloring: Coloring { assignment: col }, resamples, trace: log })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub events: usize,
    pub max_probability: f64,
    /// Largest sum of μ over the events sharing an uncolored vertex with a
    /// given event (the event itself included).
    pub max_dependency_sum: f64,
    pub probability_ok: bool,
    pub dependency_ok: bool,
    pub certified: bool,
    /// Σ x/(1−x) with x = 2μ, the expected-resample bound when certified.
    pub expected_resamples: f64,
    /// max_v (k/|L_v|) Σ_{c'} Σ_r |D_r(v,c')| / L^r with L the smallest list.
    pub chain_bound: f64,
}

/// Evaluates the two local-lemma conditions for the final-phase events.
pub fn lll_certificate(inst: &FinalPhaseInstance<'_>) -> Result<CertReport> {
    let h = inst.base;
    let k = h.k();
    let events = inst.events()?;
    let mut weight = vec![0.0f64; h.n()];
    let mut per_edge: Vec<(EdgeId, usize, f64)> = Vec::new();
    let mut i = 0;
    while i < events.len() {
        let e = events[i].0;
        let mut j = i;
        while j < events.len() && events[j].0 == e {
            j += 1;
        }
        let mu = inst.probability(e);
        per_edge.push((e, j - i, mu));
        for &u in h.edge(e) {
            if inst.phi[u as usize].is_none() {
                weight[u as usize] += mu * (j - i) as f64;
            }
        }
        i = j;
    }
    let mut max_probability = 0.0f64;
    let mut max_dep = 0.0f64;
    let mut expected = 0.0f64;
    for &(e, count, mu) in &per_edge {
        max_probability = max_probability.max(mu);
        let dep: f64 = h
            .edge(e)
            .iter()
            .filter(|&&u| inst.phi[u as usize].is_none())
            .map(|&u| weight[u as usize])
            .sum();
        max_dep = max_dep.max(dep);
        let x = 2.0 * mu;
        expected += count as f64 * if x < 1.0 { x / (1.0 - x) } else { f64::INFINITY };
    }
    let unc = inst.uncolored();
    let l_min = unc.iter().map(|&v| inst.lists[v as usize].len()).min().unwrap_or(0) as f64;
    let mut chain = 0.0f64;
    if l_min > 0.0 {
        let mut sums = vec![0.0f64; h.n()];
        for &(e, count, _) in &per_edge {
            let unc_e: Vec<VertexId> =
                h.edge(e).iter().copied().filter(|&u| inst.phi[u as usize].is_none()).collect();
            // Seen from v, the edge has r = |U(h)| − 1 other uncolored vertices.
            let r = unc_e.len() as i32 - 1;
            if r < 1 {
                continue;
            }
            for &u in &unc_e {
                sums[u as usize] += count as f64 / l_min.powi(r);
            }
        }
        for &v in &unc {
            chain = chain.max(k as f64 / inst.lists[v as usize].len() as f64 * sums[v as usize]);
        }
    }
    let probability_ok = max_probability <= 0.25;
    let dependency_ok = max_dep <= 0.25;
    Ok(CertReport {
        events: events.len(),
        max_probability,
        max_dependency_sum: max_dep,
        probability_ok,
        dependency_ok,
        certified: probability_ok && dependency_ok,
        expected_resamples: expected,
        chain_bound: chain,
    })
}
