//! Slow, independent reference implementations shared by the integration
//! tests and the acceptance runner.
#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};
use hgcolor::rng::Rng;
use hgcolor::{Hypergraph, VertexId};
use rand::Rng as _;

/// Random k-uniform hypergraph with up to `m` distinct edges on `n` vertices.
pub fn random_instance(rng: &mut Rng, k: usize, n: usize, m: usize) -> Hypergraph {
    let mut edges: Vec<Vec<u64>> = Vec::new();
    for _ in 0..m * 4 {
        if edges.len() == m {
            break;
        }
        let mut e: Vec<u64> = Vec::new();
        while e.len() < k {
            let v = rng.random_range(0..n as u64);
            if !e.contains(&v) {
                e.push(v);
            }
        }
        e.sort_unstable();
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    Hypergraph::build(k, n, &edges).expect("valid edges")
}

fn span(h: &Hypergraph, set: &[usize]) -> usize {
    let mut vs: Vec<VertexId> = set.iter().flat_map(|&e| h.edge(e as u32).iter().copied()).collect();
    vs.sort_unstable();
    vs.dedup();
    vs.len()
}

fn deficient(h: &Hypergraph, set: &[usize]) -> bool {
    set.len() >= 2 && span(h, set) <= set.len() * (h.k() - 1)
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        for mut rest in subsets(&items[i + 1..], size - 1) {
            rest.insert(0, items[i]);
            out.push(rest);
        }
    }
    out
}

/// Counts, for i = 2..=4, the i-edge sets spanning at most i(k−1) vertices
/// that contain no smaller such set, and the union of their vertices.
pub fn minimal_deficient(h: &Hypergraph) -> ([u64; 5], Vec<VertexId>) {
    let all: Vec<usize> = (0..h.m()).collect();
    let mut counts = [0u64; 5];
    let mut verts: Vec<VertexId> = Vec::new();
    for (i, count) in counts.iter_mut().enumerate().skip(2) {
        for set in subsets(&all, i) {
            if !deficient(h, &set) {
                continue;
            }
            let minimal = (2..i).all(|j| subsets(&set, j).iter().all(|s| !deficient(h, s)));
            if minimal {
                *count += 1;
                verts.extend(set.iter().flat_map(|&e| h.edge(e as u32).iter().copied()));
            }
        }
    }
    verts.sort_unstable();
    verts.dedup();
    (counts, verts)
}

/// max over non-empty vertex sets S of the minimum degree of H[S].
pub fn degeneracy_oracle(h: &Hypergraph) -> usize {
    let n = h.n();
    assert!(n <= 20, "exponential oracle");
    let masks: Vec<u32> = h.edges().map(|e| e.iter().fold(0u32, |m, &v| m | 1 << v)).collect();
    let mut best = 0;
    for s in 1u32..(1 << n) {
        let min_deg = (0..n)
            .filter(|&v| s >> v & 1 == 1)
            .map(|v| masks.iter().filter(|&&m| m & s == m && m >> v & 1 == 1).count())
            .min()
            .unwrap_or(0);
        best = best.max(min_deg);
    }
    best
}

/// One step of the schedule, evaluated with 256-bit floats.
#[derive(Clone, Debug)]
pub struct ExactRecord {
    pub l: f64,
    pub t: Vec<f64>,
    pub keep: f64,
    pub lp: f64,
    pub tp: Vec<f64>,
}

const P: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

struct Ctx {
    cc: Consts,
}

impl Ctx {
    fn f(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, P)
    }

    fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(P, RM, &mut self.cc)
    }

    fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(P, RM, &mut self.cc)
    }

    fn pow(&mut self, x: &BigFloat, y: f64) -> BigFloat {
        let y = self.f(y);
        x.pow(&y, P, RM, &mut self.cc)
    }
}

fn to_f64(x: &BigFloat) -> f64 {
    format!("{x}").parse().expect("decimal rendering")
}

fn choose(n: usize, r: usize) -> f64 {
    let mut c = 1u64;
    for i in 0..r {
        c = c * (n - i) as u64 / (i + 1) as u64;
    }
    c as f64
}

/// Iterates the list-size / conflict recursions and their error-free
/// companions from L_1 = (1+δ)(Δ/ln Δ)^{1/(k−1)}, T_{1,k−1} = Δ, returning
/// records 1..=steps+1 (fewer if L stops being positive).
pub fn exact_schedule(k: usize, delta_max: f64, epsilon: f64, alpha: f64, steps: usize) -> Vec<ExactRecord> {
    let mut c = Ctx { cc: Consts::new().expect("constants") };
    let one = c.f(1.0);
    let a = c.f(alpha);
    let dm = c.f(delta_max);
    let ln_d = c.ln(&dm);
    let delta = (1.0 + epsilon) * (k - 1) as f64 - 1.0;
    let ratio = dm.div(&ln_d, P, RM);
    let l1 = c.pow(&ratio, 1.0 / (k - 1) as f64).mul(&c.f(1.0 + delta), P, RM);
    let mut l = l1.clone();
    let mut lp = l1;
    let mut t: Vec<BigFloat> = (1..k).map(|r| if r == k - 1 { dm.clone() } else { c.f(0.0) }).collect();
    let mut tp = t.clone();
    let mut out = Vec::new();
    for step in 0..=steps {
        // Keep = exp(Σ_r T_r ln(1 − (α/L)^r)).
        let x = a.div(&l, P, RM);
        let mut log_keep = c.f(0.0);
        for (ri, tr) in t.iter().enumerate() {
            let xr = x.powi(ri + 1, P, RM);
            let term = c.ln(&one.sub(&xr, P, RM)).mul(tr, P, RM);
            log_keep = log_keep.add(&term, P, RM);
        }
        let keep = c.exp(&log_keep);
        out.push(ExactRecord {
            l: to_f64(&l),
            t: t.iter().map(to_f64).collect(),
            keep: to_f64(&keep),
            lp: to_f64(&lp),
            tp: tp.iter().map(to_f64).collect(),
        });
        if step == steps {
            break;
        }
        let two_thirds = 2.0 / 3.0;
        let next_l = l.mul(&keep, P, RM).sub(&c.pow(&l, two_thirds), P, RM);
        let next_lp = lp.mul(&keep, P, RM);
        // S = Σ_ℓ T_ℓ / (L^{2ℓ} (ln Δ)^{2ℓ}).
        let l_ln = l.mul(&ln_d, P, RM);
        let mut s = c.f(0.0);
        for (li, tl) in t.iter().enumerate() {
            s = s.add(&tl.div(&l_ln.powi(2 * (li + 1), P, RM), P, RM), P, RM);
        }
        let kk = keep.mul(&one.sub(&a.mul(&keep, P, RM), P, RM), P, RM);
        let ak = a.mul(&keep, P, RM);
        let mut next_t = Vec::new();
        let mut next_tp = Vec::new();
        for r in 1..k {
            let mut main = c.f(0.0);
            let mut main_p = c.f(0.0);
            let mut inner = c.f(0.0);
            for j in r..k {
                let cj = c.f(choose(j, r));
                let head = cj.mul(&kk.powi(r, P, RM), P, RM);
                let tail = ak.div(&l, P, RM).powi(j - r, P, RM);
                main = main.add(&t[j - 1].mul(&head, P, RM).mul(&tail, P, RM), P, RM);
                let tail_p = ak.div(&lp, P, RM).powi(j - r, P, RM);
                main_p = main_p.add(&tp[j - 1].mul(&head, P, RM).mul(&tail_p, P, RM), P, RM);
                let in_term = cj.mul(&a.powi(j - r, P, RM), P, RM).mul(&t[j - 1], P, RM).div(&l.powi(j - r, P, RM), P, RM);
                inner = inner.add(&in_term, P, RM);
            }
            // 4 k^{2(k−r)} α (L/α)^r ln Δ · S
            let coef = c.f(4.0 * (k as f64).powi(2 * (k - r) as i32));
            let err = coef
                .mul(&a, P, RM)
                .mul(&l.div(&a, P, RM).powi(r, P, RM), P, RM)
                .mul(&ln_d, P, RM)
                .mul(&s, P, RM);
            let inner_pow = if to_f64(&inner) == 0.0 { c.f(0.0) } else { c.pow(&inner, two_thirds) };
            next_t.push(main.add(&err, P, RM).add(&inner_pow, P, RM));
            next_tp.push(main_p.add(&err, P, RM));
        }
        if to_f64(&next_l) <= 0.0 {
            break;
        }
        l = next_l;
        lp = next_lp;
        t = next_t;
        tp = next_tp;
    }
    out
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Random 3-uniform hypergraph on 300 vertices with maximum degree 4; with
/// lists [0, 8) every final-phase event has μ = 1/512.
pub fn bounded_degree_instance(seed: u64) -> Hypergraph {
    let mut rng = hgcolor::rng::seeded(seed);
    let n = 300;
    let mut deg = vec![0usize; n];
    let mut edges: Vec<Vec<u64>> = Vec::new();
    for _ in 0..20_000 {
        if edges.len() == 350 {
            break;
        }
        let mut e: Vec<u64> = Vec::new();
        while e.len() < 3 {
            let v = rng.random_range(0..n as u64);
            if !e.contains(&v) {
                e.push(v);
            }
        }
        e.sort_unstable();
        if e.iter().all(|&v| deg[v as usize] < 4) && !edges.contains(&e) {
            for &v in &e {
                deg[v as usize] += 1;
            }
            edges.push(e);
        }
    }
    Hypergraph::build(3, n, &edges).expect("valid edges")
}
