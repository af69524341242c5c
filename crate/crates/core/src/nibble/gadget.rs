//! Monte Carlo check of the survival probability of one color at the center
//! of a small equalized star.

use serde::{Deserialize, Serialize};

use super::NibbleState;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hypergraph::{Color, Hypergraph, VertexId};
use crate::rng::{derive, seeded};
use crate::schedule::keep_raw;

const CHUNKS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeepGadget {
    pub k: usize,
    pub l: usize,
    /// Target conflict counts, indexed by r − 1.
    pub t: Vec<u64>,
    pub alpha: f64,
    /// Real edges of the star at the center (capped by T_{k−1}); the rest is dummy padding.
    pub star_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeepEstimate {
    pub trials: u64,
    pub analytic: f64,
    /// Fraction of trials in which the smallest color of the center survived.
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
    /// ℓ_i(v)·Keep_i.
    pub expected_list: f64,
    pub mean_list: f64,
    pub list_std_error: f64,
    pub list_z: f64,
}

impl KeepGadget {
    /// Builds the star (center 0, disjoint petals) with lists [0, L) and
    /// equalizes it to exactly (L, T).
    pub fn build(&self) -> Result<(Hypergraph, Vec<Vec<Color>>)> {
        if self.k < 2 || self.t.len() != self.k - 1 {
            return Err(Error::InvalidParam(format!("need k >= 2 and {} conflict targets", self.k.saturating_sub(1))));
        }
        if self.l == 0 {
            return Err(Error::InvalidParam("L must be positive".into()));
        }
        let petals = self.star_edges.min(self.t[self.k - 2] as usize);
        let n = 1 + petals * (self.k - 1);
        let raw: Vec<Vec<u64>> = (0..petals)
            .map(|j| {
                let mut e = vec![0u64];
                e.extend((0..self.k - 1).map(|x| (1 + j * (self.k - 1) + x) as u64));
                e
            })
            .collect();
        let h = Hypergraph::build(self.k, n, &raw)?;
        Ok((h, vec![(0..self.l as Color).collect(); n]))
    }
}

/// Estimates Pr[c survives at the center] and E[ℓ_{i+1}(center)] from
/// `trials` independent proposals (no resampling), comparing with Keep.
pub fn estimate_keep(g: &KeepGadget, trials: u64, seed: u64, exec: Exec) -> Result<KeepEstimate> {
    let analytic = keep_raw(g.alpha, g.l as f64, &g.t.iter().map(|&t| t as f64).collect::<Vec<_>>())?;
    if !(g.alpha >= 0.0 && g.alpha <= 1.0) {
        return Err(Error::InvalidParam(format!("alpha = {} outside [0, 1]", g.alpha)));
    }
    if trials == 0 {
        return Err(Error::InvalidParam("trials must be positive".into()));
    }
    let (h, lists) = g.build()?;
    let mut state = NibbleState::new(&h, lists, seed)?;
    state.equalize(g.l, &g.t)?;
    let center: VertexId = 0;
    let c0 = state.list(center)[0];
    let real = state.ball(&[center], 1, &mut super::mt::Marks::new(h.n()));
    let real: Vec<VertexId> = real.into_iter().filter(|&u| u != center).collect();
    let dummies = state.owned_dummies(&[center]);
    let state = &state;
    let parts = exec.map(CHUNKS, |chunk| {
        let n_here = trials / CHUNKS as u64 + u64::from((chunk as u64) < trials % CHUNKS as u64);
        let mut rng = seeded(derive(seed, chunk as u64 + 1));
        let mut prop = state.sample_with(g.alpha, &mut rng);
        let (mut hits, mut sum, mut sumsq) = (0u64, 0f64, 0f64);
        for _ in 0..n_here {
            state.resample_with(&mut prop, g.alpha, &real, &dummies, &mut rng);
            let avail = state.available_list(&prop, center);
            hits += u64::from(avail.first() == Some(&c0));
            let len = avail.len() as f64;
            sum += len;
            sumsq += len * len;
        }
        (hits, sum, sumsq)
    });
    let (hits, sum, sumsq) = parts
        .into_iter()
        .fold((0u64, 0f64, 0f64), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let nt = trials as f64;
    let estimate = hits as f64 / nt;
    let std_error = (analytic * (1.0 - analytic) / nt).sqrt();
    let z = if std_error > 0.0 { (estimate - analytic) / std_error } else if estimate == analytic { 0.0 } else { f64::INFINITY };
    let mean_list = sum / nt;
    let var = (sumsq / nt - mean_list * mean_list).max(0.0) * nt / (nt - 1.0).max(1.0);
    let list_std_error = (var / nt).sqrt();
    let expected_list = g.l as f64 * analytic;
    let list_z = if list_std_error > 0.0 {
        (mean_list - expected_list) / list_std_error
    } else if (mean_list - expected_list).abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(KeepEstimate { trials, analytic, estimate, std_error, z, expected_list, mean_list, list_std_error, list_z })
}
