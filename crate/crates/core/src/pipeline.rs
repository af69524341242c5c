//! End-to-end drivers: the nibble followed by the final phase on girth-5
//! inputs, and the decompose / greedy / nibble pipeline for random inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finisher::{final_phase, greedy_degenerate, lll_certificate, CertReport, FinalPhaseInstance, GreedyRule};
use crate::hypergraph::{degeneracy, short_cycles, verify, Color, Coloring, Hypergraph, ListAssignment, VerifyReport, VertexId};
use crate::nibble::{IterationOutcome, MtLimits, NibbleState, Targets};
use crate::randgen::{decompose, Decomposition, ThresholdMode};
use crate::rng::{derive, seeded};
use crate::schedule::{run_to_stop, HaltReason, Mode, ScheduleParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorConfig {
    pub mode: Mode,
    pub epsilon: f64,
    /// Activation probability in practical mode.
    pub alpha: f64,
    pub seed: u64,
    pub mt: MtLimits,
    pub final_budget: Option<u64>,
    pub max_iters: usize,
    /// Unresampled proposals used to set each round's practical targets.
    pub pilots: usize,
    /// Expected violations per event kind allowed by the practical targets.
    pub slack: f64,
    /// Stop the nibble once the smallest list drops below this.
    pub min_list: usize,
    /// Overrides the list size derived from the degree.
    pub q: Option<usize>,
    pub threshold_mode: ThresholdMode,
}

impl Default for ColorConfig {
    fn default() -> Self {
        ColorConfig {
            mode: Mode::Practical,
            epsilon: 0.1,
            alpha: 0.2,
            seed: 0,
            mt: MtLimits { budget: Some(5_000), ..MtLimits::default() },
            final_budget: Some(1_000_000),
            max_iters: 200,
            pilots: 8,
            slack: 1.0,
            min_list: 2,
            q: None,
            threshold_mode: ThresholdMode::Definition,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NibbleRun {
    pub iterations: Vec<IterationOutcome>,
    /// Why the nibble loop ended.
    pub halt: String,
    pub certificate: Option<CertReport>,
    pub final_resamples: u64,
}

impl NibbleRun {
    /// `i |V_i| L_target resamples certified`, one line per accepted iteration.
    pub fn trace_lines(&self) -> Vec<String> {
        self.iterations
            .iter()
            .map(|o| format!("{} {} {} {} {}", o.iteration, o.uncolored_before, o.l_target, o.resamples, o.certified))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorReport {
    pub q: usize,
    pub coloring: Coloring,
    pub verify: VerifyReport,
    pub run: NibbleRun,
    pub decomposition: Option<Decomposition>,
    /// Colors forbidden to V∖U vertices by their U-neighbors, summed.
    pub forbidden_total: usize,
}

/// q = ⌈(1+ε)(k−1)(Δ/ln Δ)^{1/(k−1)}⌉ with Δ clamped to at least 3 so the
/// logarithm exceeds one; 1 for edgeless inputs.
pub fn girth5_list_size(h: &Hypergraph, epsilon: f64) -> usize {
    if h.m() == 0 {
        return 1;
    }
    let k = h.k();
    let delta = h.max_degree().max(3) as f64;
    ((1.0 + epsilon) * (k - 1) as f64 * (delta / delta.ln()).powf(1.0 / (k - 1) as f64)).ceil() as usize
}

/// q = ⌈(1+4δ)(k−1)(d/ln d)^{1/(k−1)}⌉.
pub fn random_list_size(k: usize, d: f64, delta: f64) -> usize {
    ((1.0 + 4.0 * delta) * (k - 1) as f64 * (d / d.ln()).powf(1.0 / (k - 1) as f64)).ceil() as usize
}

/// Refuses inputs with a 2-, 3- or 4-cycle, reporting the first witness.
pub fn check_girth5(h: &Hypergraph) -> Result<()> {
    let rep = short_cycles(h, 4, 1);
    match rep.first_witness() {
        Some((len, edges)) => Err(Error::GirthViolation { len, edges: edges.to_vec() }),
        None => Ok(()),
    }
}

/// Colors a girth-5 hypergraph from lists [0, q).
pub fn color_girth5(h: &Hypergraph, cfg: &ColorConfig) -> Result<ColorReport> {
    check_girth5(h)?;
    let q = cfg.q.unwrap_or_else(|| girth5_list_size(h, cfg.epsilon));
    let la = ListAssignment::uniform(h.n(), q);
    let (coloring, run) = nibble_then_finish(h, la.lists.clone(), cfg)?;
    let verify = verify(h, &la, &coloring);
    Ok(ColorReport { q, coloring, verify, run, decomposition: None, forbidden_total: 0 })
}

/// Colors an arbitrary hypergraph of average degree d from lists [0, q):
/// greedy on H[U], then the nibble and final phase on H[V∖U] with the
/// colors of U-neighbors removed.
pub fn color_random(h: &Hypergraph, delta: f64, cfg: &ColorConfig) -> Result<ColorReport> {
    let dec = decompose(h, delta, cfg.threshold_mode)?;
    let q = cfg.q.unwrap_or_else(|| random_list_size(h.k(), dec.d, delta));
    let n = h.n();
    let la = ListAssignment::uniform(n, q);
    let inside = dec.membership(n);

    let (hu, old_u) = h.induced(&inside);
    let deg = degeneracy(&hu);
    let lists_u = ListAssignment::uniform(hu.n(), q);
    let col_u = greedy_degenerate(&hu, &lists_u, &deg.order, &vec![Vec::new(); hu.n()], GreedyRule::default())?;
    let mut merged: Vec<Option<Color>> = vec![None; n];
    for (i, &v) in old_u.iter().enumerate() {
        merged[v as usize] = col_u.assignment[i];
    }

    let outside: Vec<bool> = inside.iter().map(|x| !x).collect();
    let (hr, old_r) = h.induced(&outside);
    let mut forbidden_total = 0;
    let lists_r: Vec<Vec<Color>> = old_r
        .iter()
        .map(|&v| {
            let mut forb: Vec<Color> = h.neighbors(v).into_iter().filter_map(|u| merged[u as usize]).collect();
            forb.sort_unstable();
            forb.dedup();
            forbidden_total += forb.len();
            (0..q as Color).filter(|c| forb.binary_search(c).is_err()).collect()
        })
        .collect();
    let run = if hr.n() > 0 {
        let (col_r, run) = nibble_then_finish(&hr, lists_r, cfg)?;
        for (i, &v) in old_r.iter().enumerate() {
            merged[v as usize] = col_r.assignment[i];
        }
        run
    } else {
        NibbleRun { iterations: Vec::new(), halt: "empty".into(), certificate: None, final_resamples: 0 }
    };
    let coloring = Coloring { assignment: merged };
    let verify = verify(h, &la, &coloring);
    Ok(ColorReport { q, coloring, verify, run, decomposition: Some(dec), forbidden_total })
}

/// Runs nibble rounds until the stopping rule, then completes the coloring
/// with the final Moser-Tardos phase.
pub fn nibble_then_finish(h: &Hypergraph, lists: Vec<Vec<Color>>, cfg: &ColorConfig) -> Result<(Coloring, NibbleRun)> {
    let n = h.n();
    if let Some(v) = lists.iter().position(|l| l.is_empty()) {
        return Err(Error::ListExhausted { vertex: v as VertexId, list_len: 0, forbidden: 0, blocked: 0 });
    }
    if h.m() == 0 {
        let assignment = lists.iter().map(|l| l.iter().min().copied()).collect();
        let run = NibbleRun { iterations: Vec::new(), halt: "no-edges".into(), certificate: None, final_resamples: 0 };
        return Ok((Coloring { assignment }, run));
    }
    let mut state = NibbleState::new(h, lists, derive(cfg.seed, 1))?;
    let (iterations, halt) = match cfg.mode {
        Mode::Practical => practical_rounds(&mut state, cfg)?,
        Mode::Theory => theory_rounds(&mut state, cfg)?,
    };
    let (phi, lists) = state.into_parts();
    let inst = FinalPhaseInstance::new(h, phi, lists)?;
    let certificate = lll_certificate(&inst)?;
    let mut rng = seeded(derive(cfg.seed, 2));
    let out = final_phase(&inst, cfg.final_budget, &mut rng, false)?;
    debug_assert_eq!(out.coloring.assignment.len(), n);
    let run = NibbleRun { iterations, halt, certificate: Some(certificate), final_resamples: out.resamples };
    Ok((out.coloring, run))
}

fn certified_now(state: &NibbleState<'_>) -> Result<bool> {
    let inst = FinalPhaseInstance::new(state.base(), state.phi().to_vec(), state.lists().to_vec())?;
    Ok(lll_certificate(&inst)?.certified)
}

fn practical_rounds(state: &mut NibbleState<'_>, cfg: &ColorConfig) -> Result<(Vec<IterationOutcome>, String)> {
    let k = state.base().k();
    let mut out = Vec::new();
    for _ in 0..cfg.max_iters {
        let Some(cur) = state.current_extremes() else {
            return Ok((out, "all-colored".into()));
        };
        if cur.l_next < cfg.min_list {
            return Ok((out, format!("list-floor@{}", state.iteration())));
        }
        let bound = 10.0 * (k * k) as f64;
        let l = cur.l_next as f64;
        if cur.t_next.iter().enumerate().all(|(ri, &t)| t as f64 <= l.powi(ri as i32 + 1) / bound) {
            return Ok((out, format!("stopped@{}", state.iteration())));
        }
        if certified_now(state)? {
            return Ok((out, format!("certified@{}", state.iteration())));
        }
        // A round whose resampling budget runs out is rolled back and the
        // nibble hands over to the final phase from the last certified state.
        let snapshot = state.clone();
        state.equalize(cur.l_next, &cur.t_next)?;
        let targets = state
            .pilot_targets(cfg.alpha, cfg.pilots, cfg.slack)
            .unwrap_or(Targets { l_next: 0, t_next: vec![u64::MAX; k - 1] });
        if targets.l_next < cfg.min_list {
            *state = snapshot;
            return Ok((out, format!("list-floor@{}", state.iteration())));
        }
        let round = state.moser_tardos_iterate(cfg.alpha, &targets, &cfg.mt)?;
        if !round.certified {
            let i = round.iteration;
            *state = snapshot;
            return Ok((out, format!("uncertified@{i}")));
        }
        out.push(round);
    }
    Ok((out, "max-iters".into()))
}

/// Follows the analytic schedule; at any realistic size the floor
/// preconditions fail and the halt is reported instead of coloring.
fn theory_rounds(state: &mut NibbleState<'_>, cfg: &ColorConfig) -> Result<(Vec<IterationOutcome>, String)> {
    let h = state.base();
    let params = ScheduleParams::theory(h.k(), h.max_degree().max(3) as f64, cfg.epsilon)?;
    let traj = run_to_stop(&params, params.default_max_iters())?;
    let i_star = match (&traj.halt_reason, traj.i_star) {
        (HaltReason::Stopped, Some(i)) => i,
        (reason, _) => return Err(Error::TheoryPrecondition(reason.to_string())),
    };
    let mut out = Vec::new();
    for i in 1..=i_star {
        let (Some(cur), Some(next)) = (traj.record(i), traj.record(i + 1)) else { break };
        let cur = Targets::from_record(cur);
        state.equalize(cur.l_next, &cur.t_next)?;
        out.push(state.moser_tardos_iterate(params.alpha, &Targets::from_record(next), &cfg.mt)?);
    }
    Ok((out, format!("schedule-stop@{i_star}")))
}
