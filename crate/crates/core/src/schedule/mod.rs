//! Deterministic trajectories of the list-size and conflict-count targets
//! followed by the nibble, with their error-free ("primed") companions.

mod bounds;

pub use bounds::{check_bounds, BoundCheck, BoundFamily, BoundReport};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Theory,
    Practical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub k: usize,
    pub delta_max: f64,
    pub epsilon: f64,
    /// (1+ε)(k−1) − 1.
    pub delta: f64,
    pub big_k: f64,
    pub alpha: f64,
    /// Lower bound on every Keep_i under the lemma hypotheses.
    pub c_lower: f64,
    pub mode: Mode,
    /// Round L down and T up before each step.
    pub rounding: bool,
}

fn binom(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl ScheduleParams {
    /// K = 1/(100 k^{3k}), α = K / ln Δ.
    pub fn theory(k: usize, delta_max: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.1) {
            return Err(Error::InvalidParam(format!(
                "theory mode needs epsilon in (0, 0.1], got {epsilon}"
            )));
        }
        let big_k = 1.0 / (100.0 * (k as f64).powi(3 * k as i32));
        let alpha = big_k / delta_max.ln();
        Self::assemble(k, delta_max, epsilon, big_k, alpha, Mode::Theory)
    }

    /// Caller-chosen α; K is taken as α ln Δ so that C stays meaningful.
    pub fn practical(k: usize, delta_max: f64, epsilon: f64, alpha: f64) -> Result<Self> {
        if epsilon <= 0.0 {
            return Err(Error::InvalidParam(format!("epsilon must be positive, got {epsilon}")));
        }
        Self::assemble(k, delta_max, epsilon, alpha * delta_max.ln(), alpha, Mode::Practical)
    }

    fn assemble(
        k: usize,
        delta_max: f64,
        epsilon: f64,
        big_k: f64,
        alpha: f64,
        mode: Mode,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParam(format!("k = {k} must be at least 2")));
        }
        if !(delta_max >= 2.0 && delta_max.is_finite()) {
            return Err(Error::InvalidParam(format!("Delta = {delta_max} must be finite and >= 2")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParam(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        let delta = (1.0 + epsilon) * (k - 1) as f64 - 1.0;
        if delta <= 0.0 {
            return Err(Error::InvalidParam(format!("delta = {delta} must be positive")));
        }
        let kf = k as f64;
        let c_lower = (-big_k * kf.powi(2 * (k as i32 - 2)) / (1.0 - delta / (100.0 * kf))).exp();
        if !(c_lower > 0.0 && c_lower < 1.0) {
            return Err(Error::InvalidParam(format!("derived C = {c_lower} outside (0, 1)")));
        }
        Ok(ScheduleParams { k, delta_max, epsilon, delta, big_k, alpha, c_lower, mode, rounding: false })
    }

    pub fn ln_delta(&self) -> f64 {
        self.delta_max.ln()
    }

    /// (ln Δ)^{20(k−1)}, the size floor assumed throughout the analysis.
    pub fn floor(&self) -> f64 {
        self.ln_delta().powi(20 * (self.k as i32 - 1))
    }

    /// L_1 = (1+δ)(Δ/ln Δ)^{1/(k−1)}.
    pub fn initial_l(&self) -> f64 {
        (1.0 + self.delta) * (self.delta_max / self.ln_delta()).powf(1.0 / (self.k - 1) as f64)
    }

    /// ⌈10 ln Δ ln ln Δ⌉, at least 1.
    pub fn default_max_iters(&self) -> usize {
        let l = self.ln_delta();
        let v = (10.0 * l * l.ln()).ceil();
        if v.is_finite() && v >= 1.0 {
            v as usize
        } else {
            1
        }
    }

    /// Stopping target T_r ≤ L^r/(10k²) for every r.
    pub fn stop_reached(&self, l: f64, t: &[f64]) -> bool {
        let bound = 10.0 * (self.k * self.k) as f64;
        t.iter().enumerate().all(|(ri, &tr)| tr <= l.powi(ri as i32 + 1) / bound)
    }
}

/// ∏_r (1 − (α/L)^r)^{T_r}, accumulated in log space.
pub fn keep(params: &ScheduleParams, l: f64, t: &[f64]) -> Result<f64> {
    keep_raw(params.alpha, l, t)
}

pub(crate) fn keep_raw(alpha: f64, l: f64, t: &[f64]) -> Result<f64> {
    if l.is_nan() || l <= 0.0 || alpha >= l {
        return Err(Error::KeepDomain { alpha, l });
    }
    let x = alpha / l;
    let log: f64 = t
        .iter()
        .enumerate()
        .map(|(ri, &tr)| if tr == 0.0 { 0.0 } else { tr * (-x.powi(ri as i32 + 1)).ln_1p() })
        .sum();
    Ok(log.exp())
}

/// One iteration of the schedule. Vectors are indexed by r − 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub i: usize,
    pub l: f64,
    pub t: Vec<f64>,
    pub keep: f64,
    pub lp: f64,
    pub tp: Vec<f64>,
    /// R_{i,r} = T_{i,r}/L_i^r.
    pub r: Vec<f64>,
    pub rp: Vec<f64>,
    /// Σ_ℓ T_{i,ℓ}/(L_i^{2ℓ} (ln Δ)^{2ℓ}).
    pub s: f64,
    /// Y_{i,r} = Σ_{j≥r} T_{i,j}/L_i^j.
    pub y: Vec<f64>,
}

impl Record {
    fn derive(params: &ScheduleParams, i: usize, l: f64, t: Vec<f64>, lp: f64, tp: Vec<f64>) -> Result<Self> {
        let keep = keep(params, l, &t).map_err(|_| Error::Collapse(i))?;
        let ln = params.ln_delta();
        let r: Vec<f64> = t.iter().enumerate().map(|(ri, &x)| x / l.powi(ri as i32 + 1)).collect();
        let rp: Vec<f64> = tp.iter().enumerate().map(|(ri, &x)| x / lp.powi(ri as i32 + 1)).collect();
        let s = t
            .iter()
            .enumerate()
            .map(|(li, &x)| x / (l * ln).powi(2 * (li as i32 + 1)))
            .sum();
        let y = (0..t.len()).map(|ri| r[ri..].iter().sum()).collect();
        Ok(Record { i, l, t, keep, lp, tp, r, rp, s, y })
    }

    pub fn first(params: &ScheduleParams) -> Result<Self> {
        let l = params.initial_l();
        let mut t = vec![0.0; params.k - 1];
        t[params.k - 2] = params.delta_max;
        Record::derive(params, 1, l, t.clone(), l, t)
    }
}

/// Advances a record by one iteration of the L/T recursions, together with
/// the primed recursions (which reuse the unprimed Keep and error term).
pub fn step(params: &ScheduleParams, prev: &Record) -> Result<Record> {
    let k = params.k;
    let a = params.alpha;
    let ln = params.ln_delta();
    let (l, t, kp) = if params.rounding {
        let l = prev.l.floor();
        let t: Vec<f64> = prev.t.iter().map(|x| x.ceil()).collect();
        let kp = keep(params, l, &t).map_err(|_| Error::Collapse(prev.i))?;
        (l, t, kp)
    } else {
        (prev.l, prev.t.clone(), prev.keep)
    };
    let s: f64 = t
        .iter()
        .enumerate()
        .map(|(li, &x)| x / (l * ln).powi(2 * (li as i32 + 1)))
        .sum();
    let base = kp * (1.0 - a * kp);
    let next_l = l * kp - l.powf(2.0 / 3.0);
    let next_lp = prev.lp * kp;
    let mut next_t = vec![0.0; k - 1];
    let mut next_tp = vec![0.0; k - 1];
    for r in 1..k {
        let mut main = 0.0;
        let mut main_p = 0.0;
        let mut inner = 0.0;
        for j in r..k {
            let c = binom(j, r);
            main += t[j - 1] * c * base.powi(r as i32) * (a * kp / l).powi((j - r) as i32);
            main_p += prev.tp[j - 1] * c * base.powi(r as i32) * (a * kp / prev.lp).powi((j - r) as i32);
            inner += c * a.powi((j - r) as i32) * t[j - 1] / l.powi((j - r) as i32);
        }
        let err = 4.0 * (k as f64).powi(2 * (k - r) as i32) * a * (l / a).powi(r as i32) * ln * s;
        next_t[r - 1] = main + err + inner.powf(2.0 / 3.0);
        next_tp[r - 1] = main_p + err;
    }
    if next_l.is_nan() || next_l <= 0.0 {
        return Err(Error::Collapse(prev.i + 1));
    }
    Record::derive(params, prev.i + 1, next_l, next_t, next_lp, next_tp)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HaltReason {
    /// The stopping target holds at i* + 1.
    Stopped,
    PreconditionFailure { iteration: usize, what: String },
    Collapse { iteration: usize },
    MaxIters,
}

impl std::fmt::Display for HaltReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HaltReason::Stopped => write!(f, "stopped"),
            HaltReason::PreconditionFailure { iteration, what } => {
                write!(f, "precondition-failure@{iteration}:{what}")
            }
            HaltReason::Collapse { iteration } => write!(f, "collapse@{iteration}"),
            HaltReason::MaxIters => write!(f, "max-iters"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTrajectory {
    pub records: Vec<Record>,
    pub i_star: Option<usize>,
    pub halt_reason: HaltReason,
}

impl ScheduleTrajectory {
    pub fn record(&self, i: usize) -> Option<&Record> {
        self.records.get(i.checked_sub(1)?)
    }

    pub fn to_csv(&self) -> String {
        let k1 = self.records.first().map_or(0, |r| r.t.len());
        let mut out = String::from("i,L");
        for r in 1..=k1 {
            let _ = write!(out, ",T_{r}");
        }
        out.push_str(",Keep,Lp");
        for r in 1..=k1 {
            let _ = write!(out, ",Tp_{r}");
        }
        for r in 1..=k1 {
            let _ = write!(out, ",R_{r}");
        }
        out.push_str(",halt_reason\n");
        let last = self.records.len().saturating_sub(1);
        for (idx, rec) in self.records.iter().enumerate() {
            let _ = write!(out, "{},{:e}", rec.i, rec.l);
            for x in &rec.t {
                let _ = write!(out, ",{x:e}");
            }
            let _ = write!(out, ",{:e},{:e}", rec.keep, rec.lp);
            for x in rec.tp.iter().chain(&rec.r) {
                let _ = write!(out, ",{x:e}");
            }
            if idx == last {
                let _ = write!(out, ",{}", self.halt_reason);
            } else {
                out.push(',');
            }
            out.push('\n');
        }
        out
    }
}

/// Checks the theory-mode preconditions at record `rec` (i > 1).
fn precondition_failure(params: &ScheduleParams, rec: &Record) -> Option<String> {
    let floor = params.floor();
    if rec.l < floor {
        return Some(format!("L={:e} below floor {:e}", rec.l, floor));
    }
    if let Some((ri, x)) = rec.t.iter().enumerate().find(|(_, &x)| x < floor) {
        return Some(format!("T_{}={:e} below floor {:e}", ri + 1, x, floor));
    }
    let k = params.k;
    let need = rec.l.powi(k as i32 - 1) / (10.0 * (k * k) as f64);
    if rec.t[k - 2] < need {
        return Some(format!("T_{}={:e} below L^(k-1)/(10k^2)={:e}", k - 1, rec.t[k - 2], need));
    }
    None
}

/// Iterates [`step`] until the stopping target, a precondition failure
/// (theory mode only), a collapse, or `max_iters` steps.
pub fn run_to_stop(params: &ScheduleParams, max_iters: usize) -> Result<ScheduleTrajectory> {
    if max_iters == 0 {
        return Err(Error::InvalidParam("max_iters must be at least 1".into()));
    }
    let mut records = vec![Record::first(params)?];
    for _ in 0..max_iters {
        let cur = records.last().expect("non-empty");
        if params.mode == Mode::Theory && cur.i > 1 {
            if let Some(what) = precondition_failure(params, cur) {
                let iteration = cur.i;
                return Ok(ScheduleTrajectory {
                    records,
                    i_star: None,
                    halt_reason: HaltReason::PreconditionFailure { iteration, what },
                });
            }
        }
        let next = match step(params, cur) {
            Ok(r) => r,
            Err(Error::Collapse(iteration)) => {
                return Ok(ScheduleTrajectory { records, i_star: None, halt_reason: HaltReason::Collapse { iteration } });
            }
            Err(e) => return Err(e),
        };
        let (i, stop) = (cur.i, params.stop_reached(next.l, &next.t));
        records.push(next);
        if stop {
            return Ok(ScheduleTrajectory { records, i_star: Some(i), halt_reason: HaltReason::Stopped });
        }
    }
    Ok(ScheduleTrajectory { records, i_star: None, halt_reason: HaltReason::MaxIters })
}
