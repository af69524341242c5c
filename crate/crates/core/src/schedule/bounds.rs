//! Numeric evaluation of the closed-form bounds along a trajectory.
//!
//! A check is emitted only at iterations where the hypotheses of the
//! corresponding statement hold numerically; at desk-scale Δ the size floors
//! fail from i = 2 on, so most families are only checkable at i ≤ 2.

use serde::{Deserialize, Serialize};

use super::{Record, ScheduleParams, ScheduleTrajectory};

/// Relative slack for comparisons that hold with equality in exact arithmetic.
const REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFamily {
    /// R_{i,r} ≤ k^{2(k−1−r)} ln Δ.
    RatioBound,
    /// C ≤ Keep_i ≤ 1 − K^{k−1}/(12k²(ln Δ)^{k−1}).
    KeepBand,
    /// Geometric decay bound on R'_{i,r}.
    PrimedRatioDecay,
    /// |L_i − L'_i| ≤ (L'_i)^{5/6}.
    PrimedListGap,
    /// |T_{i,r} − T'_{i,r}| ≤ (T'_{i,r})^{100r/(100r+1)}.
    PrimedConflictGap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub family: BoundFamily,
    pub i: usize,
    pub r: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// rhs − lhs, negative on failure.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn family(&self, f: BoundFamily) -> impl Iterator<Item = &BoundCheck> + '_ {
        self.checks.iter().filter(move |c| c.family == f)
    }

    /// Every applicable check of the family passes (vacuously true if none apply).
    pub fn passes(&self, f: BoundFamily) -> bool {
        self.family(f).all(|c| c.pass)
    }

    pub fn applicable(&self, f: BoundFamily) -> usize {
        self.family(f).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> + '_ {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + REL_TOL * rhs.abs()
}

fn check(family: BoundFamily, i: usize, r: Option<usize>, lhs: f64, rhs: f64) -> BoundCheck {
    BoundCheck { family, i, r, lhs, rhs, pass: le(lhs, rhs), margin: rhs - lhs }
}

fn floors_hold(p: &ScheduleParams, rec: &Record) -> bool {
    let f = p.floor();
    rec.l >= f && rec.t.iter().all(|&t| t >= f)
}

pub fn check_bounds(traj: &ScheduleTrajectory, params: &ScheduleParams) -> BoundReport {
    let p = params;
    let k = p.k;
    let kf = k as f64;
    let ln = p.ln_delta();
    let mut checks = Vec::new();
    // All 1 < j < i satisfy the floors (and, for the primed gaps, the
    // conflict-size condition) as long as these flags stay true.
    let mut prefix_floors = true;
    let mut prefix_gap = true;
    for rec in &traj.records {
        let i = rec.i;
        if prefix_floors {
            for r in 1..k {
                let rhs = kf.powi(2 * (k - 1 - r) as i32) * ln;
                checks.push(check(BoundFamily::RatioBound, i, Some(r), rec.r[r - 1], rhs));
            }
            for r in 1..k {
                let decay = (1.0 - p.alpha * p.c_lower).powi((r * (i - 1)) as i32);
                let prod: f64 = (r..=k - 2).map(|q| (q + 1) as f64).product();
                let rhs = decay * ln * (1.0 + p.delta / kf.powi(100)).powi((k - 1 - r) as i32)
                    / ((1.0 + p.delta - p.delta / kf.powi(99)).powi(k as i32 - 1)
                        * p.c_lower.powi((k - 1 - r) as i32))
                    * prod;
                checks.push(check(BoundFamily::PrimedRatioDecay, i, Some(r), rec.rp[r - 1], rhs));
            }
        }
        if prefix_gap {
            checks.push(check(BoundFamily::PrimedListGap, i, None, (rec.l - rec.lp).abs(), rec.lp.powf(5.0 / 6.0)));
            for r in 1..k {
                let e = 100.0 * r as f64 / (100.0 * r as f64 + 1.0);
                let (t, tp) = (rec.t[r - 1], rec.tp[r - 1]);
                checks.push(check(BoundFamily::PrimedConflictGap, i, Some(r), (t - tp).abs(), tp.max(0.0).powf(e)));
            }
        }
        if floors_hold(p, rec) && rec.r[k - 2] >= 1.0 / (10.0 * kf * kf) {
            checks.push(check(BoundFamily::KeepBand, i, None, p.c_lower, rec.keep));
            let upper = 1.0 - p.big_k.powi(k as i32 - 1) / (12.0 * kf * kf * ln.powi(k as i32 - 1));
            checks.push(check(BoundFamily::KeepBand, i, None, rec.keep, upper));
        }
        if i > 1 {
            let ok = floors_hold(p, rec);
            prefix_floors &= ok;
            prefix_gap &= ok && rec.t[k - 2] >= rec.l.powi(k as i32 - 1) / (10.0 * kf * kf);
        }
    }
    BoundReport { checks }
}
