mod oracles;

use hgcolor::schedule::{check_bounds, keep, run_to_stop, step, BoundFamily, Record, ScheduleParams};

const CASES: [(usize, f64); 4] = [(2, 1e6), (2, 1e12), (3, 1e6), (3, 1e12)];

fn trajectory(params: &ScheduleParams, steps: usize) -> Vec<Record> {
    let mut recs = vec![Record::first(params).unwrap()];
    while recs.len() <= steps {
        match step(params, recs.last().unwrap()) {
            Ok(r) => recs.push(r),
            Err(_) => break,
        }
    }
    recs
}

fn assert_close(what: &str, got: f64, want: f64) {
    let e = oracles::rel_err(got, want);
    assert!(e <= 1e-9, "{what}: got {got:e}, want {want:e}, rel {e:e}");
}

#[test]
fn step_matches_high_precision_recursion() {
    for (k, dm) in CASES {
        let params = ScheduleParams::theory(k, dm, 0.1).unwrap();
        let steps = 60;
        let want = oracles::exact_schedule(k, dm, 0.1, params.alpha, steps);
        let got = trajectory(&params, steps);
        assert_eq!(got.len(), want.len(), "k={k} Δ={dm:e}");
        for (g, w) in got.iter().zip(&want) {
            let at = format!("k={k} Δ={dm:e} i={}", g.i);
            assert_close(&format!("{at} L"), g.l, w.l);
            assert_close(&format!("{at} L'"), g.lp, w.lp);
            assert_close(&format!("{at} Keep"), g.keep, w.keep);
            for r in 0..k - 1 {
                assert_close(&format!("{at} T_{}", r + 1), g.t[r], w.t[r]);
                assert_close(&format!("{at} T'_{}", r + 1), g.tp[r], w.tp[r]);
            }
        }
    }
}

#[test]
fn practical_alpha_matches_too() {
    let params = ScheduleParams::practical(3, 1e6, 0.1, 0.05).unwrap();
    let want = oracles::exact_schedule(3, 1e6, 0.1, 0.05, 200);
    let got = trajectory(&params, 200);
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        assert_close("L", g.l, w.l);
        assert_close("T_2", g.t[1], w.t[1]);
        assert_close("T_1", g.t[0], w.t[0]);
    }
}

#[test]
fn k2_first_step_by_hand() {
    // With k = 2 there is one conflict size: T_{i+1} = T·Keep(1−α Keep)
    // + 16α(L/α)·lnΔ·T/(L lnΔ)² + T^{2/3}, Keep = (1 − α/L)^T.
    let params = ScheduleParams::theory(2, 1e6, 0.1).unwrap();
    let r1 = Record::first(&params).unwrap();
    let (a, ln) = (params.alpha, 1e6f64.ln());
    let l = 1.1 * 1e6 / ln;
    assert_close("L1", r1.l, l);
    let kp = (1.0 - a / l).powf(1e6);
    assert_close("Keep1", r1.keep, kp);
    let r2 = step(&params, &r1).unwrap();
    assert_close("L2", r2.l, l * kp - l.powf(2.0 / 3.0));
    let s = 1e6 / (l * ln).powi(2);
    let t2 = 1e6 * kp * (1.0 - a * kp) + 16.0 * a * (l / a) * ln * s + 1e6f64.powf(2.0 / 3.0);
    assert_close("T2", r2.t[0], t2);
    assert_close("T'2", r2.tp[0], 1e6 * kp * (1.0 - a * kp) + 16.0 * a * (l / a) * ln * s);
}

#[test]
fn keep_is_a_product_of_survival_factors() {
    let params = ScheduleParams::practical(3, 100.0, 0.1, 0.5).unwrap();
    let got = keep(&params, 10.0, &[3.0, 7.0]).unwrap();
    assert_close("keep", got, 0.95f64.powi(3) * 0.9975f64.powi(7));
    assert!(keep(&params, 0.4, &[1.0, 1.0]).is_err());
}

#[test]
fn ratio_and_keep_bounds_hold_where_applicable() {
    for (k, dm) in CASES {
        let params = ScheduleParams::theory(k, dm, 0.1).unwrap();
        let traj = run_to_stop(&params, params.default_max_iters()).unwrap();
        let rep = check_bounds(&traj, &params);
        assert!(rep.applicable(BoundFamily::RatioBound) > 0);
        // The size floor (ln Δ)^{20(k−1)} exceeds L at these Δ, so the
        // Keep band has no applicable iteration.
        assert_eq!(rep.applicable(BoundFamily::KeepBand), 0);
        for f in [BoundFamily::RatioBound, BoundFamily::KeepBand] {
            assert!(rep.passes(f), "k={k} Δ={dm:e} {f:?}: {:?}", rep.family(f).find(|c| !c.pass));
        }
    }
}

#[test]
fn every_family_holds_once_the_floors_do() {
    for (k, dm) in [(2, 1e60), (3, 1e250)] {
        let params = ScheduleParams::theory(k, dm, 0.1).unwrap();
        let traj = run_to_stop(&params, params.default_max_iters()).unwrap();
        let rep = check_bounds(&traj, &params);
        for f in [
            BoundFamily::RatioBound,
            BoundFamily::KeepBand,
            BoundFamily::PrimedRatioDecay,
            BoundFamily::PrimedListGap,
            BoundFamily::PrimedConflictGap,
        ] {
            assert!(rep.applicable(f) > 1000, "k={k} {f:?}");
            assert!(rep.passes(f), "k={k} {f:?}: {:?}", rep.family(f).find(|c| !c.pass));
        }
    }
}

#[test]
fn inflated_conflicts_break_the_ratio_bound() {
    let params = ScheduleParams::theory(2, 1e6, 0.1).unwrap();
    let mut traj = run_to_stop(&params, params.default_max_iters()).unwrap();
    for rec in &mut traj.records {
        for r in 0..rec.t.len() {
            rec.t[r] *= 1e6;
            rec.r[r] *= 1e6;
        }
    }
    let rep = check_bounds(&traj, &params);
    assert!(!rep.passes(BoundFamily::RatioBound));
}

#[test]
fn trajectory_csv_has_one_row_per_record() {
    let params = ScheduleParams::theory(3, 1e6, 0.1).unwrap();
    let traj = run_to_stop(&params, 10).unwrap();
    assert_eq!(traj.to_csv().lines().count(), traj.records.len() + 1);
}
