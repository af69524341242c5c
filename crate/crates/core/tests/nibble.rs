mod oracles;

use hgcolor::nibble::{estimate_keep, KeepGadget, MtLimits, NibbleState, Targets};
use hgcolor::randgen::girth5_greedy;
use hgcolor::rng::seeded;
use hgcolor::{Color, Exec, Hypergraph, VertexId};
use rand::Rng as _;

fn lists(n: usize, q: usize) -> Vec<Vec<Color>> {
    vec![(0..q as Color).collect(); n]
}

/// Real-edge conflicts of (v, c) with r other uncolored vertices, by definition.
fn brute_t(state: &NibbleState<'_>, v: VertexId, c: Color, r: usize) -> u64 {
    let h = state.base();
    h.incident(v)
        .iter()
        .filter(|&&e| {
            let others: Vec<VertexId> = h.edge(e).iter().copied().filter(|&u| u != v).collect();
            let unc: Vec<VertexId> = others.iter().copied().filter(|&u| state.is_uncolored(u)).collect();
            unc.len() == r
                && others.iter().all(|&u| state.phi()[u as usize].is_none_or(|x| x == c))
                && unc.iter().all(|&u| state.list(u).contains(&c))
        })
        .count() as u64
}

/// A partially colored state whose coloring is proper.
fn partial_state(h: &Hypergraph, q: usize, seed: u64) -> NibbleState<'_> {
    let mut rng = seeded(seed);
    let mut phi: Vec<Option<Color>> = vec![None; h.n()];
    for v in 0..h.n() {
        if rng.random_bool(0.3) {
            phi[v] = Some(rng.random_range(0..q as Color));
            let bad = h.incident(v as VertexId).iter().any(|&e| {
                let c = phi[h.edge(e)[0] as usize];
                c.is_some() && h.edge(e).iter().all(|&u| phi[u as usize] == c)
            });
            if bad {
                phi[v] = None;
            }
        }
    }
    let mut l = lists(h.n(), q);
    for list in &mut l {
        list.retain(|_| rng.random_bool(0.8));
        if list.is_empty() {
            list.push(0);
        }
    }
    NibbleState::with_partial(h, l, phi, seed).unwrap()
}

#[test]
fn equalize_pads_every_count_to_the_target() {
    let mut rng = seeded(31);
    for trial in 0..20 {
        let k = 2 + trial % 2;
        let h = oracles::random_instance(&mut rng, k, 30, 45);
        let mut state = partial_state(&h, 6, trial as u64);
        let ext = state.current_extremes().unwrap();
        for v in state.uncolored() {
            for &c in state.list(v) {
                for r in 1..k {
                    assert!(brute_t(&state, v, c, r) <= ext.t_next[r - 1]);
                }
            }
        }
        let rep = state.equalize(ext.l_next, &ext.t_next).unwrap();
        let idx = state.conflict_index();
        let mut padded = 0;
        for v in state.uncolored() {
            assert_eq!(state.list(v).len(), ext.l_next);
            for &c in state.list(v) {
                for r in 1..k {
                    assert_eq!(idx.t(v, c, r), ext.t_next[r - 1], "trial {trial} v={v} c={c} r={r}");
                    padded += ext.t_next[r - 1] - brute_t(&state, v, c, r);
                }
            }
        }
        assert_eq!(padded as usize, rep.dummy_edges);
    }
}

#[test]
fn equalize_rejects_unreachable_targets() {
    let h = Hypergraph::build(2, 3, &[[0u64, 1], [1, 2]]).unwrap();
    let mut state = NibbleState::new(&h, lists(3, 4), 0).unwrap();
    assert!(state.equalize(5, &[2]).is_err());
    assert!(state.equalize(4, &[1]).is_err());
    assert!(state.equalize(4, &[2]).is_ok());
}

#[test]
fn availability_matches_definition() {
    let mut rng = seeded(32);
    for trial in 0..30 {
        let k = 2 + trial % 3;
        let h = oracles::random_instance(&mut rng, k, 25, 40);
        let mut state = partial_state(&h, 4, trial as u64);
        let prop = state.sample(0.6);
        for v in state.uncolored() {
            for &c in state.list(v) {
                let blocked = h.incident(v).iter().any(|&e| {
                    h.edge(e).iter().filter(|&&u| u != v).all(|&u| match state.phi()[u as usize] {
                        Some(x) => x == c,
                        None => prop.active[u as usize] && prop.color[u as usize] == c,
                    })
                });
                assert_eq!(state.available(&prop, v, c), !blocked, "trial {trial} v={v} c={c}");
            }
            let want: Vec<Color> = state.list(v).iter().copied().filter(|&c| state.available(&prop, v, c)).collect();
            assert_eq!(state.available_list(&prop, v), want);
        }
    }
}

fn girth5(seed: u64) -> Hypergraph {
    girth5_greedy(3, 600, 800, 5, 200_000, seed).unwrap()
}

#[test]
fn rounds_are_deterministic() {
    let h = girth5(1);
    let run = |seed| {
        let mut s = NibbleState::new(&h, lists(h.n(), 12), seed).unwrap();
        let t = s.pilot_targets(0.2, 4, 1.0).unwrap();
        let out = s.moser_tardos_iterate(0.2, &t, &MtLimits::default()).unwrap();
        (out, s.into_parts())
    };
    assert_eq!(run(7), run(7));
    assert_ne!(run(7).1, run(8).1);
}

#[test]
fn certified_rounds_avoid_every_bad_event() {
    let h = girth5(2);
    let mut certified = 0;
    for seed in 0..6 {
        let mut state = NibbleState::new(&h, lists(h.n(), 12), seed).unwrap();
        let ext = state.current_extremes().unwrap();
        state.equalize(ext.l_next, &ext.t_next).unwrap();
        let targets = state.pilot_targets(0.2, 8, 1.0).unwrap_or(Targets { l_next: 0, t_next: vec![u64::MAX; 2] });
        let before = state.clone();
        let limits = MtLimits { keep_proposal: true, budget: Some(20_000), ..MtLimits::default() };
        let out = state.moser_tardos_iterate(0.2, &targets, &limits).unwrap();
        let prop = out.proposal.clone().unwrap();
        let events = before.evaluate_bad_events(&prop, &targets);
        assert_eq!(events.is_empty(), out.certified, "seed {seed}");
        certified += usize::from(out.certified);
        assert!(state.phi_is_proper());
        for v in 0..h.n() as VertexId {
            if let Some(c) = state.phi()[v as usize] {
                if before.is_uncolored(v) {
                    assert!(prop.active[v as usize] && prop.color[v as usize] == c);
                    assert!(before.list(v).contains(&c));
                }
            } else {
                assert!(state.list(v).iter().all(|c| before.list(v).contains(c)));
                assert_eq!(state.list(v), before.available_list(&prop, v).as_slice());
            }
        }
        if out.certified {
            for v in state.uncolored() {
                assert!(state.list(v).len() >= targets.l_next);
            }
        }
    }
    assert!(certified > 0);
}

#[test]
fn scope_of_a_list_event_is_the_closed_neighborhood() {
    let h = girth5(3);
    let state = NibbleState::new(&h, lists(h.n(), 6), 0).unwrap();
    let v: VertexId = (0..h.n() as VertexId).find(|&v| h.degree(v) > 0).unwrap();
    let (real, dummies) = state.event_scope(&hgcolor::nibble::BadEvent::ListDepletion { v }, 2);
    let mut want = h.neighbors(v);
    want.push(v);
    want.sort_unstable();
    assert_eq!(real, want);
    assert!(dummies.is_empty());
}

#[test]
fn keep_without_conflicts_is_one() {
    let g = KeepGadget { k: 3, l: 5, t: vec![0, 0], alpha: 0.3, star_edges: 4 };
    let est = estimate_keep(&g, 2_000, 1, Exec::Sequential).unwrap();
    assert_eq!(est.analytic, 1.0);
    assert_eq!(est.estimate, 1.0);
    assert_eq!(est.mean_list, 5.0);
}

#[test]
fn keep_gadget_matches_closed_form() {
    let g = KeepGadget { k: 2, l: 10, t: vec![40], alpha: 0.5, star_edges: 4 };
    let est = estimate_keep(&g, 40_000, 3, Exec::Parallel).unwrap();
    assert!((est.analytic - 0.95f64.powi(40)).abs() < 1e-15);
    assert!(est.z.abs() <= 4.0, "{est:?}");
    assert!(est.list_z.abs() <= 4.0, "{est:?}");
    let seq = estimate_keep(&g, 40_000, 3, Exec::Sequential).unwrap();
    assert_eq!(est, seq);
}

#[test]
fn keep_domain_is_enforced() {
    let g = KeepGadget { k: 2, l: 1, t: vec![3], alpha: 1.0, star_edges: 1 };
    assert!(estimate_keep(&g, 10, 0, Exec::Sequential).is_err());
}
