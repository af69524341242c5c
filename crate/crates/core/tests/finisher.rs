mod oracles;

use hgcolor::finisher::{final_phase, greedy_degenerate, lll_certificate, FinalPhaseInstance, GreedyRule};
use hgcolor::hypergraph::{degeneracy, verify};
use hgcolor::rng::seeded;
use hgcolor::{Color, Error, Hypergraph, ListAssignment, VertexId};
use rand::Rng as _;

/// Every assignment of (κ+1)-subsets of a (κ+2)-color palette to the vertices.
fn all_list_assignments(n: usize, size: usize) -> Vec<Vec<Vec<Color>>> {
    let palette = size + 1;
    let choices: Vec<Vec<Color>> = (0..palette as Color)
        .map(|skip| (0..palette as Color).filter(|&c| c != skip).collect())
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Vec<Color>>| {
                choices.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    p
                })
            })
            .collect();
    }
    out
}

#[test]
fn greedy_colors_from_any_lists_of_size_kappa_plus_one() {
    let mut rng = seeded(41);
    let mut runs = 0;
    for _ in 0..150 {
        let n = rng.random_range(3..=7);
        let m = rng.random_range(0..=5);
        let h = oracles::random_instance(&mut rng, 3, n, m);
        let d = degeneracy(&h);
        for lists in all_list_assignments(n, d.kappa + 1) {
            let la = ListAssignment { lists };
            let col = greedy_degenerate(&h, &la, &d.order, &vec![Vec::new(); n], GreedyRule::AvoidMonochromatic)
                .unwrap_or_else(|e| panic!("{:?} {:?}: {e}", h.raw_edges(), la.lists));
            assert!(verify(&h, &la, &col).proper);
            runs += 1;
        }
    }
    assert!(runs > 10_000);
}

#[test]
fn greedy_on_larger_random_instances() {
    for seed in 0..20 {
        let mut rng = seeded(seed);
        let h = oracles::random_instance(&mut rng, 3, 400, 900);
        let d = degeneracy(&h);
        let la = ListAssignment::uniform(h.n(), d.kappa + 1);
        let col = greedy_degenerate(&h, &la, &d.order, &vec![Vec::new(); h.n()], GreedyRule::default()).unwrap();
        assert!(verify(&h, &la, &col).proper, "seed {seed}");
    }
}

#[test]
fn avoiding_all_neighbor_colors_needs_more_than_kappa_plus_one() {
    let h = Hypergraph::build(3, 5, &[[0u64, 1, 2], [0, 3, 4]]).unwrap();
    assert_eq!(degeneracy(&h).kappa, 1);
    let la = ListAssignment::uniform(5, 2);
    let order = [1, 2, 0, 3, 4];
    let none = vec![Vec::new(); 5];
    assert!(matches!(
        greedy_degenerate(&h, &la, &order, &none, GreedyRule::AvoidNeighbors),
        Err(Error::ListExhausted { vertex: 0, .. })
    ));
    let col = greedy_degenerate(&h, &la, &order, &none, GreedyRule::AvoidMonochromatic).unwrap();
    assert!(verify(&h, &la, &col).proper);
}

#[test]
fn forbidden_colors_are_respected() {
    let h = Hypergraph::build(2, 3, &[[0u64, 1], [1, 2]]).unwrap();
    let la = ListAssignment::uniform(3, 3);
    let forb = vec![vec![0], vec![0, 1], vec![]];
    let col = greedy_degenerate(&h, &la, &[0, 1, 2], &forb, GreedyRule::default()).unwrap();
    assert_eq!(col.assignment, vec![Some(1), Some(2), Some(0)]);
    let forb = vec![vec![], vec![0, 1, 2], vec![]];
    assert!(greedy_degenerate(&h, &la, &[0, 1, 2], &forb, GreedyRule::default()).is_err());
}

fn mu(inst: &FinalPhaseInstance<'_>, e: u32) -> f64 {
    let mut p = 1.0;
    for &u in inst.base.edge(e) {
        if inst.phi[u as usize].is_none() {
            p /= inst.lists[u as usize].len() as f64;
        }
    }
    p
}

/// Σ over uncolored v of the event, over the events whose edge has v uncolored, of μ.
fn brute_dependency(inst: &FinalPhaseInstance<'_>) -> (f64, f64) {
    let h = inst.base;
    let events = inst.events().unwrap();
    let unc = |e: u32| -> Vec<VertexId> { h.edge(e).iter().copied().filter(|&u| inst.phi[u as usize].is_none()).collect() };
    let mut max_mu = 0.0f64;
    let mut max_dep = 0.0f64;
    for &(e, _) in &events {
        max_mu = max_mu.max(mu(inst, e));
        let mut dep = 0.0;
        for v in unc(e) {
            for &(f, _) in &events {
                if unc(f).contains(&v) {
                    dep += mu(inst, f);
                }
            }
        }
        max_dep = max_dep.max(dep);
    }
    (max_mu, max_dep)
}

fn partial(h: &Hypergraph, q: usize, seed: u64) -> (Vec<Option<Color>>, Vec<Vec<Color>>) {
    let mut rng = seeded(seed);
    let mut phi: Vec<Option<Color>> = vec![None; h.n()];
    for v in 0..h.n() {
        if rng.random_bool(0.4) {
            phi[v] = Some(rng.random_range(0..q as Color));
            let mono = h.incident(v as VertexId).iter().any(|&e| h.edge(e).iter().all(|&u| phi[u as usize] == phi[v]));
            if mono {
                phi[v] = None;
            }
        }
    }
    let lists = (0..h.n())
        .map(|_| {
            let l: Vec<Color> = (0..q as Color).filter(|_| rng.random_bool(0.7)).collect();
            if l.is_empty() { vec![0] } else { l }
        })
        .collect();
    (phi, lists)
}

#[test]
fn certificate_matches_brute_force_sums() {
    let mut rng = seeded(42);
    for trial in 0..40 {
        let k = 2 + trial % 3;
        let h = oracles::random_instance(&mut rng, k, 30, 35);
        let (phi, lists) = partial(&h, 5, trial as u64);
        let inst = FinalPhaseInstance::new(&h, phi, lists).unwrap();
        let rep = lll_certificate(&inst).unwrap();
        let (max_mu, max_dep) = brute_dependency(&inst);
        assert_eq!(rep.events, inst.events().unwrap().len());
        assert!(oracles::rel_err(rep.max_probability, max_mu) < 1e-12);
        assert!(oracles::rel_err(rep.max_dependency_sum, max_dep) < 1e-12, "trial {trial}");
        assert_eq!(rep.certified, max_mu <= 0.25 && max_dep <= 0.25);
    }
}

#[test]
fn empty_event_family_is_certified() {
    let h = Hypergraph::empty(3, 4);
    let inst = FinalPhaseInstance::new(&h, vec![None; 4], vec![vec![0]; 4]).unwrap();
    let rep = lll_certificate(&inst).unwrap();
    assert!(rep.certified);
    assert_eq!(rep.events, 0);
}

#[test]
fn bounded_degree_instances_certify_and_finish() {
    for seed in 0..20 {
        let h = oracles::bounded_degree_instance(seed);
        assert!(h.max_degree() <= 4);
        let la = ListAssignment::uniform(h.n(), 8);
        let inst = FinalPhaseInstance::new(&h, vec![None; h.n()], la.lists.clone()).unwrap();
        let rep = lll_certificate(&inst).unwrap();
        assert!(rep.certified, "{rep:?}");
        assert!((rep.max_probability - 1.0 / 512.0).abs() < 1e-15);
        let out = final_phase(&inst, None, &mut seeded(seed), false).unwrap();
        assert!(out.resamples as f64 <= 10.0 * rep.expected_resamples);
        assert!(verify(&h, &la, &out.coloring).proper);
    }
}

#[test]
fn final_phase_keeps_colored_vertices_and_redraws_only_event_vertices() {
    let mut rng = seeded(43);
    let mut done = 0;
    for trial in 0..30 {
        let h = oracles::random_instance(&mut rng, 3, 40, 50);
        let (phi, lists) = partial(&h, 4, trial);
        let inst = FinalPhaseInstance::new(&h, phi.clone(), lists.clone()).unwrap();
        let out = match final_phase(&inst, Some(100_000), &mut seeded(trial), true) {
            Ok(o) => o,
            Err(Error::ImproperInput(_)) | Err(Error::BudgetExhausted { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        for v in 0..h.n() {
            match phi[v] {
                Some(c) => assert_eq!(out.coloring.assignment[v], Some(c)),
                None => assert!(lists[v].contains(&out.coloring.assignment[v].unwrap())),
            }
        }
        assert!(verify(&h, &ListAssignment { lists: (0..h.n()).map(|v| phi[v].map_or(lists[v].clone(), |c| vec![c])).collect() }, &out.coloring).proper);
        for (e, _, redraw) in out.trace.unwrap() {
            let want: Vec<VertexId> = h.edge(e).iter().copied().filter(|&u| phi[u as usize].is_none()).collect();
            assert_eq!(redraw, want);
        }
        done += 1;
    }
    assert!(done >= 10, "{done}");
}

#[test]
fn improper_partial_coloring_is_rejected() {
    let h = Hypergraph::build(2, 3, &[[0u64, 1], [1, 2]]).unwrap();
    let inst = FinalPhaseInstance::new(&h, vec![Some(0), Some(0), None], vec![vec![0]; 3]).unwrap();
    assert!(matches!(final_phase(&inst, None, &mut seeded(0), false), Err(Error::ImproperInput(0))));
}

#[test]
fn exhausted_budget_is_an_error() {
    // One color per vertex on an edge: every draw is monochromatic.
    let h = Hypergraph::build(2, 2, &[[0u64, 1]]).unwrap();
    let inst = FinalPhaseInstance::new(&h, vec![None; 2], vec![vec![3]; 2]).unwrap();
    assert!(matches!(final_phase(&inst, Some(50), &mut seeded(0), false), Err(Error::BudgetExhausted { .. })));
}
