use hgcolor::hypergraph::io::{parse_hypergraph, read_coloring, write_coloring, write_hypergraph};
use hgcolor::hypergraph::verify;
use hgcolor::{Coloring, Error, Hypergraph, ListAssignment};
use proptest::prelude::*;

fn edges_strategy() -> impl Strategy<Value = (usize, usize, Vec<Vec<u64>>)> {
    (2usize..5, 5usize..20).prop_flat_map(|(k, n)| {
        let edge = proptest::sample::subsequence((0..n as u64).collect::<Vec<_>>(), k).prop_shuffle();
        (Just(k), Just(n), proptest::collection::vec(edge, 0..30))
    })
}

proptest! {
    #[test]
    fn text_round_trip((k, n, raw) in edges_strategy()) {
        let h = Hypergraph::build(k, n, &raw).unwrap();
        let mut buf = Vec::new();
        write_hypergraph(&h, &mut buf).unwrap();
        prop_assert_eq!(parse_hypergraph(std::str::from_utf8(&buf).unwrap()).unwrap(), h);
    }

    #[test]
    fn build_canonicalizes((k, n, raw) in edges_strategy()) {
        let (h, dups) = Hypergraph::build_counted(k, n, &raw).unwrap();
        let mut want: Vec<Vec<u64>> = raw.iter().map(|e| { let mut e = e.clone(); e.sort_unstable(); e }).collect();
        want.sort();
        want.dedup();
        prop_assert_eq!(h.raw_edges(), want.clone());
        prop_assert_eq!(dups, raw.len() - want.len());
        let total: usize = h.degrees().iter().sum();
        prop_assert_eq!(total, k * h.m());
        for (e, tuple) in h.edges().enumerate() {
            prop_assert_eq!(h.find_edge(tuple), Some(e as u32));
            for &v in tuple {
                prop_assert!(h.incident(v).contains(&(e as u32)));
            }
        }
    }

    #[test]
    fn induced_keeps_exactly_the_inner_edges((k, n, raw) in edges_strategy(), mask in any::<u32>()) {
        let h = Hypergraph::build(k, n, &raw).unwrap();
        let keep: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        let (sub, old) = h.induced(&keep);
        let want: Vec<Vec<u64>> = h.raw_edges().into_iter().filter(|e| e.iter().all(|&v| keep[v as usize])).collect();
        let got: Vec<Vec<u64>> = sub.edges().map(|e| e.iter().map(|&v| old[v as usize] as u64).collect()).collect();
        prop_assert_eq!(got, want);
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(matches!(parse_hypergraph(""), Err(Error::Parse { .. })));
    assert!(matches!(parse_hypergraph("3 5 1\n0 1\n"), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(parse_hypergraph("3 5 2\n0 1 2\n"), Err(Error::Parse { .. })));
    assert!(matches!(parse_hypergraph("3 5 1\n0 1 9\n"), Err(Error::VertexOutOfRange { vertex: 9, .. })));
    assert!(matches!(parse_hypergraph("3 5 1\n0 1 1\n"), Err(Error::RepeatedVertex { .. })));
    assert!(matches!(parse_hypergraph("3 5 1\n0 x 1\n"), Err(Error::Parse { .. })));
    assert!(parse_hypergraph("# comment\n\n2 3 1\n0 2\n").is_ok());
}

#[test]
fn coloring_round_trip_and_verify() {
    let h = parse_hypergraph("2 3 2\n0 1\n1 2\n").unwrap();
    let col = Coloring { assignment: vec![Some(0), Some(1), None] };
    let mut buf = Vec::new();
    write_coloring(&col, &mut buf).unwrap();
    assert_eq!(read_coloring(buf.as_slice(), 3).unwrap(), col);
    let la = ListAssignment::uniform(3, 2);
    let rep = verify(&h, &la, &col);
    assert!(!rep.is_total && !rep.proper);
    let mono = Coloring { assignment: vec![Some(0), Some(0), Some(1)] };
    assert_eq!(verify(&h, &la, &mono).monochromatic_edges, vec![0]);
    let off = Coloring { assignment: vec![Some(0), Some(1), Some(5)] };
    assert_eq!(verify(&h, &la, &off).off_list, vec![2]);
    let good = Coloring { assignment: vec![Some(0), Some(1), Some(0)] };
    assert!(verify(&h, &la, &good).proper);
    assert!(verify(&h, &la, &Coloring { assignment: vec![Some(0)] }).size_mismatch);
}
