mod common;

use std::cell::RefCell;

use asmsym_core::cayley::is_partial_two_tree;
use asmsym_core::graph::Graph;
use proptest::prelude::*;

thread_local! {
    static ORACLE: RefCell<common::MinorOracle> = RefCell::new(common::MinorOracle::new(6));
}

fn sparse_graph() -> impl Strategy<Value = Graph> {
    (5usize..=8).prop_flat_map(|n| {
        let pairs = common::pair_list(n);
        let m = pairs.len().min(14);
        prop::sample::subsequence(pairs, 0..=m).prop_map(move |edges| Graph::from_edges(n, edges).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reduction_matches_minor_search(g in sparse_graph()) {
        let minor = ORACLE.with(|o| o.borrow_mut().has_k4_minor(&g));
        prop_assert_eq!(is_partial_two_tree(&g), !minor);
    }
}

#[test]
fn oracle_sanity() {
    let mut o = common::MinorOracle::new(5);
    assert!(o.has_k4_minor(&Graph::complete(4)));
    assert!(!o.has_k4_minor(&Graph::cycle(6)));
    // The octahedron graph minus nothing contains K4 after contractions.
    let octa = Graph::from_edges(6, [(0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (1, 3), (1, 4), (1, 5), (2, 4), (2, 5), (3, 4), (3, 5)]).unwrap();
    assert!(o.has_k4_minor(&octa));
    let counts = common::tree_counts(6);
    assert_eq!(counts, [1u32, 1, 4, 26, 236, 2752].map(num_bigint::BigUint::from));
}
