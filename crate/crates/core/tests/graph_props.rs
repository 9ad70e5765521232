use founderrank::graph::{CommGraph, GraphDelta, Label, LabelClaims, NodeId};
use proptest::prelude::*;

fn node(i: u8) -> NodeId {
    NodeId::new(format!("n{i}@x.com"))
}

fn claims_strategy() -> impl Strategy<Value = LabelClaims> {
    (any::<bool>(), any::<bool>(), any::<bool>()).prop_map(
        |(founder, investor, employed_by_fund)| LabelClaims {
            founder,
            investor,
            employed_by_fund,
        },
    )
}

fn delta_strategy() -> impl Strategy<Value = GraphDelta> {
    (
        prop::collection::vec((0u8..12, 0u8..12, 1u64..5), 0..20),
        prop::collection::vec((0u8..14, claims_strategy()), 0..6),
    )
        .prop_map(|(edges, labels)| {
            let mut d = GraphDelta::default();
            for (a, b, w) in edges {
                if a != b {
                    d.increment(node(a), node(b), w);
                }
            }
            for (n, c) in labels {
                d.claim(node(n), c);
            }
            d
        })
}

proptest! {
    #[test]
    fn delta_sequences_keep_invariants(deltas in prop::collection::vec(delta_strategy(), 1..6)) {
        let mut g = CommGraph::new();
        for d in &deltas {
            let before = g.total_weight();
            g = g.apply_delta(d);
            prop_assert_eq!(g.total_weight(), before + d.total_increment());
            for (n, label) in g.labeled_nodes() {
                let c = g.claims(n).unwrap();
                // exactly one resolved label, and it follows the claims
                prop_assert_eq!(label, c.label());
                prop_assert!(!(label == Label::Founder && c.investor && c.employed_by_fund));
            }
            for (s, d, w) in g.edges() {
                prop_assert!(w >= 1 && s != d && g.contains(s) && g.contains(d));
            }
        }
        let once = g.remove_orphans();
        prop_assert_eq!(once.remove_orphans(), once.clone());
        prop_assert_eq!(once.total_weight(), g.total_weight());
        prop_assert_eq!(CommGraph::from_snapshot(&g.to_snapshot()).unwrap(), g);
    }

    #[test]
    fn delta_merge_is_order_free(a in delta_strategy(), b in delta_strategy(), c in delta_strategy()) {
        let mut left = a.clone();
        left.merge(&b);
        left.merge(&c);
        let mut right = c.clone();
        right.merge(&a);
        right.merge(&b);
        prop_assert_eq!(left, right);
    }
}
