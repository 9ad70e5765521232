mod common;

use std::collections::BTreeMap;

use common::{ndcg_definition, permutations, ranking_of, rho_definition, tau_definition};
use founderrank::rank_eval::{kendall_tau, mae, ndcg, precision_at, rmse, spearman_rho};
use founderrank::{NodeId, Ranking};
use proptest::prelude::*;

#[test]
fn correlations_match_definitions_over_all_permutations() {
    for n in 2..=7 {
        let b = ranking_of(&(0..n).collect::<Vec<_>>());
        for p in permutations(n) {
            let x = ranking_of(&p);
            assert_eq!(
                kendall_tau(&x, &b).unwrap(),
                tau_definition(&x, &b),
                "{p:?}"
            );
            assert_eq!(
                spearman_rho(&x, &b).unwrap(),
                rho_definition(&x, &b),
                "{p:?}"
            );
            assert!(
                (ndcg(&x, &b).unwrap() - ndcg_definition(&x, &b)).abs() < 1e-12,
                "{p:?}"
            );
        }
    }
}

fn scored(seed: &[(u8, f64)]) -> Ranking {
    let scores: BTreeMap<NodeId, f64> = seed
        .iter()
        .enumerate()
        .map(|(i, (_, s))| (NodeId::new(format!("f{i:02}")), *s))
        .collect();
    Ranking::from_scores(scores).unwrap()
}

fn permutation_strategy() -> impl Strategy<Value = Vec<usize>> {
    (2usize..40).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
}

proptest! {
    #[test]
    fn self_comparison_is_perfect(order in permutation_strategy()) {
        let b = ranking_of(&order);
        prop_assert_eq!(ndcg(&b, &b).unwrap(), 1.0);
        for n in 1..=b.len() {
            prop_assert_eq!(precision_at(&b, &b, n).unwrap(), 1.0);
        }
    }

    #[test]
    fn reversal_negates_correlations(x in permutation_strategy(), seed in any::<u64>()) {
        let mut b_order = x.clone();
        b_order.sort_by_key(|i| (i.wrapping_mul(2654435761) ^ seed as usize) % 1_000_003);
        let (x, b) = (ranking_of(&x), ranking_of(&b_order));
        let r = x.reversed();
        prop_assert!((kendall_tau(&r, &b).unwrap() + kendall_tau(&x, &b).unwrap()).abs() < 1e-12);
        prop_assert!((spearman_rho(&r, &b).unwrap() + spearman_rho(&x, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn error_norms_are_ordered(pairs in prop::collection::vec((any::<u8>(), 0.0f64..1.0, 0.0f64..1.0), 2..30)) {
        let x = scored(&pairs.iter().map(|(k, a, _)| (*k, *a)).collect::<Vec<_>>());
        let b = scored(&pairs.iter().map(|(k, _, c)| (*k, *c)).collect::<Vec<_>>());
        let (m, r) = (mae(&x, &b).unwrap(), rmse(&x, &b).unwrap());
        let max = pairs.iter().map(|(_, a, c)| (a - c).abs()).fold(0.0, f64::max);
        prop_assert!(m <= r + 1e-12 && r <= max + 1e-12);
    }

    #[test]
    fn metrics_ignore_founder_names(order in permutation_strategy()) {
        let n = order.len();
        let b = ranking_of(&(0..n).collect::<Vec<_>>());
        let x = ranking_of(&order);
        let rename = |r: &Ranking| Ranking::from_order(
            r.order().iter().map(|f| NodeId::new(format!("zz{}@renamed.io", f.as_str()))).collect()
        ).unwrap();
        let (x2, b2) = (rename(&x), rename(&b));
        prop_assert_eq!(ndcg(&x, &b).unwrap(), ndcg(&x2, &b2).unwrap());
        prop_assert_eq!(kendall_tau(&x, &b).unwrap(), kendall_tau(&x2, &b2).unwrap());
        prop_assert_eq!(spearman_rho(&x, &b).unwrap(), spearman_rho(&x2, &b2).unwrap());
        prop_assert_eq!(precision_at(&x, &b, 1).unwrap(), precision_at(&x2, &b2, 1).unwrap());
    }
}
