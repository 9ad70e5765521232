mod common;

use std::collections::BTreeMap;

use common::{brute_betweenness, brute_closeness, dense_pagerank, random_graph, rng};
use founderrank::centrality::{betweenness, closeness, compute_metrics, pagerank, PageRankConfig};
use founderrank::synth::{generate, SynthSpec};
use founderrank::{CommGraph, NodeId};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn values(m: &BTreeMap<NodeId, f64>) -> Vec<f64> {
    m.values().copied().collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn metrics_match_brute_force_on_small_graphs() {
    for seed in 0..50 {
        let g = random_graph(seed, 30);
        let bt = values(&betweenness(&g).unwrap());
        let cl = values(&closeness(&g).unwrap());
        let pr = values(&pagerank(&g, PageRankConfig::default()).unwrap());
        assert!(
            max_abs_diff(&bt, &brute_betweenness(&g)) < 1e-9,
            "betweenness, seed {seed}"
        );
        assert!(
            max_abs_diff(&cl, &brute_closeness(&g)) < 1e-9,
            "closeness, seed {seed}"
        );
        assert!(
            max_abs_diff(&pr, &dense_pagerank(&g, 0.85)) < 1e-8,
            "pagerank, seed {seed}"
        );
    }
}

fn relabel(g: &CommGraph, names: &BTreeMap<NodeId, NodeId>) -> CommGraph {
    let mut h = CommGraph::new();
    for n in g.nodes() {
        h.add_node(names[n].clone());
    }
    for (s, d, w) in g.edges() {
        h.add_edge(names[s].clone(), names[d].clone(), w);
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pagerank_sums_to_one(seed in any::<u64>()) {
        let g = random_graph(seed, 40);
        let total: f64 = pagerank(&g, PageRankConfig::default()).unwrap().values().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn metrics_survive_relabeling(seed in any::<u64>()) {
        let mut g = random_graph(seed, 15);
        while g.node_count() < 15 {
            g.add_node(NodeId::new(format!("v{:02}", g.node_count())));
        }
        let old: Vec<NodeId> = g.nodes().cloned().collect();
        let mut new: Vec<NodeId> = (0..old.len()).map(|i| NodeId::new(format!("r{i:02}@x.com"))).collect();
        new.shuffle(&mut rng(seed));
        let names: BTreeMap<NodeId, NodeId> = old.iter().cloned().zip(new).collect();
        let h = relabel(&g, &names);
        let before = compute_metrics(&g, PageRankConfig::default()).unwrap();
        let after: BTreeMap<NodeId, _> = compute_metrics(&h, PageRankConfig::default())
            .unwrap()
            .into_iter()
            .map(|m| (m.node_id.clone(), m))
            .collect();
        for m in before {
            let o = &after[&names[&m.node_id]];
            prop_assert!((m.raw.pagerank - o.raw.pagerank).abs() < 1e-9);
            prop_assert!((m.raw.betweenness - o.raw.betweenness).abs() < 1e-12);
            prop_assert!((m.raw.closeness - o.raw.closeness).abs() < 1e-12);
        }
    }
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn betweenness_tracks_pagerank_on_attachment_graphs() {
    for seed in 0..5 {
        let spec = SynthSpec {
            seed,
            founders: 20,
            investors: 20,
            persons: 160,
            ..SynthSpec::default()
        };
        let w = generate(&spec).unwrap();
        let pr: Vec<f64> = w.metrics.iter().map(|m| m.raw.pagerank).collect();
        let bt: Vec<f64> = w.metrics.iter().map(|m| m.raw.betweenness).collect();
        let r = pearson(&pr, &bt);
        assert!(r > 0.7, "seed {seed}: pearson {r}");
    }
}
