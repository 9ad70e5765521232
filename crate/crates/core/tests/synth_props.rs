use std::collections::BTreeSet;

use founderrank::graph::{CommGraph, NodeId};
use founderrank::synth::{generate, EdgeModel, SynthSpec};

fn weak_components(g: &CommGraph) -> Vec<BTreeSet<NodeId>> {
    let ids: Vec<&NodeId> = g.nodes().collect();
    let index = |n: &NodeId| ids.binary_search(&n).unwrap();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (s, d, _) in g.edges() {
        let (a, b) = (find(&mut parent, index(s)), find(&mut parent, index(d)));
        parent[a] = b;
    }
    let mut groups = std::collections::BTreeMap::<usize, BTreeSet<NodeId>>::new();
    for (i, n) in ids.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().insert((*n).clone());
    }
    groups.into_values().collect()
}

fn check_edge_count(model: EdgeModel, tolerance: f64) {
    let spec = SynthSpec {
        model,
        ..SynthSpec::default()
    };
    let expected = spec.expected_edges();
    let mean = (0..20)
        .map(|seed| {
            generate(&SynthSpec {
                seed,
                ..spec.clone()
            })
            .unwrap()
            .graph
            .edge_count() as f64
        })
        .sum::<f64>()
        / 20.0;
    assert!(
        (mean - expected).abs() <= tolerance * expected,
        "{model:?}: mean {mean} expected {expected}"
    );
}

#[test]
fn edge_counts_match_the_model() {
    check_edge_count(EdgeModel::PreferentialAttachment { edges_per_node: 2 }, 0.1);
    check_edge_count(EdgeModel::PreferentialAttachment { edges_per_node: 4 }, 0.1);
    check_edge_count(EdgeModel::ErdosRenyi { p: 0.01 }, 0.1);
}

#[test]
fn communities_are_disconnected_blocks() {
    let spec = SynthSpec {
        seed: 9,
        communities: 2,
        ..SynthSpec::default()
    };
    let world = generate(&spec).unwrap();
    let comps = weak_components(&world.graph);
    assert_eq!(comps.len(), 2);
    for comp in comps {
        let planted: BTreeSet<usize> = comp
            .iter()
            .map(|n| world.ground_truth.communities[n])
            .collect();
        assert_eq!(planted.len(), 1);
    }
}

#[test]
fn generation_is_deterministic() {
    let spec = SynthSpec {
        seed: 21,
        ..SynthSpec::default()
    };
    let (a, b) = (generate(&spec).unwrap(), generate(&spec).unwrap());
    assert_eq!(a.graph, b.graph);
    assert_eq!(a.events, b.events);
    assert_eq!(a.profiles, b.profiles);
    assert_eq!(a.timelines, b.timelines);
    assert_eq!(a.ground_truth, b.ground_truth);
    let other = generate(&SynthSpec { seed: 22, ..spec }).unwrap();
    assert_ne!(a.graph, other.graph);
}

#[test]
fn roles_are_planted() {
    use founderrank::graph::Label;
    let spec = SynthSpec::default();
    let world = generate(&spec).unwrap();
    assert_eq!(
        world.graph.nodes_with_label(Label::Founder).len(),
        spec.founders
    );
    assert_eq!(
        world.graph.nodes_with_label(Label::Investor).len(),
        spec.investors
    );
    assert_eq!(world.graph.node_count(), spec.node_count());
}
