//! Builds a communication graph from a delta and prints the most central
//! nodes by each scaled metric.

use founderrank::centrality::{compute_metrics, MetricVector, PageRankConfig};
use founderrank::{CommGraph, GraphDelta, LabelClaims, NodeId};

fn top(metrics: &[MetricVector], key: fn(&MetricVector) -> f64) -> Vec<(&str, f64)> {
    let mut v: Vec<(&str, f64)> = metrics
        .iter()
        .map(|m| (m.node_id.as_str(), key(m)))
        .collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(b.0)));
    v.truncate(3);
    v
}

fn main() -> founderrank::Result<()> {
    let n = |s: &str| NodeId::new(s);
    let mut delta = GraphDelta::default();
    for (a, b, w) in [
        ("ana@startup.io", "ivy@fund.vc", 3),
        ("ivy@fund.vc", "ana@startup.io", 2),
        ("ana@startup.io", "bo@advisor.com", 5),
        ("bo@advisor.com", "kai@fund.vc", 4),
        ("kai@fund.vc", "bo@advisor.com", 1),
        ("cy@startup2.io", "bo@advisor.com", 2),
        ("bo@advisor.com", "cy@startup2.io", 2),
    ] {
        delta.increment(n(a), n(b), w);
    }
    delta.claim(n("ana@startup.io"), LabelClaims::FOUNDER);
    delta.claim(n("cy@startup2.io"), LabelClaims::FOUNDER);
    delta.claim(n("ivy@fund.vc"), LabelClaims::INVESTOR);

    let g = CommGraph::new().apply_delta(&delta);
    println!(
        "nodes {} edges {} weight {}",
        g.node_count(),
        g.edge_count(),
        g.total_weight()
    );
    let metrics = compute_metrics(&g, PageRankConfig::default())?;
    println!("pagerank    {:?}", top(&metrics, |m| m.pagerank));
    println!("betweenness {:?}", top(&metrics, |m| m.betweenness));
    println!("closeness   {:?}", top(&metrics, |m| m.closeness));
    print!("{}", g.to_snapshot());
    Ok(())
}
