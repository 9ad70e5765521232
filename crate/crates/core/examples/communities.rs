//! Recovers planted communities in a synthetic graph with label
//! propagation and Louvain.

use std::collections::BTreeMap;

use founderrank::communities::{community_stats, detect, modularity, Method};
use founderrank::synth::{generate, SynthSpec};
use founderrank::Label;

fn main() -> founderrank::Result<()> {
    let world = generate(&SynthSpec {
        seed: 3,
        communities: 4,
        ..SynthSpec::default()
    })?;
    let labels: BTreeMap<_, Label> = world
        .graph
        .labeled_nodes()
        .map(|(n, l)| (n.clone(), l))
        .collect();
    for method in [Method::LabelPropagation, Method::Louvain] {
        let p = detect(&world.graph, method, 1, 1000)?;
        let stats = community_stats(&p, &labels, 3)?;
        println!(
            "{method:?}: {} communities, modularity {:.3}, mean founders {:.2}",
            stats.community_count,
            modularity(&world.graph, &p),
            stats.mean_founders
        );
        for (id, founders, size) in stats.top {
            println!("  {id}: {founders} founders of {size}");
        }
    }
    Ok(())
}
