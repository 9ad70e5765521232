//! Finds the strongest shortest introduction chains from a founder to an
//! investor and to any partner of a firm.

use founderrank::intro_paths::{firm_intro_paths, top_intro_paths, DEFAULT_K, DEFAULT_MAX_HOPS};
use founderrank::synth::{generate, SynthSpec};
use founderrank::{Label, NodeId};

fn main() -> founderrank::Result<()> {
    let world = generate(&SynthSpec {
        seed: 5,
        ..SynthSpec::default()
    })?;
    let founder = world.founders()[0].clone();
    let investors = world.graph.nodes_with_label(Label::Investor);
    for inv in investors.iter().take(3) {
        let paths = top_intro_paths(&world.graph, &founder, inv, DEFAULT_MAX_HOPS, DEFAULT_K)?;
        println!("{founder} -> {inv}: {} paths", paths.len());
        for p in paths {
            let seq: Vec<&str> = p.nodes.iter().map(NodeId::as_str).collect();
            println!(
                "  {} hops, strength {}: {}",
                p.hops(),
                p.total_strength,
                seq.join(" > ")
            );
        }
    }
    let firm: Vec<NodeId> = investors
        .iter()
        .filter(|i| i.as_str().ends_with("@firm001.example"))
        .cloned()
        .collect();
    let best = firm_intro_paths(&world.graph, &founder, &firm, DEFAULT_MAX_HOPS, DEFAULT_K)?;
    println!("best routes into firm001: {}", best.len());
    Ok(())
}
