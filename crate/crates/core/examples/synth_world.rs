//! Generates a seeded synthetic world from a TOML spec and writes every
//! artifact the command-line pipeline consumes.

use founderrank::synth::{generate, write_world, SynthSpec};

fn main() -> founderrank::Result<()> {
    let spec = SynthSpec::from_toml(
        r#"
        seed = 2024
        founders = 40
        communities = 2
        [model]
        kind = "erdos_renyi"
        p = 0.02
        "#,
    )?;
    let world = generate(&spec)?;
    println!(
        "{} nodes, {} edges (expected {:.0}), {} events",
        world.graph.node_count(),
        world.graph.edge_count(),
        spec.expected_edges(),
        world.events.len()
    );
    let dir = tempfile::tempdir().map_err(|e| founderrank::Error::io("tempdir", e))?;
    write_world(&world, dir.path())?;
    let mut files: Vec<String> = std::fs::read_dir(dir.path())
        .map_err(|e| founderrank::Error::io(dir.path(), e))?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect();
    files.sort();
    println!("wrote {}", files.join(", "));
    Ok(())
}
