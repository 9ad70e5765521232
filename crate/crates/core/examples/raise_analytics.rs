//! Summarizes how long synthetic founders spend raising and fits the cubic
//! relation between email volume and committed investors.

use founderrank::analytics::analyze;
use founderrank::synth::{generate, SynthSpec};

fn main() -> founderrank::Result<()> {
    let world = generate(&SynthSpec {
        seed: 8,
        ..SynthSpec::default()
    })?;
    let report = analyze(&world.timelines)?;
    report.write_to(std::io::stdout().lock())?;
    if let Some(fit) = &report.fit {
        for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
            println!("share at {x:.2} committed: {:.4}", fit.eval(x));
        }
    }
    Ok(())
}
