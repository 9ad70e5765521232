//! Ranks synthetic founders with the profile baseline, Naive FounderRank,
//! Weighted FounderRank and a random model, then scores each candidate
//! against the baseline.

use founderrank::founder_rank::{email_baseline, nfr_rank, random_rank, wfr_rank};
use founderrank::rank_eval::{evaluate, EvalOptions};
use founderrank::synth::{generate, SynthSpec};

fn main() -> founderrank::Result<()> {
    let world = generate(&SynthSpec {
        seed: 42,
        founders: 80,
        ..SynthSpec::default()
    })?;
    let founders = world.founders();
    let baseline = email_baseline(&world.profiles)?;
    let (fit, wfr) = wfr_rank(&world.metrics, &baseline)?;
    println!(
        "wfr intercept {:.4} r^2 {:.4}",
        fit.intercept, fit.r_squared
    );
    for (name, c) in fit.feature_names.iter().zip(&fit.coefficients) {
        println!("  {name} {c:.4}");
    }
    let opts = EvalOptions {
        trials: 2000,
        ..EvalOptions::default()
    };
    for (name, candidate) in [
        ("nfr", nfr_rank(&world.metrics, &founders)?),
        ("wfr", wfr),
        ("random", random_rank(&founders, 9)?),
    ] {
        let r = evaluate(&candidate, &baseline, &opts)?;
        println!(
            "{name:7} ndcg {:.3} tau {:.3} rho {:.3} p(tau) {:.4}",
            r.ndcg, r.kendall_tau, r.spearman_rho, r.p_tau
        );
    }
    Ok(())
}
