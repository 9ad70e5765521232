//! Filters and ranks a synthetic investor catalog, personalized by a
//! founder's industries and city.

use founderrank::catalog::{FundStage, Industry};
use founderrank::search::{filter_and_search, FilterQuery, FounderContext};
use founderrank::synth::{generate, SynthSpec};

fn main() -> founderrank::Result<()> {
    let world = generate(&SynthSpec {
        seed: 11,
        firms: 60,
        investors: 150,
        ..SynthSpec::default()
    })?;
    let cat = &world.catalog;
    let industry: Industry = Industry::all().next().expect("industries exist");
    let founder = FounderContext {
        industries: [industry].into(),
        cities: ["Boston".to_string()].into(),
    };
    let query = FilterQuery {
        stages: [FundStage::Seed].into(),
        us_only: true,
        ..FilterQuery::default()
    };
    print!("query:\n{}", query.to_toml());
    let firms = filter_and_search(cat, &founder, &query)?;
    println!("{} of {} firms match", firms.len(), cat.firms.len());
    for (i, f) in firms.iter().take(10).enumerate() {
        println!("{:2} {} {} ({})", i + 1, f.firm_id, f.name, f.hq_city);
    }

    let by_name = FilterQuery {
        search: Some(cat.firms[0].name.chars().take(4).collect()),
        ..FilterQuery::default()
    };
    let hits = filter_and_search(cat, &founder, &by_name)?;
    println!("search {:?}: {} hits", by_name.search, hits.len());
    Ok(())
}
