//! Imports a synthetic founder mailbox twice: the second pass is a no-op
//! because every message id is remembered in the import state.

use founderrank::ingest::{
    ingest_events, EmailEvent, IngestConfig, IngestState, LogRecord, Malformed,
};
use founderrank::synth::mailbox;

fn main() -> founderrank::Result<()> {
    let (founder, events) = mailbox(7, 300);
    let records: Vec<LogRecord> = events
        .into_iter()
        .enumerate()
        .map(|(index, e)| EmailEvent::try_from(e).map_err(|reason| Malformed { index, reason }))
        .collect();
    let cfg = IngestConfig::default();
    let mut state = IngestState::default();

    let first = ingest_events(&records, &founder, &mut state, &cfg)?;
    print!("first run\n{}", first.stats.summary());
    println!("edge increments\t{}", first.delta.total_increment());
    for u in first.updates.iter().take(5) {
        println!("stage\t{}\t{:?}", u.investor, u.stage);
    }

    let second = ingest_events(&records, &founder, &mut state, &cfg)?;
    print!("second run\n{}", second.stats.summary());
    assert!(second.delta.is_empty());
    Ok(())
}
