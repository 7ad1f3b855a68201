//! Feeds external events to the simulator one at a time and prints every
//! stable state each superstep can end in.

use lscheck::engine::Simulator;
use lscheck::model::parse_model;

const MODEL: &str = include_str!("../fixtures/web_order.lsc");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sim = Simulator::new(parse_model(MODEL)?)?;
    let mut states = std::collections::BTreeSet::from([sim.initial_state()]);
    println!("start: {}", sim.describe(&sim.initial_state()));
    for event in ["createOrder", "createConfirm", "createOrder", "createAbort"] {
        let mut next = std::collections::BTreeSet::new();
        for s in &states {
            next.extend(sim.superstep(s, event)?);
        }
        println!("after {event}:");
        for s in &next {
            println!("  {}", sim.describe(s));
        }
        states = next;
    }
    Ok(())
}
