//! Checks the web-order protocol against repeated sequential orders and
//! prints the verdict with traversal statistics.

use lscheck::eesl::{compile_to_grammar, parse_eesl};
use lscheck::engine::Simulator;
use lscheck::model::parse_model;
use lscheck::play::check_consistency;

const MODEL: &str = include_str!("../fixtures/web_order.lsc");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = parse_model(MODEL)?;
    let ast = parse_eesl(
        "(createOrder·(createAbort + createConfirm))*",
        &model.external_events,
    )?;
    let grammar = compile_to_grammar(&ast);
    let sim = Simulator::new(model)?;
    let report = check_consistency(&sim, &grammar)?;
    println!("verdict: {:?}", report.verdict);
    println!("memoized IDs: {}", report.memo.len());
    println!("stats: {:?}", report.stats);
    Ok(())
}
