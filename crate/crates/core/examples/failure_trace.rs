//! Adds a forbidden scenario to the web-order protocol and reports the
//! least failure trace, next to the trace the traversal found first.

use lscheck::eesl::{compile_to_grammar, parse_eesl};
use lscheck::engine::Simulator;
use lscheck::justify::format_trace;
use lscheck::model::{parse_model_unchecked, SystemModel};
use lscheck::play::{check_consistency, Verdict};

const MODEL: &str = include_str!("../fixtures/web_order.lsc");
const FORBIDDEN: &str = include_str!("../fixtures/anti_scenario.lsc");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut model = SystemModel::default();
    model.merge(parse_model_unchecked(MODEL)?);
    model.merge(parse_model_unchecked(FORBIDDEN)?);
    let model = model.validated()?;
    let ast = parse_eesl(
        "createOrder·(createConfirm + createAbort)*",
        &model.external_events,
    )?;
    let grammar = compile_to_grammar(&ast);
    let sim = Simulator::new(model)?;
    let report = check_consistency(&sim, &grammar)?;
    match &report.verdict {
        Verdict::Consistent => println!("consistent"),
        Verdict::Inconsistent(trace) => {
            println!("least failure trace: {}", format_trace(trace));
            if let Some(first) = &report.first_trace {
                println!("first trace found:   {}", format_trace(first));
            }
        }
    }
    Ok(())
}
