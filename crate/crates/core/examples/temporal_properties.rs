//! Runs the web-order protocol in testing mode, evaluates AG and EF over
//! the testing charts and prints the transition graph as DOT.

use lscheck::eesl::{apply_testing_mode, compile_to_grammar, parse_eesl};
use lscheck::engine::Simulator;
use lscheck::justify::{build_transition_graph, emit_dot_for, eval_ctl, CtlMode, CtlQuery};
use lscheck::model::{parse_model_unchecked, SystemModel};

const MODEL: &str = include_str!("../fixtures/web_order.lsc");
const PROPERTIES: &str = include_str!("../fixtures/properties.lsc");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut model = SystemModel::default();
    model.merge(parse_model_unchecked(MODEL)?);
    model.merge(parse_model_unchecked(PROPERTIES)?);
    let model = model.validated()?;
    let ast = parse_eesl(
        "(createOrder·(createAbort‖createConfirm))*",
        &model.external_events,
    )?;
    let grammar = compile_to_grammar(&apply_testing_mode(&ast));
    let sim = Simulator::new(model)?;
    let graph = build_transition_graph(&sim, &grammar)?;
    for property in ["conf_agree", "abort_then_confirm"] {
        for mode in [CtlMode::AG, CtlMode::EF] {
            let value = eval_ctl(&graph, &CtlQuery::new(mode, property))?;
            println!("{mode}: {value} ({property})");
        }
    }
    println!();
    print!("{}", emit_dot_for(&graph, "conf_agree")?);
    Ok(())
}
