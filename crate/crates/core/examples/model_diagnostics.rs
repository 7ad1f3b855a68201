//! Validates a deliberately broken model and lists every diagnostic.

use lscheck::model::{parse_model_unchecked, validate_model};

const BROKEN: &str = r#"
object A {
  var s in {idle, busy} init idle;
}

external go;

chart bad {
  instances: A, B;
  prechart:
    msg Env->A go cold;
  main:
    assign A.s := done;
    msg A->B beginP hot;
}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = parse_model_unchecked(BROKEN)?;
    let diagnostics = validate_model(&model);
    println!("{} problem(s):", diagnostics.len());
    for d in &diagnostics {
        println!("  {d}");
    }
    Ok(())
}
