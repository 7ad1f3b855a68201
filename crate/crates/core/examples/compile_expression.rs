//! Compiles external event expressions to right-linear grammars and lists
//! the words each one accepts. Pass expressions as arguments to try your
//! own; every name in an expression is treated as an external event.

use lscheck::eesl::{apply_testing_mode, compile_to_grammar, desugar, parse_eesl};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = ["a·(b+c)*", "a‖b", "<a>·b·c", "(a·b)‖c", "λ + a·a"].map(String::from).to_vec();
    }
    for text in &inputs {
        let mut alphabet: Vec<String> = Vec::new();
        for name in text.split(|c: char| !c.is_alphanumeric() && c != '_') {
            if !name.is_empty() && !["λ", "ε"].contains(&name) && !alphabet.iter().any(|a| a == name) {
                alphabet.push(name.to_string());
            }
        }
        let ast = parse_eesl(text, &alphabet)?;
        println!("expression: {ast}");
        if ast.has_sugar() {
            println!("desugared:  {}", desugar(&ast));
        }
        println!("testing:    {}", apply_testing_mode(&ast));
        let grammar = compile_to_grammar(&ast);
        print!("{}", grammar.dump());
        let words: Vec<String> = grammar
            .enumerate_words(5)
            .into_iter()
            .map(|w| if w.is_empty() { "λ".into() } else { w.join("·") })
            .collect();
        println!("words up to length 5: {}\n", words.join(", "));
    }
    Ok(())
}
