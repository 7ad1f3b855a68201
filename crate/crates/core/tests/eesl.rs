mod common;

use std::collections::BTreeSet;

use common::{fixture_path, language, random_eesl, Word};
use lscheck::eesl::{apply_testing_mode, compile_to_grammar, desugar, parse_eesl, Eesl, Grammar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sigma() -> Vec<String> {
    ["createOrder", "createAbort", "createConfirm"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn fixture_expressions() -> Vec<String> {
    std::fs::read_to_string(fixture_path("expressions.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn words(list: &[&[&str]]) -> BTreeSet<Word> {
    list.iter()
        .map(|w| w.iter().map(|s| s.to_string()).collect())
        .collect()
}

#[test]
fn fixture_languages_match_the_grammar() {
    for text in fixture_expressions() {
        for testing in [false, true] {
            let mut ast = parse_eesl(&text, &sigma()).unwrap();
            if testing {
                ast = apply_testing_mode(&ast);
            }
            let g = compile_to_grammar(&ast);
            assert!(g.is_right_linear(), "{text}");
            assert_eq!(g.enumerate_words(6), language(&ast, 6), "{text} testing={testing}");
        }
    }
}

#[test]
fn fixture_grammars_are_unambiguous() {
    for text in fixture_expressions() {
        let g = compile_to_grammar(&parse_eesl(&text, &sigma()).unwrap());
        for w in g.enumerate_words(6) {
            assert_eq!(g.count_derivations(&w), 1, "{text}: {w:?}");
        }
    }
}

#[test]
fn sequential_choice_matches_hand_written_grammar() {
    let g = compile_to_grammar(&parse_eesl("(createOrder·(createAbort+createConfirm))*", &sigma()).unwrap());
    let reference = Grammar::from_dump(
        "W -> λ | createOrder A W\nA -> createAbort | createConfirm",
    )
    .unwrap();
    assert_eq!(g.enumerate_words(6), reference.enumerate_words(6));
}

#[test]
fn free_iteration_matches_hand_written_grammar() {
    let g = compile_to_grammar(&parse_eesl("(createOrder+createAbort+createConfirm)*", &sigma()).unwrap());
    let reference = Grammar::from_dump(
        "W -> λ | createOrder W | createAbort W | createConfirm W",
    )
    .unwrap();
    assert_eq!(g.enumerate_words(6), reference.enumerate_words(6));
    assert_eq!(g.alternatives(g.start).count(), 4);
}

#[test]
fn parallel_pair_without_markers() {
    let sigma = vec!["a".to_string(), "b".to_string()];
    let g = compile_to_grammar(&parse_eesl("a‖b", &sigma).unwrap());
    let stripped: BTreeSet<Word> = g
        .enumerate_words(6)
        .into_iter()
        .map(|w| w.into_iter().filter(|e| e != "beginP" && e != "endP").collect())
        .collect();
    assert_eq!(stripped, words(&[&["a"], &["b"], &["a", "b"], &["b", "a"]]));
}

#[test]
fn testing_mode_marks_each_input_once() {
    let ast = apply_testing_mode(&parse_eesl("createOrder·(createAbort‖createConfirm)", &sigma()).unwrap());
    let g = compile_to_grammar(&ast);
    for w in g.enumerate_words(8) {
        let begin = w.iter().position(|e| e == "beginP").unwrap();
        let end = w.iter().position(|e| e == "endP").unwrap();
        assert_eq!(w[0], "testSF");
        assert_eq!(w[begin - 1], "testSF");
        assert!(w[begin..end].iter().all(|e| e != "testSF"));
        assert_eq!(w.iter().filter(|e| *e == "testSF").count(), 2);
    }
}

#[test]
fn compilation_is_deterministic() {
    for text in fixture_expressions() {
        let a = compile_to_grammar(&parse_eesl(&text, &sigma()).unwrap()).dump();
        let b = compile_to_grammar(&parse_eesl(&text, &sigma()).unwrap()).dump();
        assert_eq!(a, b);
    }
}

#[test]
fn random_expressions_match_their_language() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sigma = vec!["a".to_string(), "b".to_string(), "c".to_string()];
    for _ in 0..200 {
        let ast = random_eesl(&mut rng, &sigma, 4);
        let g = compile_to_grammar(&ast);
        let lang = language(&ast, 5);
        assert_eq!(g.enumerate_words(5), lang, "{ast}");
        for w in &lang {
            assert_eq!(g.count_derivations(w), 1, "{ast}: {w:?}");
        }
    }
}

fn arb_eesl() -> impl Strategy<Value = Eesl> {
    let leaf = prop_oneof![
        Just(Eesl::Empty),
        prop::sample::select(vec!["a", "b", "c"]).prop_map(Eesl::atom),
        prop::sample::select(vec!["a", "b"]).prop_map(Eesl::test),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Eesl::union(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Eesl::concat(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Eesl::par(a, b)),
            inner.clone().prop_map(Eesl::star),
            inner.prop_map(Eesl::group),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn desugaring_preserves_the_language(ast in arb_eesl()) {
        let d = desugar(&ast);
        prop_assert!(!d.has_sugar());
        prop_assert_eq!(desugar(&d), d.clone());
        prop_assert_eq!(language(&d, 5), language(&ast, 5));
    }

    #[test]
    fn grammar_matches_sugared_language(ast in arb_eesl()) {
        let g = compile_to_grammar(&ast);
        prop_assert!(g.is_right_linear());
        prop_assert_eq!(g.enumerate_words(5), language(&ast, 5));
    }

    #[test]
    fn printed_expressions_reparse(ast in arb_eesl()) {
        let sigma = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let text = ast.to_string();
        let reparsed = parse_eesl(&text, &sigma).unwrap();
        prop_assert_eq!(language(&reparsed, 5), language(&ast, 5));
    }

    #[test]
    fn dump_round_trips(ast in arb_eesl()) {
        let g = compile_to_grammar(&ast);
        let back = Grammar::from_dump(&g.dump()).unwrap();
        prop_assert_eq!(back.enumerate_words(5), g.enumerate_words(5));
    }
}
