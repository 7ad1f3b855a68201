#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use lscheck::eesl::{Eesl, Grammar, Symbol};
use lscheck::engine::{SimState, Simulator};
use lscheck::model::{
    parse_model_unchecked, Chart, CmpOp, Element, ObjectDecl, Operand, PredAtom, Predicate,
    SystemModel, Temperature, VarDecl, VarRef, BEGIN_P, END_P, TEST_SF,
};
use lscheck::play::Id;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn load(files: &[&str]) -> SystemModel {
    let mut model = SystemModel::default();
    for f in files {
        let text = std::fs::read_to_string(fixture_path(f)).unwrap();
        model.merge(parse_model_unchecked(&text).unwrap());
    }
    model.validated().unwrap()
}

pub type Word = Vec<String>;

fn concat_sets(a: &BTreeSet<Word>, b: &BTreeSet<Word>, k: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for u in a {
        for v in b {
            if u.len() + v.len() <= k {
                out.insert(u.iter().chain(v).cloned().collect());
            }
        }
    }
    out
}

fn interleavings(u: &[String], v: &[String]) -> Vec<Word> {
    if u.is_empty() {
        return vec![v.to_vec()];
    }
    if v.is_empty() {
        return vec![u.to_vec()];
    }
    let mut out = Vec::new();
    for mut w in interleavings(&u[1..], v) {
        w.insert(0, u[0].clone());
        out.push(w);
    }
    for mut w in interleavings(u, &v[1..]) {
        w.insert(0, v[0].clone());
        out.push(w);
    }
    out
}

/// Words of length at most `k` denoted by an expression, computed directly
/// from the operator definitions (parallel and testing operators included).
pub fn language(e: &Eesl, k: usize) -> BTreeSet<Word> {
    let single = |s: &str| BTreeSet::from([vec![s.to_string()]]);
    match e {
        Eesl::Empty => BTreeSet::from([vec![]]),
        Eesl::Atom(a) => {
            if k >= 1 {
                single(a)
            } else {
                BTreeSet::new()
            }
        }
        Eesl::Group(a) => language(a, k),
        Eesl::Union(a, b) => language(a, k).union(&language(b, k)).cloned().collect(),
        Eesl::Concat(a, b) => concat_sets(&language(a, k), &language(b, k), k),
        Eesl::Star(a) => {
            let base = language(a, k);
            let mut all: BTreeSet<Word> = BTreeSet::from([vec![]]);
            loop {
                let next: BTreeSet<Word> = all.union(&concat_sets(&all, &base, k)).cloned().collect();
                if next == all {
                    return all;
                }
                all = next;
            }
        }
        Eesl::Test(a) => concat_sets(&single(TEST_SF), &language(a, k), k),
        Eesl::Shuffle(a, b) => shuffle_sets(&language(a, k), &language(b, k), k),
        Eesl::Par(a, b) => {
            let (la, lb) = (language(a, k), language(b, k));
            let mut inner: BTreeSet<Word> = la.union(&lb).cloned().collect();
            inner.extend(shuffle_sets(&la, &lb, k));
            concat_sets(&concat_sets(&single(BEGIN_P), &inner, k), &single(END_P), k)
        }
    }
}

fn shuffle_sets(a: &BTreeSet<Word>, b: &BTreeSet<Word>, k: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for u in a {
        for v in b {
            if u.len() + v.len() <= k {
                out.extend(interleavings(u, v));
            }
        }
    }
    out
}

pub fn grammar_words(g: &Grammar, k: usize) -> BTreeSet<Word> {
    g.enumerate_words(k)
}

/// All stable states reachable from `state` by exhaustively trying every
/// enabled internal event, without any memoization. Violating states are
/// kept as leaves.
pub fn stable_closure(sim: &Simulator, state: &SimState, depth: usize) -> BTreeSet<SimState> {
    assert!(depth < 200, "oracle exploration too deep");
    if state.violated {
        return BTreeSet::from([state.clone()]);
    }
    let events = sim.enabled_internal_events(state).unwrap();
    if events.is_empty() {
        return BTreeSet::from([state.clone()]);
    }
    let mut out = BTreeSet::new();
    for e in &events {
        for next in sim.apply_step(state, e).unwrap() {
            out.extend(stable_closure(sim, &next, depth + 1));
        }
    }
    out
}

pub fn oracle_superstep(sim: &Simulator, state: &SimState, event: &str) -> BTreeSet<SimState> {
    let broadcast = sim.event(event).unwrap();
    let mut out = BTreeSet::new();
    for s in sim.apply_step(state, &broadcast).unwrap() {
        out.extend(stable_closure(sim, &s, 0));
    }
    out
}

/// Length of the shortest prefix of `word` along which some run violates.
pub fn failing_prefix(sim: &Simulator, word: &[String]) -> Option<usize> {
    let mut states = BTreeSet::from([sim.initial_state()]);
    for (i, event) in word.iter().enumerate() {
        let mut next = BTreeSet::new();
        for s in &states {
            next.extend(oracle_superstep(sim, s, event));
        }
        if next.iter().any(|s| s.violated) {
            return Some(i + 1);
        }
        states = next;
    }
    None
}

/// Brute-force verdict: `Some(word prefix)` for the shortest failing prefix
/// over every word in `words`, shortest first and then lexicographic.
pub fn brute_force_verdict(sim: &Simulator, words: &BTreeSet<Word>) -> Option<Word> {
    let mut best: Option<Word> = None;
    for w in words {
        if let Some(n) = failing_prefix(sim, w) {
            let p = w[..n].to_vec();
            if best.as_ref().is_none_or(|b| (p.len(), &p) < (b.len(), b)) {
                best = Some(p);
            }
        }
    }
    best
}

/// Observation-point states found by breadth-first search over the ID
/// space: the initial state and the states after each external event
/// outside a parallel group or after `endP`.
pub fn observed_states(sim: &Simulator, g: &Grammar) -> BTreeSet<(Vec<u8>, Vec<String>)> {
    let key = |s: &SimState| {
        (
            s.q.0.clone(),
            s.rl.iter().map(|c| sim.describe_copy(c)).collect::<Vec<_>>(),
        )
    };
    let root = Id::root(sim, g);
    let mut out = BTreeSet::from([key(&root.state())]);
    let mut seen = HashSet::new();
    let mut queue = std::collections::VecDeque::from([(root, false)]);
    while let Some((id, in_group)) = queue.pop_front() {
        if id.violated || !seen.insert((id.clone(), in_group)) {
            continue;
        }
        match id.w.first() {
            None => {}
            Some(&Symbol::V(v)) => {
                for alt in g.alternatives(v) {
                    let mut w = alt.to_vec();
                    w.extend_from_slice(&id.w[1..]);
                    queue.push_back((Id { w, ..id.clone() }, in_group));
                }
            }
            Some(&Symbol::T(t)) => {
                let event = g.terminals[t as usize].as_str();
                for s in sim.superstep(&id.state(), event).unwrap() {
                    let group = match event {
                        BEGIN_P => true,
                        END_P => false,
                        _ => in_group,
                    };
                    let observed = match event {
                        TEST_SF | BEGIN_P => false,
                        END_P => true,
                        _ => !in_group,
                    };
                    if observed && !s.violated {
                        out.insert(key(&s));
                    }
                    queue.push_back((Id::at(s, id.w[1..].to_vec()), group));
                }
            }
        }
    }
    out
}

/// A small random model: two objects, up to three charts, domains of up to
/// three values. Chart `i` can only be triggered by external events or by
/// internal messages sent from charts with a smaller index, so internal
/// events never cycle.
pub fn random_model(rng: &mut impl Rng) -> SystemModel {
    let externals = ["e0", "e1", "e2"];
    let objects: Vec<ObjectDecl> = (0..2)
        .map(|o| {
            let size = rng.gen_range(1..=3);
            let domain: Vec<String> = (0..size).map(|v| format!("v{v}")).collect();
            ObjectDecl {
                name: format!("O{o}"),
                vars: vec![VarDecl {
                    name: "s".into(),
                    init: domain[0].clone(),
                    domain,
                }],
            }
        })
        .collect();
    let temperature = |rng: &mut dyn rand::RngCore| {
        if rng.gen_bool(0.5) {
            Temperature::Hot
        } else {
            Temperature::Cold
        }
    };
    let n_charts = rng.gen_range(1..=3);
    let mut charts = Vec::new();
    for c in 0..n_charts {
        let mut prechart = Vec::new();
        if c > 0 && rng.gen_bool(0.4) {
            let from = rng.gen_range(0..c);
            prechart.push(Element::message("O0", "O1", &format!("m{from}"), Temperature::Cold));
        } else {
            let dst = if rng.gen_bool(0.5) { "O0" } else { "O1" };
            let ext = externals.choose(rng).unwrap();
            prechart.push(Element::message("Env", dst, ext, Temperature::Cold));
        }
        if rng.gen_bool(0.3) {
            let ext = externals.choose(rng).unwrap();
            prechart.push(Element::message("Env", "O1", ext, Temperature::Cold));
        }
        let mut main = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let o = rng.gen_range(0..2);
            let obj = &objects[o];
            let domain = &obj.vars[0].domain;
            let value = domain.choose(rng).unwrap().clone();
            match rng.gen_range(0..4) {
                0 => main.push(Element::assignment(&obj.name, "s", &value)),
                1 => {
                    let op = if rng.gen_bool(0.5) { CmpOp::Eq } else { CmpOp::Ne };
                    main.push(Element::condition(
                        &obj.name,
                        Predicate(vec![PredAtom::Cmp {
                            lhs: VarRef::new(obj.name.clone(), "s"),
                            op,
                            rhs: Operand::Literal(value),
                        }]),
                        temperature(rng),
                    ));
                }
                2 => main.push(Element::message("O0", "O1", &format!("m{c}"), temperature(rng))),
                _ => {
                    let ext = externals.choose(rng).unwrap();
                    main.push(Element::message("Env", "O0", ext, temperature(rng)));
                }
            }
        }
        charts.push(Chart {
            name: format!("c{c}"),
            instances: vec!["O0".into(), "O1".into()],
            prechart,
            main,
            atomic: rng.gen_bool(0.2),
        });
    }
    SystemModel {
        objects,
        external_events: externals.iter().map(|s| s.to_string()).collect(),
        charts,
    }
}

/// A random expression over `alphabet` with at most `depth` nested
/// operators.
pub fn random_eesl(rng: &mut impl Rng, alphabet: &[String], depth: u32) -> Eesl {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.1) {
            Eesl::Empty
        } else {
            Eesl::Atom(alphabet.choose(rng).unwrap().clone())
        };
    }
    let sub = |rng: &mut _| random_eesl(rng, alphabet, depth - 1);
    match rng.gen_range(0..5) {
        0 => Eesl::union(sub(rng), sub(rng)),
        1 | 2 => Eesl::concat(sub(rng), sub(rng)),
        3 => Eesl::star(sub(rng)),
        _ => Eesl::group(sub(rng)),
    }
}
