//! Evidence for verdicts: super-state transition graphs with property marks,
//! `AG`/`EF` evaluation over them, DOT rendering and trace formatting.
//!
//! Graph nodes are the stable states observed between external inputs: the
//! initial state, the state after every event outside a parallel group and
//! the state after every `endP`. States with equal valuation and running
//! copies are one node. A testing chart marks a node when it emits
//! `propertyHold` in the super-step of the `testSF` taken from that node, or
//! during any later super-step of the input leading into it.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::eesl::{Grammar, Symbol};
use crate::engine::{SimState, Simulator, Valuation};
use crate::model::{RunningCopy, BEGIN_P, END_P, TEST_SF};
use crate::play::{check_consistency, check_grammar, nonterminal_move, Id, PlayError, Trace, Verdict};

/// Longest edge label, in events, followed before giving up.
pub const MAX_LABEL_EVENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error(transparent)]
    Play(#[from] PlayError),
    #[error("model is inconsistent with the input; counterexample {0}")]
    Inconsistent(Trace),
    #[error("`{0}` is not a testing chart of the model")]
    UnknownProperty(String),
    #[error("a parallel group produces more than {MAX_LABEL_EVENTS} events")]
    UnboundedGroup,
    #[error("unknown temporal operator `{0}`; expected AG or EF")]
    UnknownOperator(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SuperState {
    pub q: Valuation,
    pub rl: BTreeSet<RunningCopy>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub state: SuperState,
    /// `var=value` lines followed by running copies.
    pub text: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// Each entry is one input: a single event or a comma-joined parallel
    /// group.
    pub labels: BTreeSet<String>,
}

impl Edge {
    /// Inputs joined with `;`.
    pub fn label(&self) -> String {
        self.labels.iter().cloned().collect::<Vec<_>>().join(";")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionGraph {
    /// Node 0 is the initial state; the rest in discovery order.
    pub nodes: Vec<Node>,
    /// Sorted by `(from, to)`.
    pub edges: Vec<Edge>,
    /// Names of the model's testing charts.
    pub properties: Vec<String>,
    /// `marks[n]` holds indices into `properties`.
    pub marks: Vec<BTreeSet<usize>>,
}

impl TransitionGraph {
    pub fn property_index(&self, name: &str) -> Result<usize, GraphError> {
        self.properties
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| GraphError::UnknownProperty(name.to_string()))
    }

    pub fn is_marked(&self, node: usize, property: usize) -> bool {
        self.marks[node].contains(&property)
    }

    pub fn mark_count(&self) -> usize {
        self.marks.iter().map(BTreeSet::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtlMode {
    /// On every state.
    AG,
    /// On some state.
    EF,
}

impl FromStr for CtlMode {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "AG" | "ag" => Ok(CtlMode::AG),
            "EF" | "ef" => Ok(CtlMode::EF),
            other => Err(GraphError::UnknownOperator(other.to_string())),
        }
    }
}

impl fmt::Display for CtlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CtlMode::AG => "AG",
            CtlMode::EF => "EF",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtlQuery {
    pub mode: CtlMode,
    /// Name of the testing chart whose `propertyHold` signals satisfaction.
    pub property: String,
}

impl CtlQuery {
    pub fn new(mode: CtlMode, property: &str) -> Self {
        CtlQuery {
            mode,
            property: property.to_string(),
        }
    }
}

/// Where an edge under construction started and what it has collected.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Pending {
    origin: usize,
    in_group: bool,
    label: Vec<String>,
    holds: BTreeSet<usize>,
}

struct Builder<'a> {
    sim: &'a Simulator,
    grammar: &'a Grammar,
    properties: Vec<usize>,
    index: HashMap<SuperState, usize>,
    nodes: Vec<Node>,
    edges: BTreeMap<(usize, usize), BTreeSet<String>>,
    marks: Vec<BTreeSet<usize>>,
}

impl Builder<'_> {
    fn node(&mut self, state: &SimState) -> usize {
        let key = SuperState {
            q: state.q.clone(),
            rl: state.rl.clone(),
        };
        if let Some(&n) = self.index.get(&key) {
            return n;
        }
        let mut text = self.sim.describe_q(&state.q);
        text.extend(state.rl.iter().map(|c| self.sim.describe_copy(c)));
        self.index.insert(key.clone(), self.nodes.len());
        self.nodes.push(Node { state: key, text });
        self.marks.push(BTreeSet::new());
        self.nodes.len() - 1
    }

    fn mark(&mut self, node: usize, charts: &BTreeSet<usize>) {
        for chart in charts {
            if let Some(p) = self.properties.iter().position(|c| c == chart) {
                self.marks[node].insert(p);
            }
        }
    }

    fn run(&mut self) -> Result<(), GraphError> {
        let root = Id::root(self.sim, self.grammar);
        let origin = self.node(&root.state());
        let start = Pending {
            origin,
            in_group: false,
            label: Vec::new(),
            holds: BTreeSet::new(),
        };
        let mut seen: HashSet<(Id, Pending)> = HashSet::new();
        let mut stack = vec![(root, start)];
        while let Some((id, pending)) = stack.pop() {
            if id.violated || id.w.is_empty() || !seen.insert((id.clone(), pending.clone())) {
                continue;
            }
            match id.w[0] {
                Symbol::V(_) => {
                    for child in nonterminal_move(self.grammar, &id).into_iter().rev() {
                        stack.push((child, pending.clone()));
                    }
                }
                Symbol::T(t) => {
                    let event = self.grammar.terminals[t as usize].clone();
                    let outcomes = self
                        .sim
                        .superstep_traced(&id.state(), &event)
                        .map_err(PlayError::from)?;
                    let tail = id.w[1..].to_vec();
                    let mut children = Vec::new();
                    for outcome in outcomes {
                        let child = Id::at(outcome.state, tail.clone());
                        if let Some(next) = self.advance(&pending, &event, &child, &outcome.holds)? {
                            children.push((child, next));
                        }
                    }
                    stack.extend(children.into_iter().rev());
                }
            }
        }
        Ok(())
    }

    fn advance(
        &mut self,
        pending: &Pending,
        event: &str,
        child: &Id,
        holds: &BTreeSet<usize>,
    ) -> Result<Option<Pending>, GraphError> {
        if child.violated {
            return Ok(None);
        }
        let mut next = pending.clone();
        match event {
            TEST_SF => {
                self.mark(pending.origin, holds);
                return Ok(Some(next));
            }
            BEGIN_P => {
                next.in_group = true;
                next.holds.extend(holds);
                return Ok(Some(next));
            }
            END_P => next.in_group = false,
            e => {
                next.label.push(e.to_string());
                if next.label.len() > MAX_LABEL_EVENTS {
                    return Err(GraphError::UnboundedGroup);
                }
                if next.in_group {
                    next.holds.extend(holds);
                    return Ok(Some(next));
                }
            }
        }
        next.holds.extend(holds);
        let to = self.node(&child.state());
        self.edges
            .entry((pending.origin, to))
            .or_default()
            .insert(next.label.join(","));
        let holds = std::mem::take(&mut next.holds);
        self.mark(to, &holds);
        next.origin = to;
        next.label.clear();
        Ok(Some(next))
    }
}

/// Builds the transition graph of a consistent model under `grammar`,
/// usually compiled from an expression in testing mode.
pub fn build_transition_graph(sim: &Simulator, grammar: &Grammar) -> Result<TransitionGraph, GraphError> {
    check_grammar(sim, grammar)?;
    if let Verdict::Inconsistent(trace) = check_consistency(sim, grammar)?.verdict {
        return Err(GraphError::Inconsistent(trace));
    }
    let model = sim.model();
    let properties: Vec<usize> = (0..model.charts.len())
        .filter(|&c| model.charts[c].is_testing_chart())
        .collect();
    let mut builder = Builder {
        sim,
        grammar,
        properties,
        index: HashMap::new(),
        nodes: Vec::new(),
        edges: BTreeMap::new(),
        marks: Vec::new(),
    };
    builder.run()?;
    Ok(TransitionGraph {
        properties: builder
            .properties
            .iter()
            .map(|&c| model.charts[c].name.clone())
            .collect(),
        nodes: builder.nodes,
        edges: builder
            .edges
            .into_iter()
            .map(|((from, to), labels)| Edge { from, to, labels })
            .collect(),
        marks: builder.marks,
    })
}

/// `AG p` holds when every node is marked for `p`, `EF p` when some node is.
pub fn eval_ctl(graph: &TransitionGraph, query: &CtlQuery) -> Result<bool, GraphError> {
    let p = graph.property_index(&query.property)?;
    let mut marked = (0..graph.nodes.len()).map(|n| graph.is_marked(n, p));
    Ok(match query.mode {
        CtlMode::AG => marked.all(|m| m),
        CtlMode::EF => marked.any(|m| m),
    })
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render_dot(graph: &TransitionGraph, filled: impl Fn(usize) -> bool) -> String {
    let mut out = String::new();
    out.push_str("digraph transitions {\n  rankdir=LR;\n  node [shape=box];\n");
    for (n, node) in graph.nodes.iter().enumerate() {
        let lines: Vec<String> = node.text.iter().map(|l| escape(l)).collect();
        let label = lines.join("\\n");
        if filled(n) {
            let _ = writeln!(out, "  n{n} [label=\"{label}\", style=filled, fillcolor=green];");
        } else {
            let _ = writeln!(out, "  n{n} [label=\"{label}\"];");
        }
    }
    for edge in &graph.edges {
        let _ = writeln!(
            out,
            "  n{} -> n{} [label=\"{}\"];",
            edge.from,
            edge.to,
            escape(&edge.label())
        );
    }
    out.push_str("}\n");
    out
}

/// DOT text. Nodes marked for every testing chart are filled green; a graph
/// without testing charts has no filled nodes.
pub fn emit_dot(graph: &TransitionGraph) -> String {
    let all = graph.properties.len();
    render_dot(graph, |n| all > 0 && graph.marks[n].len() == all)
}

/// DOT text with nodes marked for one testing chart filled green.
pub fn emit_dot_for(graph: &TransitionGraph, property: &str) -> Result<String, GraphError> {
    let p = graph.property_index(property)?;
    Ok(render_dot(graph, |n| graph.is_marked(n, p)))
}

/// Events joined with `·`, parallel groups as `[a,b]`, markers omitted.
pub fn format_trace(t: &Trace) -> String {
    t.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eesl::{apply_testing_mode, compile_to_grammar, parse_eesl};
    use crate::model::parse_model;

    const TOGGLE: &str = r#"
        object L { var on in {no, yes} init no; }
        external flip, poke;
        chart flip_on { instances: L; prechart: msg Env->L flip cold; main: assign L.on := yes; }
        chart is_on {
          instances: testControl;
          prechart: msg Env->testControl testSF cold;
          main:
            cond testControl (L.on = yes) cold;
            msg testControl->testControl propertyHold cold;
        }
    "#;

    fn graph(model: &str, expr: &str, testing: bool) -> TransitionGraph {
        let model = parse_model(model).unwrap();
        let mut ast = parse_eesl(expr, &model.external_events).unwrap();
        if testing {
            ast = apply_testing_mode(&ast);
        }
        let sim = Simulator::new(model).unwrap();
        build_transition_graph(&sim, &compile_to_grammar(&ast)).unwrap()
    }

    #[test]
    fn marks_follow_the_state() {
        let g = graph(TOGGLE, "poke·flip·poke", true);
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.properties, ["is_on"]);
        assert!(!g.is_marked(0, 0));
        assert!(g.is_marked(1, 0));
        let labels: Vec<(usize, usize, String)> =
            g.edges.iter().map(|e| (e.from, e.to, e.label())).collect();
        assert_eq!(
            labels,
            [(0, 0, "poke".into()), (0, 1, "flip".into()), (1, 1, "poke".into())]
        );
        assert!(eval_ctl(&g, &CtlQuery::new(CtlMode::EF, "is_on")).unwrap());
        assert!(!eval_ctl(&g, &CtlQuery::new(CtlMode::AG, "is_on")).unwrap());
    }

    #[test]
    fn parallel_labels_are_comma_joined() {
        let g = graph(TOGGLE, "flip‖poke", false);
        let labels: BTreeSet<String> = g.edges.iter().flat_map(|e| e.labels.clone()).collect();
        assert_eq!(
            labels,
            ["flip", "flip,poke", "poke", "poke,flip"].map(String::from).into()
        );
    }

    #[test]
    fn no_testing_charts_no_marks() {
        let model = TOGGLE.split("chart is_on").next().unwrap();
        let g = graph(model, "(flip+poke)*", false);
        assert!(g.properties.is_empty());
        assert_eq!(g.mark_count(), 0);
        assert!(!emit_dot(&g).contains("fillcolor"));
        assert_eq!(
            eval_ctl(&g, &CtlQuery::new(CtlMode::AG, "is_on")),
            Err(GraphError::UnknownProperty("is_on".into()))
        );
    }

    #[test]
    fn single_node_dot() {
        let g = graph(TOGGLE, "λ", true);
        assert_eq!(
            emit_dot(&g),
            "digraph transitions {\n  rankdir=LR;\n  node [shape=box];\n  n0 [label=\"L.on=no\"];\n}\n"
        );
    }

    #[test]
    fn operator_parsing() {
        assert_eq!("AG".parse::<CtlMode>().unwrap(), CtlMode::AG);
        assert_eq!("EF".parse::<CtlMode>().unwrap(), CtlMode::EF);
        assert!("AF".parse::<CtlMode>().is_err());
    }
}
