//! The PLAY-tree of a model driven by an external event grammar.
//!
//! An instantaneous description [`Id`] is `(Q, W, RL, B)`: object valuation,
//! sentential form, running copies and violation flag. Terminal moves consume
//! the leading event of `W` through one super-step, nonterminal moves expand
//! the leading variable. The model is consistent with the grammar when no
//! branch reaches an `Id` with `B` set.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::eesl::{Grammar, Symbol};
use crate::engine::{EngineError, SimState, Simulator, Valuation};
use crate::model::{is_marker_event, RunningCopy, BEGIN_P, END_P, TEST_SF};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlayError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("grammar is not right-linear; only regular event languages are supported")]
    UnsupportedGrammar,
    #[error("grammar terminal `{0}` is not an external event of the model")]
    UnknownTerminal(String),
    #[error("trace {0} does not reach a violation")]
    NotAFailure(Trace),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Id {
    pub q: Valuation,
    pub w: Vec<Symbol>,
    pub rl: BTreeSet<RunningCopy>,
    pub violated: bool,
}

impl Id {
    /// `(Q0, V0, ∅, False)`
    pub fn root(sim: &Simulator, grammar: &Grammar) -> Id {
        Id::at(sim.initial_state(), vec![Symbol::V(grammar.start)])
    }

    pub fn at(state: SimState, w: Vec<Symbol>) -> Id {
        Id {
            q: state.q,
            w,
            rl: state.rl,
            violated: state.violated,
        }
    }

    pub fn state(&self) -> SimState {
        SimState {
            q: self.q.clone(),
            rl: self.rl.clone(),
            violated: self.violated,
        }
    }

    pub fn describe(&self, sim: &Simulator, grammar: &Grammar) -> String {
        let rl: Vec<String> = self.rl.iter().map(|c| sim.describe_copy(c)).collect();
        format!(
            "({{{}}}, {}, {{{}}}, {})",
            sim.describe_q(&self.q).join(", "),
            grammar.form_text(&self.w),
            rl.join(", "),
            if self.violated { "True" } else { "False" }
        )
    }
}

/// IDs already expanded during one traversal.
#[derive(Debug, Clone, Default)]
pub struct MemoTable {
    seen: HashSet<Id>,
}

impl MemoTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` if the ID was already present.
    pub fn insert(&mut self, id: Id) -> bool {
        self.seen.insert(id)
    }

    pub fn contains(&self, id: &Id) -> bool {
        self.seen.contains(id)
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Id> {
        self.seen.iter()
    }
}

/// External events of a branch in execution order, marker events included.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace(pub Vec<String>);

/// A displayable trace element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceItem {
    Event(String),
    /// Events between `beginP` and `endP`, in execution order.
    Group(Vec<String>),
}

impl Trace {
    pub fn new<S: Into<String>>(events: impl IntoIterator<Item = S>) -> Self {
        Trace(events.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Drops `testSF` and folds every `beginP … endP` span into a group. An
    /// unterminated span is still shown as a group.
    pub fn items(&self) -> Vec<TraceItem> {
        let mut out = Vec::new();
        let mut group: Option<Vec<String>> = None;
        for event in &self.0 {
            match event.as_str() {
                TEST_SF => {}
                BEGIN_P => group = Some(Vec::new()),
                END_P => {
                    if let Some(g) = group.take() {
                        out.push(TraceItem::Group(g));
                    }
                }
                e => match &mut group {
                    Some(g) => g.push(e.to_string()),
                    None => out.push(TraceItem::Event(e.to_string())),
                },
            }
        }
        if let Some(g) = group {
            out.push(TraceItem::Group(g));
        }
        out
    }

    /// The trace without marker events.
    pub fn external_events(&self) -> Vec<&str> {
        self.0
            .iter()
            .map(String::as_str)
            .filter(|e| !is_marker_event(e))
            .collect()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .items()
            .into_iter()
            .map(|item| match item {
                TraceItem::Event(e) => e,
                TraceItem::Group(g) => format!("[{}]", g.join(",")),
            })
            .collect();
        f.write_str(&parts.join("·"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent(Trace),
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckStats {
    pub terminal_moves: usize,
    pub nonterminal_moves: usize,
    pub memo_hits: usize,
    pub success_leaves: usize,
    /// Success leaves that still have running copies.
    pub open_success_leaves: usize,
    pub max_depth: usize,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub verdict: Verdict,
    /// The failure trace as first found by the traversal, before
    /// minimization.
    pub first_trace: Option<Trace>,
    pub memo: MemoTable,
    pub stats: CheckStats,
    pub warnings: Vec<String>,
}

/// Rejects grammars the traversal cannot handle.
pub fn check_grammar(sim: &Simulator, grammar: &Grammar) -> Result<(), PlayError> {
    if !grammar.is_right_linear() {
        return Err(PlayError::UnsupportedGrammar);
    }
    let model = sim.model();
    for t in &grammar.terminals {
        if !model.is_external(t) && !is_marker_event(t) {
            return Err(PlayError::UnknownTerminal(t.clone()));
        }
    }
    Ok(())
}

/// One child per stable state of the super-step on the leading event of `W`.
pub fn terminal_move(sim: &Simulator, grammar: &Grammar, id: &Id) -> Result<Vec<Id>, PlayError> {
    let Some(&Symbol::T(t)) = id.w.first() else {
        panic!("terminal move on a form without a leading event");
    };
    let event = &grammar.terminals[t as usize];
    let tail = id.w[1..].to_vec();
    Ok(sim
        .superstep(&id.state(), event)?
        .into_iter()
        .map(|state| Id::at(state, tail.clone()))
        .collect())
}

/// One child per production of the leading variable of `W`, in grammar
/// order.
pub fn nonterminal_move(grammar: &Grammar, id: &Id) -> Vec<Id> {
    let Some(&Symbol::V(v)) = id.w.first() else {
        panic!("nonterminal move on a form without a leading variable");
    };
    grammar
        .alternatives(v)
        .map(|alt| {
            let mut w = alt.to_vec();
            w.extend_from_slice(&id.w[1..]);
            Id { w, ..id.clone() }
        })
        .collect()
}

fn form_is_right_linear(w: &[Symbol]) -> bool {
    matches!(w, [] | [Symbol::V(_)] | [Symbol::T(_)] | [Symbol::T(_), Symbol::V(_)])
}

/// Memoized depth-first traversal from `id`. Returns `(true, trace)` for the
/// first violating leaf in depth-first order, `(false, tr)` otherwise. Events
/// of terminal moves are appended to `tr`.
pub fn mdft(
    sim: &Simulator,
    grammar: &Grammar,
    id: Id,
    tr: Trace,
    gt: &mut MemoTable,
) -> Result<(bool, Trace), PlayError> {
    let mut stats = CheckStats::default();
    mdft_with_stats(sim, grammar, id, tr, gt, &mut stats)
}

fn mdft_with_stats(
    sim: &Simulator,
    grammar: &Grammar,
    id: Id,
    tr: Trace,
    gt: &mut MemoTable,
    stats: &mut CheckStats,
) -> Result<(bool, Trace), PlayError> {
    check_grammar(sim, grammar)?;
    let mut stack = vec![(id, tr.clone(), 0usize)];
    while let Some((id, trace, depth)) = stack.pop() {
        debug_assert!(form_is_right_linear(&id.w), "non right-linear form");
        stats.max_depth = stats.max_depth.max(depth);
        if id.violated {
            return Ok((true, trace));
        }
        if id.w.is_empty() {
            stats.success_leaves += 1;
            if !id.rl.is_empty() {
                stats.open_success_leaves += 1;
            }
            continue;
        }
        if gt.contains(&id) {
            stats.memo_hits += 1;
            continue;
        }
        gt.insert(id.clone());
        match id.w[0] {
            Symbol::T(t) => {
                stats.terminal_moves += 1;
                let mut next = trace.clone();
                next.0.push(grammar.terminals[t as usize].clone());
                let children = terminal_move(sim, grammar, &id)?;
                for child in children.into_iter().rev() {
                    stack.push((child, next.clone(), depth + 1));
                }
            }
            Symbol::V(_) => {
                stats.nonterminal_moves += 1;
                for child in nonterminal_move(grammar, &id).into_iter().rev() {
                    stack.push((child, trace.clone(), depth + 1));
                }
            }
        }
    }
    Ok((false, tr))
}

/// Runs the traversal from the root and minimizes any failure trace.
pub fn check_consistency(sim: &Simulator, grammar: &Grammar) -> Result<CheckReport, PlayError> {
    check_grammar(sim, grammar)?;
    let mut memo = MemoTable::new();
    let mut stats = CheckStats::default();
    let root = Id::root(sim, grammar);
    let (failed, trace) = mdft_with_stats(sim, grammar, root, Trace::default(), &mut memo, &mut stats)?;
    let mut warnings: Vec<String> = grammar
        .dead_variables()
        .into_iter()
        .map(|v| format!("grammar variable {v} has no productions"))
        .collect();
    if stats.open_success_leaves > 0 {
        warnings.push(format!(
            "{} accepted input(s) end with charts still running",
            stats.open_success_leaves
        ));
    }
    let (verdict, first_trace) = if failed {
        let least = minimize_failure_trace(sim, grammar, &trace)?;
        (Verdict::Inconsistent(least), Some(trace))
    } else {
        (Verdict::Consistent, None)
    };
    Ok(CheckReport {
        verdict,
        first_trace,
        memo,
        stats,
        warnings,
    })
}

/// Expands leading variables until every form is empty or starts with an
/// event. Unit cycles are cut by remembering visited IDs.
fn saturate(grammar: &Grammar, ids: Vec<Id>) -> BTreeSet<Id> {
    let mut out = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut stack = ids;
    while let Some(id) = stack.pop() {
        if !seen.insert(id.clone()) {
            continue;
        }
        match id.w.first() {
            Some(Symbol::V(_)) => stack.extend(nonterminal_move(grammar, &id)),
            _ => {
                out.insert(id);
            }
        }
    }
    out
}

/// Shortest prefix of `t` that some branch follows exactly into a violating
/// leaf. All branches reading each prefix are explored breadth-first.
pub fn minimize_failure_trace(
    sim: &Simulator,
    grammar: &Grammar,
    t: &Trace,
) -> Result<Trace, PlayError> {
    let mut frontier = saturate(grammar, vec![Id::root(sim, grammar)]);
    for (i, event) in t.0.iter().enumerate() {
        let Some(sym) = grammar.terminal(event) else {
            break;
        };
        let mut next = Vec::new();
        for id in &frontier {
            if id.w.first() == Some(&Symbol::T(sym)) {
                next.extend(terminal_move(sim, grammar, id)?);
            }
        }
        if next.iter().any(|id| id.violated) {
            return Ok(Trace(t.0[..=i].to_vec()));
        }
        frontier = saturate(grammar, next);
    }
    Err(PlayError::NotAFailure(t.clone()))
}

/// Upper bound on the number of distinct IDs: valuations × sentential forms
/// × sets of running copies × 2. Saturates at `u128::MAX`.
pub fn id_space_bound(sim: &Simulator, grammar: &Grammar) -> u128 {
    let model = sim.model();
    let q_space = model
        .var_slots()
        .fold(1u128, |acc, (_, d)| acc.saturating_mul(d.domain.len() as u128));
    let mut forms: BTreeSet<Vec<Symbol>> = BTreeSet::new();
    forms.insert(vec![]);
    for v in 0..grammar.variables.len() as u32 {
        forms.insert(vec![Symbol::V(v)]);
    }
    for p in &grammar.productions {
        forms.insert(p.rhs.clone());
        if p.rhs.len() > 1 {
            forms.insert(p.rhs[1..].to_vec());
        }
    }
    let copies: u32 = model
        .charts
        .iter()
        .map(|c| c.shape().legal_cuts().len() as u32)
        .sum();
    let rl_space = if copies >= 127 {
        u128::MAX
    } else {
        1u128 << copies
    };
    q_space
        .saturating_mul(forms.len() as u128)
        .saturating_mul(rl_space)
        .saturating_mul(2)
}
