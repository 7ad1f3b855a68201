//! Step and super-step semantics over simulator states.
//!
//! A [`SimState`] is the triple of object valuation, running chart copies and
//! violation flag. [`Simulator::apply_step`] processes one event;
//! [`Simulator::superstep`] processes one external event and then every
//! enabled internal event in every interleaving until the state is stable.
//!
//! Event handling for a message event `e`:
//!
//! 1. every chart with a minimal message `e` gets a fresh copy at the zero cut;
//! 2. every copy with `e` enabled passes it; a copy that mentions `e` but does
//!    not have it enabled is discarded when pre-active, exits when active at a
//!    cold cut, and sets the violation flag when active at a hot cut;
//! 3. copies that reach their final cut are removed.
//!
//! Conditions, assignments, syncs and `propertyHold` are hidden steps local to
//! one copy. A false condition discards the copy, or sets the violation flag
//! when it is a hot main chart condition.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::model::{
    is_marker_event, ChartShape, CmpOp, ElementKind, Mode, ModelError, Operand, PredAtom,
    RunningCopy, SystemModel, PROPERTY_HOLD,
};

pub const DEFAULT_MAX_INTERNAL_STEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("event `{0}` is not known to the model")]
    UnknownEvent(String),
    #[error("`{0}` is not an external or marker event")]
    NotExternal(String),
    #[error("state is not stable")]
    Unstable,
    #[error("state is violating; no further moves")]
    Violated,
    #[error("hidden step refers to a copy that is not running")]
    StaleStep,
    #[error("internal events diverge: more than {limit} steps without reaching a stable state")]
    Divergence { limit: usize },
}

/// Domain indices of every state variable, in [`SystemModel::var_slots`] order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(pub Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimState {
    pub q: Valuation,
    pub rl: BTreeSet<RunningCopy>,
    pub violated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventClass {
    External,
    Internal,
    Hidden,
}

/// A copy-local step: which copy performs which of its elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalStep {
    pub copy: RunningCopy,
    pub element: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemEvent {
    pub name: String,
    pub class: EventClass,
    /// Set for hidden events only.
    pub local: Option<LocalStep>,
}

impl SystemEvent {
    pub fn external(name: &str) -> Self {
        SystemEvent {
            name: name.to_string(),
            class: EventClass::External,
            local: None,
        }
    }

    pub fn internal(name: &str) -> Self {
        SystemEvent {
            name: name.to_string(),
            class: EventClass::Internal,
            local: None,
        }
    }
}

impl fmt::Display for SystemEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Order in which enabled events are explored inside a super-step. The result
/// set does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExploreOrder {
    #[default]
    Canonical,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub max_internal_steps: usize,
    pub order: ExploreOrder,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_internal_steps: DEFAULT_MAX_INTERNAL_STEPS,
            order: ExploreOrder::Canonical,
        }
    }
}

/// A stable state reached by a super-step, with the testing charts that
/// emitted `propertyHold` on the way.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome {
    pub state: SimState,
    pub holds: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
enum Atom {
    Const(bool),
    Lit { slot: usize, eq: bool, value: u8 },
    Vars { lhs: usize, rhs: usize, eq: bool },
}

#[derive(Debug, Clone)]
enum Action {
    Message { event: String, hidden: bool },
    Condition(Vec<Atom>),
    Assign { slot: usize, value: u8 },
    Sync,
}

#[derive(Debug, Clone)]
struct CompiledChart {
    name: String,
    shape: ChartShape,
    actions: Vec<Action>,
    hot: Vec<bool>,
    labels: Vec<String>,
    constrained: HashSet<String>,
    triggers: HashSet<String>,
    atomic: bool,
}

impl CompiledChart {
    fn enabled_message(&self, copy: &RunningCopy, event: &str) -> Option<usize> {
        self.shape.enabled(&copy.cut).find(|&e| {
            matches!(&self.actions[e], Action::Message { event: ev, hidden: false } if ev == event)
        })
    }

    fn hot_cut(&self, copy: &RunningCopy) -> bool {
        copy.mode == Mode::Active
            && self
                .shape
                .enabled(&copy.cut)
                .any(|e| self.shape.in_main(e) && self.hot[e])
    }

    /// The copy after passing `element`, or `None` when the chart completed.
    fn passed(&self, copy: &RunningCopy, element: usize) -> Option<RunningCopy> {
        let cut = self.shape.advance(&copy.cut, element);
        if self.shape.is_final(&cut) {
            None
        } else {
            Some(RunningCopy {
                chart: copy.chart,
                mode: self.shape.mode_of(&cut),
                cut,
            })
        }
    }
}

/// A validated model prepared for simulation.
#[derive(Debug, Clone)]
pub struct Simulator {
    model: SystemModel,
    charts: Vec<CompiledChart>,
    domains: Vec<Vec<String>>,
    config: EngineConfig,
}

impl Simulator {
    pub fn new(model: SystemModel) -> Result<Self, ModelError> {
        Self::with_config(model, EngineConfig::default())
    }

    pub fn with_config(model: SystemModel, config: EngineConfig) -> Result<Self, ModelError> {
        let diagnostics = crate::model::validate_model(&model);
        if !diagnostics.is_empty() {
            return Err(ModelError::Invalid(diagnostics));
        }
        let domains: Vec<Vec<String>> = model.var_slots().map(|(_, d)| d.domain.clone()).collect();
        let value_of = |slot: usize, lit: &str| -> u8 {
            domains[slot].iter().position(|v| v == lit).expect("validated") as u8
        };
        let mut charts = Vec::new();
        for chart in &model.charts {
            let shape = chart.shape();
            let mut actions = Vec::new();
            let mut hot = Vec::new();
            let mut labels = Vec::new();
            for element in chart.elements() {
                let action = match &element.kind {
                    ElementKind::Message { event, .. } => Action::Message {
                        event: event.clone(),
                        hidden: event == PROPERTY_HOLD,
                    },
                    ElementKind::Condition { predicate, .. } => Action::Condition(
                        predicate
                            .0
                            .iter()
                            .map(|atom| match atom {
                                PredAtom::Const(b) => Atom::Const(*b),
                                PredAtom::Cmp { lhs, op, rhs } => {
                                    let slot = model.slot_of(lhs).expect("validated");
                                    let eq = *op == CmpOp::Eq;
                                    match rhs {
                                        Operand::Literal(lit) => Atom::Lit {
                                            slot,
                                            eq,
                                            value: value_of(slot, lit),
                                        },
                                        Operand::Var(v) => Atom::Vars {
                                            lhs: slot,
                                            rhs: model.slot_of(v).expect("validated"),
                                            eq,
                                        },
                                    }
                                }
                            })
                            .collect(),
                    ),
                    ElementKind::Assignment {
                        instance,
                        var,
                        value,
                    } => {
                        let slot = model
                            .slot_of(&crate::model::VarRef::new(instance.clone(), var.clone()))
                            .expect("validated");
                        Action::Assign {
                            slot,
                            value: value_of(slot, value),
                        }
                    }
                    ElementKind::Sync { .. } => Action::Sync,
                };
                actions.push(action);
                hot.push(element.temperature.is_hot());
                labels.push(element.to_string());
            }
            let zero = shape.zero_cut();
            let triggers = shape
                .enabled(&zero)
                .filter_map(|e| match &actions[e] {
                    Action::Message {
                        event,
                        hidden: false,
                    } => Some(event.clone()),
                    _ => None,
                })
                .collect();
            charts.push(CompiledChart {
                name: chart.name.clone(),
                constrained: chart
                    .constrained_events()
                    .into_iter()
                    .map(str::to_string)
                    .collect(),
                shape,
                actions,
                hot,
                labels,
                triggers,
                atomic: chart.atomic,
            });
        }
        Ok(Simulator {
            model,
            charts,
            domains,
            config,
        })
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn set_config(&mut self, config: EngineConfig) {
        self.config = config;
    }

    pub fn initial_state(&self) -> SimState {
        initial_state(&self.model)
    }

    /// Literal value of `slot` in `q`.
    pub fn value(&self, q: &Valuation, slot: usize) -> &str {
        &self.domains[slot][q.0[slot] as usize]
    }

    /// `obj.var` lookup by name.
    pub fn lookup(&self, q: &Valuation, object: &str, var: &str) -> Option<&str> {
        let slot = self
            .model
            .slot_of(&crate::model::VarRef::new(object, var))?;
        Some(self.value(q, slot))
    }

    fn classify(&self, name: &str) -> Option<EventClass> {
        if self.model.is_external(name) || is_marker_event(name) {
            Some(EventClass::External)
        } else if self.charts.iter().any(|c| c.constrained.contains(name)) {
            Some(EventClass::Internal)
        } else {
            None
        }
    }

    /// Looks up a message event by name, classifying it.
    pub fn event(&self, name: &str) -> Result<SystemEvent, EngineError> {
        match self.classify(name) {
            Some(class) => Ok(SystemEvent {
                name: name.to_string(),
                class,
                local: None,
            }),
            None => Err(EngineError::UnknownEvent(name.to_string())),
        }
    }

    fn eval(&self, q: &Valuation, atoms: &[Atom]) -> bool {
        atoms.iter().all(|atom| match *atom {
            Atom::Const(b) => b,
            Atom::Lit { slot, eq, value } => (q.0[slot] == value) == eq,
            Atom::Vars { lhs, rhs, eq } => (self.value(q, lhs) == self.value(q, rhs)) == eq,
        })
    }

    /// Internal and hidden events that can be executed next, in canonical
    /// order (chart name, copy, element).
    pub fn enabled_internal_events(&self, state: &SimState) -> Result<Vec<SystemEvent>, EngineError> {
        if state.violated {
            return Err(EngineError::Violated);
        }
        Ok(self.enabled_unchecked(state))
    }

    fn enabled_unchecked(&self, state: &SimState) -> Vec<SystemEvent> {
        let mut copies: Vec<&RunningCopy> = state.rl.iter().collect();
        copies.sort_by(|a, b| {
            self.charts[a.chart]
                .name
                .cmp(&self.charts[b.chart].name)
                .then_with(|| a.cmp(b))
        });

        // An active atomic copy runs alone once it has started its main chart.
        let atomic_active: Vec<&RunningCopy> = copies
            .iter()
            .copied()
            .filter(|c| {
                let chart = &self.charts[c.chart];
                chart.atomic
                    && c.mode == Mode::Active
                    && chart.shape.enabled(&c.cut).next().is_some()
            })
            .collect();
        let started = atomic_active.iter().copied().find(|c| {
            let shape = &self.charts[c.chart].shape;
            (shape.pre_len..shape.len()).any(|e| shape.is_passed(&c.cut, e))
        });
        let scope: Vec<&RunningCopy> = match started {
            Some(c) => vec![c],
            None if !atomic_active.is_empty() => atomic_active,
            None => copies,
        };

        let mut out = Vec::new();
        let mut seen_internal = HashSet::new();
        for copy in scope {
            let chart = &self.charts[copy.chart];
            for e in chart.shape.enabled(&copy.cut) {
                let local = || {
                    Some(LocalStep {
                        copy: copy.clone(),
                        element: e,
                    })
                };
                match &chart.actions[e] {
                    Action::Message { event, hidden } => {
                        if *hidden {
                            out.push(SystemEvent {
                                name: event.clone(),
                                class: EventClass::Hidden,
                                local: local(),
                            });
                        } else if copy.mode == Mode::Active
                            && chart.shape.in_main(e)
                            && self.classify(event) == Some(EventClass::Internal)
                            && seen_internal.insert(event.clone())
                        {
                            out.push(SystemEvent::internal(event));
                        }
                    }
                    _ => out.push(SystemEvent {
                        name: chart.labels[e].clone(),
                        class: EventClass::Hidden,
                        local: local(),
                    }),
                }
            }
        }
        out
    }

    pub fn is_stable(&self, state: &SimState) -> bool {
        state.violated || self.enabled_unchecked(state).is_empty()
    }

    /// One transition. The relation is functional here, so the set has one
    /// element; callers treat it as a set.
    pub fn apply_step(
        &self,
        state: &SimState,
        event: &SystemEvent,
    ) -> Result<BTreeSet<SimState>, EngineError> {
        Ok(BTreeSet::from([self.step(state, event)?.0]))
    }

    /// The successor state and the chart that emitted `propertyHold`, if any.
    fn step(
        &self,
        state: &SimState,
        event: &SystemEvent,
    ) -> Result<(SimState, Option<usize>), EngineError> {
        if state.violated {
            return Err(EngineError::Violated);
        }
        match &event.local {
            Some(step) => self.local_step(state, step),
            None => {
                if self.classify(&event.name).is_none() {
                    return Err(EngineError::UnknownEvent(event.name.clone()));
                }
                Ok((self.broadcast(state, &event.name), None))
            }
        }
    }

    fn broadcast(&self, state: &SimState, event: &str) -> SimState {
        let mut copies: BTreeSet<RunningCopy> = state.rl.clone();
        for (idx, chart) in self.charts.iter().enumerate() {
            if chart.triggers.contains(event) {
                let cut = chart.shape.zero_cut();
                copies.insert(RunningCopy {
                    chart: idx,
                    mode: chart.shape.mode_of(&cut),
                    cut,
                });
            }
        }
        let mut next = SimState {
            q: state.q.clone(),
            rl: BTreeSet::new(),
            violated: state.violated,
        };
        for copy in copies {
            let chart = &self.charts[copy.chart];
            match chart.enabled_message(&copy, event) {
                Some(e) => next.rl.extend(chart.passed(&copy, e)),
                None if chart.constrained.contains(event) => {
                    if chart.hot_cut(&copy) {
                        next.violated = true;
                    }
                }
                None => {
                    next.rl.insert(copy);
                }
            }
        }
        next
    }

    fn local_step(
        &self,
        state: &SimState,
        step: &LocalStep,
    ) -> Result<(SimState, Option<usize>), EngineError> {
        if !state.rl.contains(&step.copy) {
            return Err(EngineError::StaleStep);
        }
        let chart = &self.charts[step.copy.chart];
        if !chart.shape.is_enabled(&step.copy.cut, step.element) {
            return Err(EngineError::StaleStep);
        }
        let mut next = state.clone();
        next.rl.remove(&step.copy);
        let mut hold = None;
        let mut keep = true;
        match &chart.actions[step.element] {
            Action::Assign { slot, value } => next.q.0[*slot] = *value,
            Action::Condition(atoms) => {
                if !self.eval(&state.q, atoms) {
                    keep = false;
                    if chart.shape.in_main(step.element) && chart.hot[step.element] {
                        next.violated = true;
                    }
                }
            }
            Action::Sync => {}
            Action::Message { .. } => hold = Some(step.copy.chart),
        }
        if keep {
            next.rl.extend(chart.passed(&step.copy, step.element));
        }
        Ok((next, hold))
    }

    fn check_superstep_input(&self, state: &SimState, event: &str) -> Result<(), EngineError> {
        if !self.model.is_external(event) && !is_marker_event(event) {
            return Err(match self.classify(event) {
                Some(_) => EngineError::NotExternal(event.to_string()),
                None => EngineError::UnknownEvent(event.to_string()),
            });
        }
        if state.violated {
            return Err(EngineError::Violated);
        }
        if !self.is_stable(state) {
            return Err(EngineError::Unstable);
        }
        Ok(())
    }

    /// All stable states reachable by processing external event `a` and then
    /// every enabled internal event in every interleaving.
    pub fn superstep(&self, state: &SimState, a: &str) -> Result<BTreeSet<SimState>, EngineError> {
        Ok(self
            .superstep_traced(state, a)?
            .into_iter()
            .map(|o| o.state)
            .collect())
    }

    /// Like [`superstep`](Self::superstep), keeping which testing charts
    /// emitted `propertyHold` along each path. Paths reaching the same state
    /// with different holds give separate outcomes.
    pub fn superstep_traced(&self, state: &SimState, a: &str) -> Result<BTreeSet<Outcome>, EngineError> {
        self.check_superstep_input(state, a)?;
        let root = Outcome {
            state: self.broadcast(state, a),
            holds: BTreeSet::new(),
        };

        #[derive(PartialEq)]
        enum Color {
            Open,
            Done,
        }

        let mut results = BTreeSet::new();
        let mut color: HashMap<Outcome, Color> = HashMap::new();
        let root_children = self.successors(&root)?;
        if root_children.is_empty() {
            results.insert(root);
            return Ok(results);
        }
        color.insert(root.clone(), Color::Open);
        let mut stack: Vec<(Outcome, Vec<Outcome>, usize)> = vec![(root, root_children, 0)];
        while let Some((_, children, next)) = stack.last_mut() {
            if *next == children.len() {
                let (node, _, _) = stack.pop().expect("nonempty");
                color.insert(node, Color::Done);
                continue;
            }
            let child = children[*next].clone();
            *next += 1;
            match color.get(&child) {
                Some(Color::Open) => {
                    return Err(EngineError::Divergence {
                        limit: self.config.max_internal_steps,
                    })
                }
                Some(Color::Done) => continue,
                None => {}
            }
            let grandchildren = self.successors(&child)?;
            if grandchildren.is_empty() {
                color.insert(child.clone(), Color::Done);
                results.insert(child);
                continue;
            }
            if stack.len() >= self.config.max_internal_steps {
                return Err(EngineError::Divergence {
                    limit: self.config.max_internal_steps,
                });
            }
            color.insert(child.clone(), Color::Open);
            stack.push((child, grandchildren, 0));
        }
        Ok(results)
    }

    fn successors(&self, node: &Outcome) -> Result<Vec<Outcome>, EngineError> {
        if node.state.violated {
            return Ok(Vec::new());
        }
        let mut events = self.enabled_unchecked(&node.state);
        if self.config.order == ExploreOrder::Reversed {
            events.reverse();
        }
        let mut out = Vec::with_capacity(events.len());
        for event in &events {
            let (state, hold) = self.step(&node.state, event)?;
            let mut holds = node.holds.clone();
            holds.extend(hold);
            out.push(Outcome { state, holds });
        }
        Ok(out)
    }

    pub fn chart_name(&self, chart: usize) -> &str {
        &self.charts[chart].name
    }

    /// `obj.var=value` pairs of a valuation, in declaration order.
    pub fn describe_q(&self, q: &Valuation) -> Vec<String> {
        self.model
            .var_slots()
            .enumerate()
            .map(|(slot, (var, _))| format!("{var}={}", self.value(q, slot)))
            .collect()
    }

    pub fn describe_copy(&self, copy: &RunningCopy) -> String {
        let mode = match copy.mode {
            Mode::PreActive => "pre",
            Mode::Active => "active",
        };
        format!("{}[{mode}]{}", self.chart_name(copy.chart), copy.cut)
    }

    /// One-line rendering of a state: valuation, running copies and flag.
    pub fn describe(&self, state: &SimState) -> String {
        let rl: Vec<String> = state.rl.iter().map(|c| self.describe_copy(c)).collect();
        format!(
            "({{{}}}, {{{}}}, {})",
            self.describe_q(&state.q).join(", "),
            rl.join(", "),
            if state.violated { "True" } else { "False" }
        )
    }
}

/// `(Q0, ∅, False)`: every variable at its initial value, nothing running.
pub fn initial_state(model: &SystemModel) -> SimState {
    SimState {
        q: Valuation(
            model
                .var_slots()
                .map(|(_, decl)| decl.domain.iter().position(|v| *v == decl.init).unwrap_or(0) as u8)
                .collect(),
        ),
        rl: BTreeSet::new(),
        violated: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    const SHOP: &str = r#"
        object Buyer { var st in {idle, sent, done} init idle; }
        object Seller { var st in {idle, got} init idle; }
        external order, cancel;
        chart place { instances: Buyer, Seller;
          prechart: msg Env->Buyer order hot;
          main: assign Buyer.st := sent; msg Buyer->Seller req hot; }
        chart serve { instances: Buyer, Seller;
          prechart: msg Buyer->Seller req hot;
          main: assign Seller.st := got; msg Seller->Buyer resp hot; }
        chart finish { instances: Buyer, Seller;
          prechart: msg Seller->Buyer resp hot;
          main: assign Buyer.st := done; }
    "#;

    fn sim(text: &str) -> Simulator {
        Simulator::new(parse_model(text).unwrap()).unwrap()
    }

    fn values(sim: &Simulator, state: &SimState) -> Vec<String> {
        sim.describe_q(&state.q)
    }

    #[test]
    fn internal_events_follow_the_charts() {
        let sim = sim(SHOP);
        let root = sim.initial_state();
        assert!(sim.enabled_internal_events(&root).unwrap().is_empty());
        let s = sim.apply_step(&root, &sim.event("order").unwrap()).unwrap();
        let s = s.into_iter().next().unwrap();
        let names: Vec<String> = sim
            .enabled_internal_events(&s)
            .unwrap()
            .iter()
            .map(|e| e.name.clone())
            .collect();
        assert_eq!(names, ["assign Buyer.st := sent"]);
        let step = sim.enabled_internal_events(&s).unwrap().remove(0);
        let s = sim.apply_step(&s, &step).unwrap().into_iter().next().unwrap();
        let next = sim.enabled_internal_events(&s).unwrap();
        assert_eq!(next, [SystemEvent::internal("req")]);
    }

    #[test]
    fn superstep_runs_to_stability() {
        let sim = sim(SHOP);
        let out = sim.superstep(&sim.initial_state(), "order").unwrap();
        assert_eq!(out.len(), 1);
        let s = out.into_iter().next().unwrap();
        assert!(sim.is_stable(&s));
        assert!(s.rl.is_empty());
        assert_eq!(values(&sim, &s), ["Buyer.st=done", "Seller.st=got"]);
    }

    #[test]
    fn superstep_input_checks() {
        let sim = sim(SHOP);
        let root = sim.initial_state();
        assert_eq!(
            sim.superstep(&root, "req"),
            Err(EngineError::NotExternal("req".into()))
        );
        assert_eq!(
            sim.superstep(&root, "nope"),
            Err(EngineError::UnknownEvent("nope".into()))
        );
        let bad = SimState {
            violated: true,
            ..root.clone()
        };
        assert_eq!(sim.superstep(&bad, "order"), Err(EngineError::Violated));
        let unstable = sim.apply_step(&root, &sim.event("order").unwrap()).unwrap();
        let unstable = unstable.into_iter().next().unwrap();
        assert_eq!(sim.superstep(&unstable, "order"), Err(EngineError::Unstable));
    }

    #[test]
    fn no_charts_means_no_change() {
        let sim = sim("object A { var x in {a, b} init b; }\nexternal go;");
        let root = sim.initial_state();
        assert_eq!(sim.superstep(&root, "go").unwrap(), BTreeSet::from([root]));
    }

    #[test]
    fn hot_condition_violates() {
        let sim = sim(
            r#"object A { var x in {a} init a; }
               external go, stop;
               chart never { instances: A; prechart: msg Env->A go cold; main: cond A (false) hot; }
               chart optional { instances: A; prechart: msg Env->A stop cold; main: cond A (false) cold; }"#,
        );
        let root = sim.initial_state();
        let out = sim.superstep(&root, "go").unwrap();
        assert!(out.iter().all(|s| s.violated));
        let out = sim.superstep(&root, "stop").unwrap();
        assert_eq!(out, BTreeSet::from([root]));
    }

    #[test]
    fn out_of_order_event_at_hot_cut_violates() {
        let sim = sim(
            r#"object A { var x in {a} init a; }
               object B { var x in {a} init a; }
               external go, poke;
               chart strict { instances: A, B;
                 prechart: msg Env->A go cold;
                 main: msg Env->B poke hot; msg A->B done hot; }
               chart loose { instances: A, B;
                 prechart: msg Env->A go cold; msg A->B done cold; }"#,
        );
        let root = sim.initial_state();
        let s = sim.superstep(&root, "go").unwrap().into_iter().next().unwrap();
        assert!(!s.violated);
        assert_eq!(s.rl.len(), 2);
        let done = sim.event("done").unwrap();
        let after = sim.apply_step(&s, &done).unwrap().into_iter().next().unwrap();
        assert!(after.violated);
    }

    #[test]
    fn atomic_chart_runs_alone() {
        let sim = sim(
            r#"object A { var x in {n, y} init n; var z in {n, y} init n; }
               external go;
               chart first atomic { instances: A; prechart: msg Env->A go cold;
                 main: cond A (A.z = n) cold; assign A.x := y; }
               chart second { instances: A; prechart: msg Env->A go cold;
                 main: cond A (A.x = n) cold; assign A.z := y; }"#,
        );
        let out = sim.superstep(&sim.initial_state(), "go").unwrap();
        let vals: Vec<Vec<String>> = out.iter().map(|s| values(&sim, s)).collect();
        assert_eq!(vals, [["A.x=y", "A.z=n"]]);
    }

    #[test]
    fn interleavings_give_several_outcomes() {
        let sim = sim(
            r#"object A { var x in {n, p, q} init n; }
               external go;
               chart p { instances: A; prechart: msg Env->A go cold; main: assign A.x := p; }
               chart q { instances: A; prechart: msg Env->A go cold; main: assign A.x := q; }"#,
        );
        let out = sim.superstep(&sim.initial_state(), "go").unwrap();
        let vals: BTreeSet<Vec<String>> = out.iter().map(|s| values(&sim, s)).collect();
        assert_eq!(vals.len(), 2);
    }

    #[test]
    fn exploration_order_does_not_matter() {
        let mut sim = sim(SHOP);
        let root = sim.initial_state();
        let canonical = sim.superstep(&root, "order").unwrap();
        sim.set_config(EngineConfig {
            order: ExploreOrder::Reversed,
            ..sim.config()
        });
        assert_eq!(sim.superstep(&root, "order").unwrap(), canonical);
    }

    #[test]
    fn cyclic_internal_events_diverge() {
        let sim = sim(
            r#"object A { var x in {n} init n; }
               object B { var x in {n} init n; }
               external go;
               chart start { instances: A, B; prechart: msg Env->A go cold; main: msg A->B ping hot; }
               chart echo { instances: A, B; prechart: msg A->B ping cold; main: msg A->B ping hot; }"#,
        );
        assert!(matches!(
            sim.superstep(&sim.initial_state(), "go"),
            Err(EngineError::Divergence { .. })
        ));
    }

    #[test]
    fn step_bound_is_enforced() {
        let mut sim = sim(SHOP);
        sim.set_config(EngineConfig {
            max_internal_steps: 2,
            ..EngineConfig::default()
        });
        assert_eq!(
            sim.superstep(&sim.initial_state(), "order"),
            Err(EngineError::Divergence { limit: 2 })
        );
    }

    #[test]
    fn state_rendering() {
        let sim = sim(SHOP);
        assert_eq!(
            sim.describe(&sim.initial_state()),
            "({Buyer.st=idle, Seller.st=idle}, {}, False)"
        );
        assert_eq!(sim.lookup(&sim.initial_state().q, "Seller", "st"), Some("idle"));
    }
}
