use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::{
    is_marker_event, is_reserved_event, is_virtual_lifeline, Chart, Cut, Element, ElementKind,
    Operand, PredAtom, SystemModel, ENV, PROPERTY_HOLD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    DuplicateName,
    EmptyDomain,
    InitOutsideDomain,
    ReservedName,
    UnknownObject,
    UnknownVariable,
    ValueOutsideDomain,
    MissingLifeline,
    MisplacedEvent,
    EmptyChart,
    PrechartAssignment,
    NoTrigger,
    IllegalCut,
}

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

struct Sink(Vec<Diagnostic>);

impl Sink {
    fn push(&mut self, kind: DiagnosticKind, location: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic {
            kind,
            location: location.into(),
            message: message.into(),
        });
    }
}

/// Checks every model invariant. An empty result means the model is valid.
pub fn validate_model(model: &SystemModel) -> Vec<Diagnostic> {
    let mut sink = Sink(Vec::new());
    check_objects(model, &mut sink);
    check_events(model, &mut sink);
    let mut chart_names = HashSet::new();
    for chart in &model.charts {
        if !chart_names.insert(chart.name.as_str()) {
            sink.push(
                DiagnosticKind::DuplicateName,
                format!("chart {}", chart.name),
                "duplicate chart name",
            );
        }
        check_chart(model, chart, &mut sink);
    }
    sink.0
}

fn check_objects(model: &SystemModel, sink: &mut Sink) {
    let mut names = HashSet::new();
    for object in &model.objects {
        let loc = format!("object {}", object.name);
        if !names.insert(object.name.as_str()) {
            sink.push(DiagnosticKind::DuplicateName, &loc, "duplicate object name");
        }
        if is_virtual_lifeline(&object.name) {
            sink.push(DiagnosticKind::ReservedName, &loc, "object name is reserved");
        }
        let mut vars = HashSet::new();
        for var in &object.vars {
            let loc = format!("{}.{}", object.name, var.name);
            if !vars.insert(var.name.as_str()) {
                sink.push(DiagnosticKind::DuplicateName, &loc, "duplicate variable name");
            }
            if var.domain.is_empty() {
                sink.push(DiagnosticKind::EmptyDomain, &loc, "domain is empty");
            } else if !var.domain.contains(&var.init) {
                sink.push(
                    DiagnosticKind::InitOutsideDomain,
                    &loc,
                    format!("initial value `{}` is not in the domain", var.init),
                );
            }
            let distinct: BTreeSet<_> = var.domain.iter().collect();
            if distinct.len() != var.domain.len() {
                sink.push(DiagnosticKind::DuplicateName, &loc, "domain repeats a value");
            }
        }
    }
}

fn check_events(model: &SystemModel, sink: &mut Sink) {
    let mut seen = HashSet::new();
    for event in &model.external_events {
        let loc = format!("external {event}");
        if is_reserved_event(event) {
            sink.push(DiagnosticKind::ReservedName, &loc, "event name is reserved");
        }
        if !seen.insert(event.as_str()) {
            sink.push(DiagnosticKind::DuplicateName, &loc, "event declared twice");
        }
    }
}

fn check_chart(model: &SystemModel, chart: &Chart, sink: &mut Sink) {
    let chart_loc = format!("chart {}", chart.name);
    let mut seen = HashSet::new();
    for instance in &chart.instances {
        if !seen.insert(instance.as_str()) {
            sink.push(
                DiagnosticKind::DuplicateName,
                &chart_loc,
                format!("instance `{instance}` listed twice"),
            );
        }
        if instance == ENV {
            sink.push(
                DiagnosticKind::ReservedName,
                &chart_loc,
                "`Env` is implicit and cannot be a chart instance",
            );
        } else if model.object(instance).is_none() && !is_virtual_lifeline(instance) {
            sink.push(
                DiagnosticKind::UnknownObject,
                &chart_loc,
                format!("instance `{instance}` is not a declared object"),
            );
        }
    }
    if chart.prechart.is_empty() && chart.main.is_empty() {
        sink.push(DiagnosticKind::EmptyChart, &chart_loc, "chart has no elements");
        return;
    }

    let sections = [("prechart", &chart.prechart), ("main", &chart.main)];
    for (section, elements) in sections {
        for (i, element) in elements.iter().enumerate() {
            let loc = format!("chart {}, {section} element {}", chart.name, i + 1);
            check_element(model, chart, element, &loc, sink);
            if section == "prechart" && matches!(element.kind, ElementKind::Assignment { .. }) {
                sink.push(
                    DiagnosticKind::PrechartAssignment,
                    &loc,
                    "assignments are only allowed in the main chart",
                );
            }
        }
    }

    let shape = chart.shape();
    let zero = shape.zero_cut();
    let triggered = shape.enabled(&zero).any(|e| {
        chart
            .elements()
            .nth(e)
            .and_then(Element::event)
            .is_some_and(|ev| ev != PROPERTY_HOLD)
    });
    if !triggered {
        sink.push(
            DiagnosticKind::NoTrigger,
            &chart_loc,
            "no message is minimal in the chart, so it can never be activated",
        );
    }
}

fn check_element(model: &SystemModel, chart: &Chart, element: &Element, loc: &str, sink: &mut Sink) {
    for lifeline in element.lifelines() {
        if !chart.instances.iter().any(|i| i == lifeline) {
            if model.object(lifeline).is_none() && !is_virtual_lifeline(lifeline) {
                sink.push(
                    DiagnosticKind::UnknownObject,
                    loc,
                    format!("`{lifeline}` is not a declared object"),
                );
            } else {
                sink.push(
                    DiagnosticKind::MissingLifeline,
                    loc,
                    format!("`{lifeline}` is not a lifeline of this chart"),
                );
            }
        }
    }
    match &element.kind {
        ElementKind::Message { src, dst, event } => {
            if src == ENV && dst == ENV {
                sink.push(DiagnosticKind::MisplacedEvent, loc, "message from Env to Env");
            }
            let external = model.is_external(event) || is_marker_event(event);
            if src == ENV && !external {
                sink.push(
                    DiagnosticKind::MisplacedEvent,
                    loc,
                    format!("`{event}` is sent by Env but is not an external event"),
                );
            }
            if src != ENV && external {
                sink.push(
                    DiagnosticKind::MisplacedEvent,
                    loc,
                    format!("external event `{event}` must be sent by Env"),
                );
            }
            if event == super::SYNC {
                sink.push(DiagnosticKind::ReservedName, loc, "use `sync` for SYNC elements");
            }
        }
        ElementKind::Condition { predicate, .. } => {
            for atom in &predicate.0 {
                let PredAtom::Cmp { lhs, rhs, .. } = atom else {
                    continue;
                };
                let Some(decl) = check_var(model, lhs, loc, sink) else {
                    continue;
                };
                match rhs {
                    Operand::Var(v) => {
                        check_var(model, v, loc, sink);
                    }
                    Operand::Literal(lit) => {
                        if !decl.domain.contains(lit) {
                            sink.push(
                                DiagnosticKind::ValueOutsideDomain,
                                loc,
                                format!("`{lit}` is not a value of {lhs}"),
                            );
                        }
                    }
                }
            }
        }
        ElementKind::Assignment {
            instance,
            var,
            value,
        } => {
            let target = super::VarRef::new(instance.clone(), var.clone());
            if let Some(decl) = check_var(model, &target, loc, sink) {
                if !decl.domain.contains(value) {
                    sink.push(
                        DiagnosticKind::ValueOutsideDomain,
                        loc,
                        format!("`{value}` is not a value of {target}"),
                    );
                }
            }
        }
        ElementKind::Sync { instances } => {
            if instances.is_empty() {
                sink.push(DiagnosticKind::MissingLifeline, loc, "sync lists no instances");
            }
        }
    }
}

fn check_var<'m>(
    model: &'m SystemModel,
    var: &super::VarRef,
    loc: &str,
    sink: &mut Sink,
) -> Option<&'m super::VarDecl> {
    if model.object(&var.object).is_none() {
        sink.push(
            DiagnosticKind::UnknownObject,
            loc,
            format!("`{}` is not a declared object", var.object),
        );
        return None;
    }
    let decl = model.var_decl(var);
    if decl.is_none() {
        sink.push(
            DiagnosticKind::UnknownVariable,
            loc,
            format!("{var} is not declared"),
        );
    }
    decl
}

/// Checks a cut against a chart: dimensions, bounds and downward closure.
pub fn validate_cut(chart: &Chart, cut: &Cut) -> Vec<Diagnostic> {
    let shape = chart.shape();
    let loc = format!("chart {}, cut {cut}", chart.name);
    let mut out = Vec::new();
    if cut.0.len() != shape.lifelines.len() {
        out.push(Diagnostic {
            kind: DiagnosticKind::IllegalCut,
            location: loc,
            message: format!(
                "cut has {} locations but the chart has {} lifelines",
                cut.0.len(),
                shape.lifelines.len()
            ),
        });
    } else if !shape.is_legal(cut) {
        out.push(Diagnostic {
            kind: DiagnosticKind::IllegalCut,
            location: loc,
            message: "cut is not downward closed under the chart order".into(),
        });
    }
    out
}
