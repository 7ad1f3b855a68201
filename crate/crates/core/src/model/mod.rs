//! System model and universal chart definitions.
//!
//! A [`SystemModel`] holds the objects with their finite-domain state
//! variables, the external event alphabet and the universal charts. Models are
//! usually read from the line-oriented chart language with [`parse_model`] and
//! are immutable afterwards.

mod cut;
mod dsl;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use cut::{ChartShape, Cut, Mode, RunningCopy};
pub use dsl::{parse_model, parse_model_unchecked, pretty_print};
pub use validate::{validate_cut, validate_model, Diagnostic, DiagnosticKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

/// The environment pseudo-lifeline. External events are sent from here.
pub const ENV: &str = "Env";
/// Virtual lifeline bracketing interleaved parallel external events.
pub const PAR_CONTROL: &str = "ParControl";
/// Virtual lifeline that testing charts attach to.
pub const TEST_CONTROL: &str = "testControl";

pub const BEGIN_P: &str = "beginP";
pub const END_P: &str = "endP";
pub const TEST_SF: &str = "testSF";
pub const PROPERTY_HOLD: &str = "propertyHold";
pub const SYNC: &str = "SYNC";

/// Event names that users may not declare.
pub const RESERVED_EVENTS: [&str; 5] = [BEGIN_P, END_P, TEST_SF, PROPERTY_HOLD, SYNC];

/// Marker events injected by the event language rather than by users.
pub const MARKER_EVENTS: [&str; 3] = [BEGIN_P, END_P, TEST_SF];

pub const VIRTUAL_LIFELINES: [&str; 3] = [ENV, PAR_CONTROL, TEST_CONTROL];

pub fn is_reserved_event(name: &str) -> bool {
    RESERVED_EVENTS.contains(&name)
}

pub fn is_marker_event(name: &str) -> bool {
    MARKER_EVENTS.contains(&name)
}

pub fn is_virtual_lifeline(name: &str) -> bool {
    VIRTUAL_LIFELINES.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub domain: Vec<String>,
    pub init: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectDecl {
    pub name: String,
    pub vars: Vec<VarDecl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Temperature {
    Hot,
    Cold,
}

impl Temperature {
    pub fn is_hot(self) -> bool {
        self == Temperature::Hot
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Temperature::Hot => "hot",
            Temperature::Cold => "cold",
        })
    }
}

/// `object.var`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub object: String,
    pub var: String,
}

impl VarRef {
    pub fn new(object: impl Into<String>, var: impl Into<String>) -> Self {
        VarRef {
            object: object.into(),
            var: var.into(),
        }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.object, self.var)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Var(VarRef),
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PredAtom {
    Const(bool),
    Cmp { lhs: VarRef, op: CmpOp, rhs: Operand },
}

/// A conjunction of atoms. The empty conjunction is `true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Predicate(pub Vec<PredAtom>);

impl Predicate {
    pub fn constant(value: bool) -> Self {
        Predicate(vec![PredAtom::Const(value)])
    }

    pub fn var_refs(&self) -> impl Iterator<Item = &VarRef> {
        self.0.iter().flat_map(|atom| match atom {
            PredAtom::Const(_) => Vec::new(),
            PredAtom::Cmp { lhs, rhs, .. } => match rhs {
                Operand::Var(v) => vec![lhs, v],
                Operand::Literal(_) => vec![lhs],
            },
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("true");
        }
        for (i, atom) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            match atom {
                PredAtom::Const(b) => write!(f, "{b}")?,
                PredAtom::Cmp { lhs, op, rhs } => {
                    let op = match op {
                        CmpOp::Eq => "=",
                        CmpOp::Ne => "!=",
                    };
                    match rhs {
                        Operand::Var(v) => write!(f, "{lhs} {op} {v}")?,
                        Operand::Literal(l) => write!(f, "{lhs} {op} {l}")?,
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementKind {
    Message {
        src: String,
        dst: String,
        event: String,
    },
    Condition {
        instance: String,
        predicate: Predicate,
    },
    Assignment {
        instance: String,
        var: String,
        value: String,
    },
    Sync {
        instances: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub kind: ElementKind,
    pub temperature: Temperature,
}

impl Element {
    pub fn message(src: &str, dst: &str, event: &str, temperature: Temperature) -> Self {
        Element {
            kind: ElementKind::Message {
                src: src.into(),
                dst: dst.into(),
                event: event.into(),
            },
            temperature,
        }
    }

    pub fn condition(instance: &str, predicate: Predicate, temperature: Temperature) -> Self {
        Element {
            kind: ElementKind::Condition {
                instance: instance.into(),
                predicate,
            },
            temperature,
        }
    }

    pub fn assignment(instance: &str, var: &str, value: &str) -> Self {
        Element {
            kind: ElementKind::Assignment {
                instance: instance.into(),
                var: var.into(),
                value: value.into(),
            },
            temperature: Temperature::Cold,
        }
    }

    pub fn sync(instances: &[&str]) -> Self {
        Element {
            kind: ElementKind::Sync {
                instances: instances.iter().map(|s| s.to_string()).collect(),
            },
            temperature: Temperature::Cold,
        }
    }

    /// Chart lifelines this element occupies a location on. `Env` never
    /// counts as a lifeline.
    pub fn lifelines(&self) -> Vec<&str> {
        let mut out: Vec<&str> = match &self.kind {
            ElementKind::Message { src, dst, .. } => vec![src.as_str(), dst.as_str()],
            ElementKind::Condition { instance, .. } | ElementKind::Assignment { instance, .. } => {
                vec![instance.as_str()]
            }
            ElementKind::Sync { instances } => instances.iter().map(String::as_str).collect(),
        };
        out.retain(|l| *l != ENV);
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn event(&self) -> Option<&str> {
        match &self.kind {
            ElementKind::Message { event, .. } => Some(event),
            _ => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ElementKind::Message { src, dst, event } => {
                write!(f, "msg {src}->{dst} {event} {}", self.temperature)
            }
            ElementKind::Condition {
                instance,
                predicate,
            } => write!(f, "cond {instance} ({predicate}) {}", self.temperature),
            ElementKind::Assignment {
                instance,
                var,
                value,
            } => write!(f, "assign {instance}.{var} := {value}"),
            ElementKind::Sync { instances } => write!(f, "sync {}", instances.join(", ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    pub instances: Vec<String>,
    pub prechart: Vec<Element>,
    pub main: Vec<Element>,
    pub atomic: bool,
}

impl Chart {
    /// Prechart elements followed by main chart elements.
    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.prechart.iter().chain(self.main.iter())
    }

    /// Message events mentioned anywhere in the chart, excluding the
    /// copy-local `propertyHold`.
    pub fn constrained_events(&self) -> BTreeSet<&str> {
        self.elements()
            .filter_map(Element::event)
            .filter(|e| *e != PROPERTY_HOLD)
            .collect()
    }

    /// Testing charts signal satisfaction with `propertyHold`.
    pub fn is_testing_chart(&self) -> bool {
        self.elements().any(|e| e.event() == Some(PROPERTY_HOLD))
    }

    pub fn shape(&self) -> ChartShape {
        ChartShape::new(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SystemModel {
    pub objects: Vec<ObjectDecl>,
    /// The external alphabet in declaration order.
    pub external_events: Vec<String>,
    pub charts: Vec<Chart>,
}

impl SystemModel {
    pub fn object(&self, name: &str) -> Option<&ObjectDecl> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn chart(&self, name: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.name == name)
    }

    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    pub fn is_external(&self, event: &str) -> bool {
        self.external_events.iter().any(|e| e == event)
    }

    /// Message names used between system objects that are not external or
    /// reserved.
    pub fn internal_events(&self) -> BTreeSet<&str> {
        self.charts
            .iter()
            .flat_map(|c| c.elements())
            .filter_map(Element::event)
            .filter(|e| !self.is_external(e) && !is_reserved_event(e))
            .collect()
    }

    /// Flattened variable slots, objects and vars in declaration order.
    pub fn var_slots(&self) -> impl Iterator<Item = (VarRef, &VarDecl)> {
        self.objects.iter().flat_map(|o| {
            o.vars
                .iter()
                .map(move |v| (VarRef::new(o.name.clone(), v.name.clone()), v))
        })
    }

    pub fn slot_of(&self, var: &VarRef) -> Option<usize> {
        self.var_slots().position(|(r, _)| &r == var)
    }

    pub fn var_decl(&self, var: &VarRef) -> Option<&VarDecl> {
        self.object(&var.object)?
            .vars
            .iter()
            .find(|v| v.name == var.var)
    }

    pub fn testing_charts(&self) -> impl Iterator<Item = &Chart> {
        self.charts.iter().filter(|c| c.is_testing_chart())
    }

    /// Appends the declarations of `other`. External events already declared
    /// are not repeated; duplicate objects and charts are left for
    /// validation to report.
    pub fn merge(&mut self, other: SystemModel) {
        self.objects.extend(other.objects);
        for e in other.external_events {
            if !self.external_events.contains(&e) {
                self.external_events.push(e);
            }
        }
        self.charts.extend(other.charts);
    }

    /// Returns the model if it has no diagnostics.
    pub fn validated(self) -> Result<SystemModel, ModelError> {
        let diagnostics = validate_model(&self);
        if diagnostics.is_empty() {
            Ok(self)
        } else {
            Err(ModelError::Invalid(diagnostics))
        }
    }
}
